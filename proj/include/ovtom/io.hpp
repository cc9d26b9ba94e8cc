// io.hpp — File formats: click-dataset CSV, settings/state/result JSON,
// overlap-curve and phase-space CSV. Writers are deterministic (fixed key
// order, shortest round-trip doubles) so identical inputs give byte-identical
// files.

#pragma once

#include "ovtom/overlap_inference.hpp"
#include "ovtom/reconstruction.hpp"
#include "ovtom/weierstrass.hpp"

#include <string>

namespace ovtom {

// dataset CSV: header setting_id,trials,zero_clicks
std::string dataset_to_csv(const ClickDataset& ds);
// Parses records only; settings come from the companion JSON.
std::vector<ClickRecord> dataset_from_csv(const std::string& text);

// settings JSON: {"settings": [{id, eta, transmittivity, phase_t, phase_r,
//                               beta_re, beta_im, phi_re, phi_im, delay_fs?}]}
std::string settings_to_json(const std::vector<MeasurementSetting>& settings);
std::vector<MeasurementSetting> settings_from_json(const std::string& text);

// state JSON: {"cutoff": N, "diagonal": [...]} or {"cutoff": N, "re": [[..]], "im": [[..]]}
std::string state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const std::string& text);

std::string reconstruction_to_json(const ReconstructionResult& result,
                                   const std::string& basis_kind);

// overlap curve CSV: delay_fs,phi_mag,phi_err,flagged
std::string curve_to_csv(const OverlapCurve& curve);
OverlapCurve curve_from_csv(const std::string& text);

std::string profile_fit_to_json(const ProfileFit& fit);

// phase-space grid CSV: re,im,value_re,value_im
std::string grid_to_csv(const PhaseSpaceGrid& grid);

// kernel table CSV: z_index,z_re,z_im,n,m,k_re,k_im
std::string kernel_table_to_csv(const std::vector<Complex>& z_list, double eta,
                                double transmittivity, int cutoff);

// Shortest-round-trip decimal rendering used by every CSV writer.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content hash, hex-encoded; used in run manifests.
std::string fnv1a_hex(const std::string& bytes);

} // namespace ovtom
