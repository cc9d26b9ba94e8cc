// overlap_inference.hpp — The state -> mode direction: per-setting overlap
// moduli from zero-click data given a known state, delay scans to overlap
// curves, and parametric spectral-profile fits.

#pragma once

#include "ovtom/reconstruction.hpp"
#include "ovtom/types.hpp"

#include <vector>

namespace ovtom {

struct DelaySchedule {
    std::vector<double> delays_s; // strictly increasing

    void validate() const;
    static DelaySchedule uniform(int count, double spacing_s, bool centered = true);
    int count() const { return static_cast<int>(delays_s.size()); }
};

/// Gaussian model of the spectral-envelope product: the overlap as a function
/// of delay is its Fourier transform,
///   phi(dt) = amplitude exp(-sigma_eff^2 dt^2 / 2) exp(-i center_offset dt).
struct SpectralProfileModel {
    double amplitude = 1.0;          // peak |phi| at optimal delay, <= 1
    double sigma_eff_rad_s = 1.0;    // effective width of the product envelope
    double center_offset_rad_s = 0.0;

    void validate() const;
};

Complex overlap_from_profile(const SpectralProfileModel& model, double delay_s);

struct OverlapSetting {
    double eta = 0.0;
    BeamSplitterSpec bs;
    Complex beta = 0.0;
};

/// Inverts no_click <-> |phi| by bisection for a known diagonal non-vacuum
/// state; unique by strict monotonicity in |phi|. Observations outside the
/// attainable range are clipped when within 3 standard errors, otherwise a
/// model_mismatch_error is thrown. Vacuum states throw non_identifiable_error.
double estimate_overlap_modulus(const DensityMatrix& rho_diag, const OverlapSetting& setting,
                                double observed_p0, double std_error = 0.0);

struct OverlapCurve {
    std::vector<double> delays_s;
    std::vector<double> phi_mag;
    std::vector<double> phi_err;   // delta-method propagated binomial error
    std::vector<bool> flagged;     // clipped or failed points
    std::vector<double> phi_phase; // unused for diagonal states; kept for layout

    int valid_count() const;
};

/// Per-delay modulus estimates with propagated uncertainty. Failed points are
/// flagged, never abort the scan.
OverlapCurve overlap_curve_from_scan(const DensityMatrix& rho_known,
                                     const ClickDataset& dataset);

struct ProfileFit {
    SpectralProfileModel model;
    double residual = 0.0; // weighted RMS residual
    int iterations = 0;
    bool converged = false;
    bool center_offset_fixed = true; // unidentifiable from modulus data
};

/// Weighted nonlinear least squares of (amplitude, sigma_eff) against
/// |phi(dt)|; amplitude bounded to [0,1]. Requires >= 4 valid points.
ProfileFit fit_profile(const OverlapCurve& curve);

} // namespace ovtom
