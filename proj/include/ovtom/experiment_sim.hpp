// experiment_sim.hpp — Synthetic click datasets for the delay-scan protocol:
// Bernoulli sampling of zero-click events against the forward model, with
// optional slow multiplicative efficiency drift.

#pragma once

#include "ovtom/overlap_inference.hpp"
#include "ovtom/reconstruction.hpp"
#include "ovtom/types.hpp"

#include <cstdint>
#include <optional>

namespace ovtom {

struct DriftSpec {
    double relative_amplitude = 0.0;  // in [0, 0.1]
    double period_in_settings = 20.0; // > 0
};

struct ScanPlan {
    DelaySchedule schedule;
    SpectralProfileModel profile;
    DensityMatrix signal = DensityMatrix::vacuum(0);
    Complex probe_beta = 0.0;
    BeamSplitterSpec bs;
    DetectorSpec detector;
    long long trials_per_delay = 100000; // 0 = noiseless sentinel: emit exact p
    std::uint64_t seed = 0;
    std::optional<DriftSpec> drift;

    void validate() const;
};

/// Per delay j: phi_j from the profile, p_j from the forward model at the
/// (possibly drifted) efficiency, zero_clicks ~ Binomial(trials, p_j) from a
/// per-delay substream of the seed. Emitted settings carry the nominal
/// efficiency and the profile overlap; drift is an unmodeled perturbation.
ClickDataset simulate_scan(const ScanPlan& plan);

/// Generic sampler over an explicit setting list.
ClickDataset simulate_grid(const std::vector<MeasurementSetting>& settings,
                           const DensityMatrix& signal, long long trials,
                           std::uint64_t seed);

} // namespace ovtom
