#include "ovtom/experiment_sim.hpp"
#include "ovtom/errors.hpp"
#include "ovtom/forward_model.hpp"
#include "ovtom/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ovtom {

void ScanPlan::validate() const {
    schedule.validate();
    profile.validate();
    signal.validate();
    bs.validate();
    detector.validate();
    if (trials_per_delay < 0)
        throw std::invalid_argument("ScanPlan: trials_per_delay must be >= 0");
    if (drift) {
        if (!(drift->relative_amplitude >= 0.0 && drift->relative_amplitude <= 0.1))
            throw std::invalid_argument("ScanPlan: drift amplitude must be in [0, 0.1]");
        if (!(drift->period_in_settings > 0.0))
            throw std::invalid_argument("ScanPlan: drift period must be > 0");
    }
}

namespace {

double clamp_probability(double p) {
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
        throw std::runtime_error("simulate: model probability outside [0,1]");
    return std::min(1.0, std::max(0.0, p));
}

ClickRecord sample_record(int setting_id, double p, long long trials, std::uint64_t seed,
                          std::uint64_t stream_index) {
    ClickRecord rec;
    rec.setting_id = setting_id;
    rec.trials = trials;
    if (trials == 0) {
        rec.zero_clicks = p; // noiseless sentinel: exact probability
    } else {
        Rng rng = Rng::substream(seed, stream_index);
        rec.zero_clicks = static_cast<double>(binomial_sample(rng, trials, p));
    }
    return rec;
}

} // namespace

ClickDataset simulate_scan(const ScanPlan& plan) {
    plan.validate();
    ClickDataset ds;
    const int count = plan.schedule.count();
    ds.settings.reserve(count);
    ds.records.reserve(count);
    for (int j = 0; j < count; ++j) {
        const double delay = plan.schedule.delays_s[j];
        const Complex phi = overlap_from_profile(plan.profile, delay);

        double eta = plan.detector.efficiency;
        if (plan.drift) {
            eta *= 1.0 + plan.drift->relative_amplitude *
                             std::sin(2.0 * M_PI * j / plan.drift->period_in_settings);
        }
        const double p = clamp_probability(no_click_probability(
            plan.signal, eta, plan.bs, 1, OverlapValue(phi), plan.probe_beta));

        MeasurementSetting s;
        s.eta = plan.detector.efficiency; // nominal, drift stays unmodeled
        s.bs = plan.bs;
        s.beta = plan.probe_beta;
        s.phi1 = phi;
        s.delay_fs = delay * 1e15;
        ds.settings.push_back(s);
        ds.records.push_back(sample_record(j, p, plan.trials_per_delay, plan.seed,
                                           static_cast<std::uint64_t>(j)));
    }
    ds.validate();
    return ds;
}

ClickDataset simulate_grid(const std::vector<MeasurementSetting>& settings,
                           const DensityMatrix& signal, long long trials,
                           std::uint64_t seed) {
    if (settings.empty()) throw std::invalid_argument("simulate_grid: empty setting list");
    if (trials < 0) throw std::invalid_argument("simulate_grid: trials must be >= 0");
    signal.validate();
    ClickDataset ds;
    ds.settings = settings;
    ds.records.reserve(settings.size());
    for (std::size_t j = 0; j < settings.size(); ++j) {
        const auto& s = settings[j];
        const double p = clamp_probability(no_click_probability(
            signal, s.eta, s.bs, 1, OverlapValue(s.phi1), s.beta));
        ds.records.push_back(sample_record(static_cast<int>(j), p, trials, seed,
                                           static_cast<std::uint64_t>(j)));
    }
    ds.validate();
    return ds;
}

} // namespace ovtom
