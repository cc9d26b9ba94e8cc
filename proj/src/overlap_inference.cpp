#include "ovtom/overlap_inference.hpp"
#include "ovtom/errors.hpp"
#include "ovtom/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ovtom {

void DelaySchedule::validate() const {
    if (delays_s.empty()) throw std::invalid_argument("DelaySchedule: empty");
    for (std::size_t i = 1; i < delays_s.size(); ++i)
        if (delays_s[i] <= delays_s[i - 1])
            throw std::invalid_argument("DelaySchedule: delays must be strictly increasing");
}

DelaySchedule DelaySchedule::uniform(int count, double spacing_s, bool centered) {
    if (count < 1 || spacing_s <= 0.0)
        throw std::invalid_argument("DelaySchedule::uniform: bad count or spacing");
    DelaySchedule s;
    s.delays_s.reserve(count);
    const double offset = centered ? -0.5 * (count - 1) * spacing_s : 0.0;
    for (int j = 0; j < count; ++j) s.delays_s.push_back(offset + j * spacing_s);
    return s;
}

void SpectralProfileModel::validate() const {
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
        throw std::invalid_argument("SpectralProfileModel: amplitude must be in [0,1]");
    if (!(sigma_eff_rad_s > 0.0))
        throw std::invalid_argument("SpectralProfileModel: sigma_eff must be > 0");
}

Complex overlap_from_profile(const SpectralProfileModel& model, double delay_s) {
    model.validate();
    const double mag = model.amplitude *
                       std::exp(-0.5 * model.sigma_eff_rad_s * model.sigma_eff_rad_s *
                                delay_s * delay_s);
    return mag * std::polar(1.0, -model.center_offset_rad_s * delay_s);
}

namespace {

struct InversionOutcome {
    double phi_mag = 0.0;
    bool clipped = false;
};

InversionOutcome invert_modulus(const DensityMatrix& rho, const OverlapSetting& setting,
                                double observed_p0, double std_error) {
    if (!rho.is_diagonal(1e-12))
        throw std::invalid_argument("estimate_overlap_modulus: state must be diagonal");
    if (std::abs(rho.element(0, 0).real() - 1.0) < 1e-12)
        throw non_identifiable_error(
            "estimate_overlap_modulus: vacuum signal carries no overlap information");
    if (std::norm(setting.beta) == 0.0)
        throw std::invalid_argument("estimate_overlap_modulus: probe amplitude must be nonzero");

    auto p_of = [&](double mag) {
        return no_click_probability(rho, setting.eta, setting.bs, 1, OverlapValue(mag),
                                    setting.beta);
    };
    const double p_lo = p_of(0.0);
    const double p_hi = p_of(1.0);

    InversionOutcome out;
    if (observed_p0 < p_lo) {
        if (p_lo - observed_p0 > 3.0 * std_error)
            throw model_mismatch_error("estimate_overlap_modulus: observation below range");
        out.phi_mag = 0.0;
        out.clipped = true;
        return out;
    }
    if (observed_p0 > p_hi) {
        if (observed_p0 - p_hi > 3.0 * std_error)
            throw model_mismatch_error("estimate_overlap_modulus: observation above range");
        out.phi_mag = 1.0;
        out.clipped = true;
        return out;
    }

    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (p_of(mid) < observed_p0)
            lo = mid;
        else
            hi = mid;
    }
    out.phi_mag = 0.5 * (lo + hi);
    return out;
}

double slope_dp_dphi(const DensityMatrix& rho, const OverlapSetting& setting, double mag) {
    const double h = 1e-5;
    const double lo = std::max(0.0, mag - h);
    const double hi = std::min(1.0, mag + h);
    const double p_lo = no_click_probability(rho, setting.eta, setting.bs, 1,
                                             OverlapValue(lo), setting.beta);
    const double p_hi = no_click_probability(rho, setting.eta, setting.bs, 1,
                                             OverlapValue(hi), setting.beta);
    return (p_hi - p_lo) / (hi - lo);
}

} // namespace

double estimate_overlap_modulus(const DensityMatrix& rho_diag, const OverlapSetting& setting,
                                double observed_p0, double std_error) {
    return invert_modulus(rho_diag, setting, observed_p0, std_error).phi_mag;
}

OverlapCurve overlap_curve_from_scan(const DensityMatrix& rho_known,
                                     const ClickDataset& dataset) {
    dataset.validate();
    OverlapCurve curve;
    const std::size_t n = dataset.records.size();
    curve.delays_s.resize(n, 0.0);
    curve.phi_mag.resize(n, 0.0);
    curve.phi_err.resize(n, 0.0);
    curve.flagged.resize(n, false);
    curve.phi_phase.resize(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = dataset.records[i];
        const auto& s = dataset.settings[rec.setting_id];
        curve.delays_s[i] = s.delay_fs ? *s.delay_fs * 1e-15 : 0.0;

        OverlapSetting os{s.eta, s.bs, s.beta};
        const double phat = ClickDataset::frequency(rec);
        const double se = rec.trials > 0
                              ? std::sqrt(std::max(phat * (1.0 - phat), 1e-12) /
                                          static_cast<double>(rec.trials))
                              : 0.0;
        try {
            const InversionOutcome out = invert_modulus(rho_known, os, phat, se);
            curve.phi_mag[i] = out.phi_mag;
            curve.flagged[i] = out.clipped;
            const double slope = slope_dp_dphi(rho_known, os, out.phi_mag);
            curve.phi_err[i] = se / std::max(std::abs(slope), 1e-12);
        } catch (const std::exception&) {
            curve.flagged[i] = true;
        }
    }
    return curve;
}

int OverlapCurve::valid_count() const {
    int n = 0;
    for (bool f : flagged)
        if (!f) ++n;
    return n;
}

ProfileFit fit_profile(const OverlapCurve& curve) {
    std::vector<double> t, y, w;
    for (std::size_t i = 0; i < curve.phi_mag.size(); ++i) {
        if (curve.flagged[i]) continue;
        t.push_back(curve.delays_s[i]);
        y.push_back(curve.phi_mag[i]);
        const double err = curve.phi_err[i];
        w.push_back(err > 0.0 ? 1.0 / (err * err) : 0.0);
    }
    if (t.size() < 4)
        throw std::invalid_argument("fit_profile: need at least 4 valid points");
    // Noiseless curves carry zero errors; fall back to unit weights.
    const double wmax = *std::max_element(w.begin(), w.end());
    if (wmax == 0.0)
        std::fill(w.begin(), w.end(), 1.0);
    else
        for (auto& wi : w)
            if (wi == 0.0) wi = wmax;

    // Initial guess: peak value, width from the half-maximum crossing.
    double amp = std::min(1.0, *std::max_element(y.begin(), y.end()));
    if (amp <= 0.0) amp = 0.5;
    double sigma = 0.0;
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] == 0.0 || y[i] <= 0.0 || y[i] >= amp) continue;
            const double cand = std::sqrt(2.0 * std::log(amp / y[i])) / std::abs(t[i]);
            const double half_dev = std::abs(y[i] - 0.5 * amp);
            if (half_dev < best) {
                best = half_dev;
                sigma = cand;
            }
        }
        if (!(sigma > 0.0)) {
            const double span = std::max(std::abs(t.front()), std::abs(t.back()));
            sigma = span > 0.0 ? 2.0 / span : 1.0;
        }
    }

    // Levenberg-Marquardt on (amplitude, sigma) with a box on the amplitude.
    auto chi2 = [&](double a, double s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double m = a * std::exp(-0.5 * s * s * t[i] * t[i]);
            acc += w[i] * (y[i] - m) * (y[i] - m);
        }
        return acc;
    };

    double lambda = 1e-3;
    double best_chi2 = chi2(amp, sigma);
    int iter = 0;
    bool converged = false;
    const int max_iter = 200;
    for (; iter < max_iter; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double e = std::exp(-0.5 * sigma * sigma * t[i] * t[i]);
            const double m = amp * e;
            const double r = y[i] - m;
            const Eigen::Vector2d j(e, -amp * sigma * t[i] * t[i] * e);
            jtj += w[i] * j * j.transpose();
            jtr += w[i] * r * j;
        }
        Eigen::Matrix2d damped = jtj;
        damped(0, 0) *= 1.0 + lambda;
        damped(1, 1) *= 1.0 + lambda;
        damped(0, 0) += 1e-300;
        damped(1, 1) += 1e-300;
        const Eigen::Vector2d step = damped.ldlt().solve(jtr);

        const double amp_new = std::clamp(amp + step(0), 0.0, 1.0);
        const double sigma_new = std::max(sigma + step(1), sigma * 1e-6);
        const double c_new = chi2(amp_new, sigma_new);
        if (c_new < best_chi2) {
            const double rel_step = std::abs(amp_new - amp) + std::abs(sigma_new - sigma) /
                                                                  std::max(sigma, 1e-300);
            amp = amp_new;
            sigma = sigma_new;
            best_chi2 = c_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel_step < 1e-13) {
                converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) {
                converged = true; // stalled at a stationary point
                break;
            }
        }
    }

    ProfileFit fit;
    fit.model.amplitude = amp;
    fit.model.sigma_eff_rad_s = sigma;
    fit.model.center_offset_rad_s = 0.0;
    double wsum = 0.0;
    for (double wi : w) wsum += wi;
    fit.residual = std::sqrt(best_chi2 / wsum);
    fit.iterations = iter;
    fit.converged = converged;
    fit.center_offset_fixed = true;
    return fit;
}

} // namespace ovtom
