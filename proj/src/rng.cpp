#include "ovtom/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ovtom {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 nudged away from 0 so log stays finite.
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

namespace {

long long binomial_inversion(Rng& rng, long long n, double p) {
    // CDF walk from k = 0; expected cost O(n p).
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::pow(q, static_cast<double>(n));
    double u = rng.uniform();
    long long k = 0;
    while (u > f && k < n) {
        u -= f;
        ++k;
        f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    return k;
}

// BTRS (binomial transformed rejection with squeeze), Hoermann 1993.
// Exact sampler, valid for n*p >= 10 with p <= 1/2.
long long binomial_btrs(Rng& rng, long long n, double p) {
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                     (kd - m) * lpq) {
            return static_cast<long long>(kd);
        }
    }
}

} // namespace

long long binomial_sample(Rng& rng, long long n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0 || !std::isfinite(p))
        throw std::invalid_argument("binomial_sample: need n >= 0 and p in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;

    const bool flip = p > 0.5;
    const double ps = flip ? 1.0 - p : p;
    long long k;
    if (n <= 64) {
        k = 0;
        for (long long i = 0; i < n; ++i)
            if (rng.uniform() < ps) ++k;
    } else if (static_cast<double>(n) * ps < 10.0) {
        k = binomial_inversion(rng, n, ps);
    } else {
        k = binomial_btrs(rng, n, ps);
    }
    return flip ? n - k : k;
}

} // namespace ovtom
