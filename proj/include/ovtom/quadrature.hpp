// quadrature.hpp — Gauss-Hermite rules and adaptive Gaussian-weighted
// integrals over the complex plane

#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace ovtom {

// Nodes/weights for integral over R of exp(-x^2) f(x).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Computed by Golub-Welsch; cached per order, thread-safe.
const GaussHermiteRule& gauss_hermite(int order);

struct QuadratureOptions {
    double rel_tol = 1e-8;
    int start_order = 8;
    int max_order = 256;
};

// integral over C of d^2a exp(-rate*|a - center|^2) f(a), with d^2a the
// Lebesgue measure on the plane (no 1/pi). Fixed order.
std::complex<double> gaussian_plane_integral(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> center, double rate, int order);

// Same integral with order doubling until two successive estimates agree to
// opts.rel_tol. Throws quadrature_error with the achieved estimate when the
// order cap is hit first.
std::complex<double> gaussian_plane_integral_adaptive(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> center, double rate, const QuadratureOptions& opts = {});

// S-fold tensor version: d^2a_1 ... d^2a_S exp(-rate*sum|a_s - c_s|^2) f(a).
std::complex<double> gaussian_plane_integral_multi(
    const std::function<std::complex<double>(const std::vector<std::complex<double>>&)>& f,
    const std::vector<std::complex<double>>& centers, double rate, int order);

std::complex<double> gaussian_plane_integral_multi_adaptive(
    const std::function<std::complex<double>(const std::vector<std::complex<double>>&)>& f,
    const std::vector<std::complex<double>>& centers, double rate,
    const QuadratureOptions& opts = {});

} // namespace ovtom
