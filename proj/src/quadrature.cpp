#include "ovtom/quadrature.hpp"
#include "ovtom/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ovtom {

namespace {

GaussHermiteRule compute_gauss_hermite(int order) {
    // Golub-Welsch on the Jacobi matrix of the (physicists') Hermite
    // polynomials: zero diagonal, off-diagonal sqrt(k/2).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = std::sqrt(0.5 * k);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double sqrt_pi = 1.7724538509055160273;
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

} // namespace

const GaussHermiteRule& gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, compute_gauss_hermite(order)).first;
    return it->second;
}

std::complex<double> gaussian_plane_integral(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> center, double rate, int order) {
    if (rate <= 0.0) throw std::invalid_argument("gaussian_plane_integral: rate must be > 0");
    const auto& rule = gauss_hermite(order);
    const double scale = 1.0 / std::sqrt(rate);
    std::complex<double> sum = 0.0;
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const std::complex<double> a =
                center + std::complex<double>(rule.nodes[i] * scale, rule.nodes[j] * scale);
            sum += rule.weights[i] * rule.weights[j] * f(a);
        }
    }
    return sum / rate;
}

std::complex<double> gaussian_plane_integral_adaptive(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> center, double rate, const QuadratureOptions& opts) {
    std::complex<double> prev = gaussian_plane_integral(f, center, rate, opts.start_order);
    double achieved = std::numeric_limits<double>::infinity();
    for (int order = 2 * opts.start_order; order <= opts.max_order; order *= 2) {
        const std::complex<double> cur = gaussian_plane_integral(f, center, rate, order);
        achieved = std::abs(cur - prev);
        if (achieved <= opts.rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw quadrature_error("gaussian_plane_integral_adaptive: order cap reached", achieved);
}

std::complex<double> gaussian_plane_integral_multi(
    const std::function<std::complex<double>(const std::vector<std::complex<double>>&)>& f,
    const std::vector<std::complex<double>>& centers, double rate, int order) {
    if (rate <= 0.0) throw std::invalid_argument("gaussian_plane_integral_multi: rate must be > 0");
    const int S = static_cast<int>(centers.size());
    if (S == 0) throw std::invalid_argument("gaussian_plane_integral_multi: no modes");
    const auto& rule = gauss_hermite(order);
    const double scale = 1.0 / std::sqrt(rate);

    // Odometer over 2S node indices.
    std::vector<int> idx(2 * S, 0);
    std::vector<std::complex<double>> point(S);
    std::complex<double> sum = 0.0;
    for (;;) {
        double w = 1.0;
        for (int s = 0; s < S; ++s) {
            const int ir = idx[2 * s], ii = idx[2 * s + 1];
            point[s] = centers[s] +
                       std::complex<double>(rule.nodes[ir] * scale, rule.nodes[ii] * scale);
            w *= rule.weights[ir] * rule.weights[ii];
        }
        sum += w * f(point);
        int d = 0;
        while (d < 2 * S && ++idx[d] == order) idx[d++] = 0;
        if (d == 2 * S) break;
    }
    return sum / std::pow(rate, S);
}

std::complex<double> gaussian_plane_integral_multi_adaptive(
    const std::function<std::complex<double>(const std::vector<std::complex<double>>&)>& f,
    const std::vector<std::complex<double>>& centers, double rate,
    const QuadratureOptions& opts) {
    std::complex<double> prev =
        gaussian_plane_integral_multi(f, centers, rate, opts.start_order);
    double achieved = std::numeric_limits<double>::infinity();
    for (int order = 2 * opts.start_order; order <= opts.max_order; order *= 2) {
        const std::complex<double> cur =
            gaussian_plane_integral_multi(f, centers, rate, order);
        achieved = std::abs(cur - prev);
        if (achieved <= opts.rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw quadrature_error("gaussian_plane_integral_multi_adaptive: order cap reached",
                           achieved);
}

} // namespace ovtom
