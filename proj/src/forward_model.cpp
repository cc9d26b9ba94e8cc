#include "ovtom/forward_model.hpp"
#include "ovtom/errors.hpp"
#include "ovtom/fock_core.hpp"

#include <cmath>
#include <stdexcept>

namespace ovtom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ProjectorMixture::validate() const {
    if (amplitudes.size() != coefficients.size())
        throw std::invalid_argument("ProjectorMixture: amplitude/coefficient length mismatch");
    if (amplitudes.size() == 0)
        throw std::invalid_argument("ProjectorMixture: empty mixture");
    if (std::abs(coefficients.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("ProjectorMixture: coefficients must sum to 1");
}

MultimodeForwardParams make_multimode_params(double eta1, double eta2,
                                             const BeamSplitterSpec& bs) {
    bs.validate();
    if (!(eta1 >= 0.0 && eta1 <= 1.0 && eta2 >= 0.0 && eta2 <= 1.0))
        throw std::invalid_argument("make_multimode_params: efficiencies must be in [0,1]");
    const Eigen::Matrix2cd u = bs.unitary();
    MultimodeForwardParams p;
    p.kappa = 1.0 - eta1 * std::norm(u(0, 0)) - eta2 * std::norm(u(1, 0));
    p.eta1 = eta1;
    p.eta2 = eta2;
    p.bs = bs;
    if (p.kappa <= 0.0)
        throw singular_parameter_error("make_multimode_params: kappa <= 0");
    return p;
}

ForwardParams forward_params(double eta, const BeamSplitterSpec& bs, int detector_index,
                             const OverlapValue& overlap, Complex beta) {
    if (detector_index != 1 && detector_index != 2)
        throw std::invalid_argument("forward_params: detector_index must be 1 or 2");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("forward_params: eta must be in [0,1]");
    bs.validate();
    const Complex uk1 = bs.u(detector_index, 1);
    const Complex uk2 = bs.u(detector_index, 2);
    const double T = std::norm(uk1);
    if (eta * T >= 1.0)
        throw singular_parameter_error("forward_params: eta |U_{k,1}|^2 = 1, sigma diverges");

    ForwardParams p;
    p.gamma = eta * std::norm(uk2) * overlap.phi2_mag() * overlap.phi2_mag() * std::norm(beta);
    p.sigma = eta * T / (1.0 - eta * T);
    if (T == 0.0) {
        // Degenerate splitter: the detector arm carries the probe alone, the
        // kernel collapses to the identity (sigma = 0) and the matched probe
        // component joins the Gaussian damping.
        p.gamma = eta * std::norm(uk2) * std::norm(beta);
        p.z = 0.0;
        return p;
    }
    p.z = (std::norm(beta) == 0.0 || uk2 == Complex(0.0))
              ? Complex(0.0)
              : -std::conj(uk2 * overlap.phi1() / uk1) * beta;
    return p;
}

Matrix kernel_table(Complex z, double sigma, int nmax) {
    if (nmax < 0) throw std::invalid_argument("kernel_table: nmax must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("kernel_table: sigma must be >= 0");
    // Derivatives of the generating function
    //   G(s,t) = e^{-sigma|z|^2}/(1+sigma) * exp(c (u+s)(v+t)),
    //   c = 1/(1+sigma), u = sigma z, v = sigma conj(z):
    //   M_{n,m} = d^n_s d^m_t exp(c(u+s)(v+t)) |_0,
    //   M_{0,m} = (c u)^m M_{0,0},  M_{n,m} = c (v M_{n-1,m} + m M_{n-1,m-1}).
    const double c = 1.0 / (1.0 + sigma);
    const Complex u = sigma * z;
    const Complex v = sigma * std::conj(z);
    Matrix m(nmax + 1, nmax + 1);
    m(0, 0) = std::exp(c * sigma * sigma * std::norm(z));
    for (int col = 1; col <= nmax; ++col) m(0, col) = c * u * m(0, col - 1);
    for (int row = 1; row <= nmax; ++row) {
        m(row, 0) = c * v * m(row - 1, 0);
        for (int col = 1; col <= nmax; ++col)
            m(row, col) = c * (v * m(row - 1, col) +
                               static_cast<double>(col) * m(row - 1, col - 1));
    }
    // Prefactor and 1/sqrt(n! m!) normalization.
    const double pref = std::exp(-sigma * std::norm(z)) * c;
    Eigen::VectorXd inv_sqrt_fact(nmax + 1);
    inv_sqrt_fact(0) = 1.0;
    for (int n = 1; n <= nmax; ++n)
        inv_sqrt_fact(n) = inv_sqrt_fact(n - 1) / std::sqrt(static_cast<double>(n));
    for (int row = 0; row <= nmax; ++row)
        for (int col = 0; col <= nmax; ++col)
            m(row, col) *= pref * inv_sqrt_fact(row) * inv_sqrt_fact(col);
    if (!m.allFinite())
        throw std::overflow_error("kernel_table: non-finite kernel values");
    return m;
}

double no_click_fock(const DensityMatrix& rho, const ForwardParams& params,
                     double eta, double T) {
    if (!(eta >= 0.0 && eta <= 1.0 && T >= 0.0 && T <= 1.0))
        throw std::invalid_argument("no_click_fock: eta and T must be in [0,1]");
    if (eta * T >= 1.0)
        throw singular_parameter_error("no_click_fock: eta T = 1");
    const double sigma_expected = eta * T / (1.0 - eta * T);
    if (std::abs(params.sigma - sigma_expected) > 1e-9 * (1.0 + sigma_expected))
        throw std::invalid_argument("no_click_fock: sigma inconsistent with eta T");

    const Matrix k = kernel_table(params.z, params.sigma, rho.cutoff());
    const Complex sum = (rho.elements().array() * k.array()).sum();
    const double p = std::exp(-params.gamma) / (1.0 - eta * T) * sum.real();
    if (!std::isfinite(p))
        throw std::overflow_error("no_click_fock: parameter overflow");
    return p;
}

double no_click_probability(const DensityMatrix& rho, double eta,
                            const BeamSplitterSpec& bs, int detector_index,
                            const OverlapValue& overlap, Complex beta) {
    const ForwardParams p = forward_params(eta, bs, detector_index, overlap, beta);
    const double T = std::norm(bs.u(detector_index, 1));
    return no_click_fock(rho, p, eta, T);
}

double no_click_projector(const ProjectorMixture& mix, const ProjectorSetting& setting) {
    mix.validate();
    setting.bs.validate();
    const double eta = setting.eta;
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("no_click_projector: eta must be in [0,1]");
    const Complex u11 = setting.bs.u(1, 1);
    const Complex u12 = setting.bs.u(1, 2);
    const double sqrt_eta = std::sqrt(eta);
    const Complex bbar = -sqrt_eta * std::polar(1.0, std::arg(u11)) * std::conj(u12) *
                         std::conj(setting.overlap.phi1()) * setting.beta;
    const double damp = std::exp(-eta * std::norm(u12) * setting.overlap.phi2_mag() *
                                 setting.overlap.phi2_mag() * std::norm(setting.beta));
    double sum = 0.0;
    for (Eigen::Index j = 0; j < mix.amplitudes.size(); ++j) {
        const Complex abar = sqrt_eta * std::abs(u11) * mix.amplitudes(j);
        sum += mix.coefficients(j) * std::exp(-std::norm(bbar - abar));
    }
    return damp * sum;
}

namespace {

// Shared constants of the multimode Gaussian reduction. With
// A = U^dag diag(1/(1-eta1), 1/(1-eta2)) U the integral over the probe mode
// leaves, per source mode s,
//   kappa^{-1} C(beta_s) int d^2a e^{-sigma'|a - w_s|^2} Q_s(a)
// with sigma' = (1-kappa)/kappa, w_s = -conj(A12) beta_s / (A22 sigma') and
// C(beta_s) = exp(-eta1 eta2 |beta_s|^2 / (1-kappa)).
struct MultimodeReduction {
    double sigma_prime;
    Complex center_per_beta; // w_s = center_per_beta * beta_s
    double damp_per_beta2;   // C = exp(damp_per_beta2 * |beta_s|^2)
};

MultimodeReduction reduce(const MultimodeForwardParams& params) {
    const Eigen::Matrix2cd u = params.bs.unitary();
    if (params.eta1 >= 1.0 || params.eta2 >= 1.0)
        throw singular_parameter_error(
            "no_click_multimode_coherent: unit efficiency not supported by the integral form");
    const double e1 = 1.0 / (1.0 - params.eta1);
    const double e2 = 1.0 / (1.0 - params.eta2);
    const Complex a12 = e1 * std::conj(u(0, 0)) * u(0, 1) + e2 * std::conj(u(1, 0)) * u(1, 1);
    const double a22 = e1 * std::norm(u(0, 1)) + e2 * std::norm(u(1, 1));
    MultimodeReduction r;
    r.sigma_prime = (1.0 - params.kappa) / params.kappa;
    r.center_per_beta = (r.sigma_prime > 0.0)
                            ? -std::conj(a12) / (a22 * r.sigma_prime)
                            : Complex(0.0);
    r.damp_per_beta2 = -params.eta1 * params.eta2 / (1.0 - params.kappa);
    if (1.0 - params.kappa == 0.0) r.damp_per_beta2 = 0.0;
    return r;
}

} // namespace

double no_click_multimode_coherent(const std::vector<DensityMatrix>& sources_per_mode,
                                   const MultimodeForwardParams& params,
                                   const Vector& beta, const QuadratureOptions& opts) {
    const int S = static_cast<int>(sources_per_mode.size());
    if (S == 0 || beta.size() != S)
        throw std::invalid_argument("no_click_multimode_coherent: mode count mismatch");
    if (params.eta1 == 0.0 && params.eta2 == 0.0) return 1.0;
    const MultimodeReduction r = reduce(params);

    double p = 1.0;
    for (int s = 0; s < S; ++s) {
        const DensityMatrix& rho = sources_per_mode[s];
        const Complex w = r.center_per_beta * beta(s);
        double mode_integral;
        if (r.sigma_prime == 0.0) {
            mode_integral = 1.0; // flat Gaussian: Husimi normalization
        } else {
            const Complex val = gaussian_plane_integral_adaptive(
                [&rho](Complex a) { return Complex(husimi_q(rho, a), 0.0); }, w,
                r.sigma_prime, opts);
            mode_integral = val.real();
        }
        p *= std::exp(r.damp_per_beta2 * std::norm(beta(s))) * mode_integral / params.kappa;
    }
    return p;
}

double no_click_multimode_coherent(
    const std::function<double(const std::vector<Complex>&)>& husimi_source,
    int mode_count, const MultimodeForwardParams& params, const Vector& beta,
    const QuadratureOptions& opts) {
    if (mode_count < 1 || beta.size() != mode_count)
        throw std::invalid_argument("no_click_multimode_coherent: mode count mismatch");
    if (params.eta1 == 0.0 && params.eta2 == 0.0) return 1.0;
    const MultimodeReduction r = reduce(params);
    if (r.sigma_prime == 0.0) return 1.0;

    std::vector<Complex> centers(mode_count);
    for (int s = 0; s < mode_count; ++s) centers[s] = r.center_per_beta * beta(s);
    const Complex integral = gaussian_plane_integral_multi_adaptive(
        [&husimi_source](const std::vector<Complex>& a) {
            return Complex(husimi_source(a), 0.0);
        },
        centers, r.sigma_prime, opts);
    return std::exp(r.damp_per_beta2 * beta.squaredNorm()) * integral.real() /
           std::pow(params.kappa, mode_count);
}

double gaussian_integral_identity_check(const Eigen::Matrix2cd& B, const Vector& g,
                                        const Vector& h, int order) {
    if (g.size() != 2 || h.size() != 2)
        throw std::invalid_argument("gaussian_integral_identity_check: vectors must have length 2");
    const double herm_dev = (B - B.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > 1e-12)
        throw std::invalid_argument("gaussian_integral_identity_check: B must be Hermitian");

    // Diagonalize B = Q L Q^dag and substitute a -> a' Q^dag, which leaves the
    // measure invariant and factorizes the integral per mode.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(B);
    const Eigen::Vector2d lambda = es.eigenvalues();
    if (lambda.minCoeff() <= 0.0)
        throw std::invalid_argument("gaussian_integral_identity_check: B must be positive definite");
    const Eigen::Matrix2cd q = es.eigenvectors();
    const Vector g_rot = (g.transpose() * q).transpose();
    const Vector h_rot = (h.transpose() * q).transpose();

    Complex lhs = 1.0;
    for (int s = 0; s < 2; ++s) {
        const Complex gs = g_rot(s);
        const Complex hs_conj = std::conj(h_rot(s));
        const Complex val = gaussian_plane_integral(
            [gs, hs_conj](Complex a) {
                return std::exp(a * hs_conj + gs * std::conj(a));
            },
            // exp(-lambda|a|^2 + linear) integrated against the plain measure
            Complex(0.0), lambda(s), order);
        lhs *= val / kPi;
    }

    const Complex rhs = std::exp((g.transpose() * B.inverse() * h.conjugate()).value()) /
                        B.determinant();
    return std::abs(lhs - rhs);
}

} // namespace ovtom
