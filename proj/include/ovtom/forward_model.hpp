// forward_model.hpp — Closed-form zero-click probabilities: the single-mode
// Gaussian kernel expansion, the coherent-projector form, and the multimode
// coherent-probe Gaussian-integral form.

#pragma once

#include "ovtom/quadrature.hpp"
#include "ovtom/types.hpp"

#include <functional>
#include <vector>

namespace ovtom {

/// Parameters of the single-mode no-click kernel at one detector:
///   gamma = eta |U_{k,2}|^2 |phi2|^2 |beta|^2
///   sigma = eta T / (1 - eta T),  T = |U_{k,1}|^2
///   z     = -conj(U_{k,2} phi1 / U_{k,1}) beta
struct ForwardParams {
    double gamma = 0.0;
    double sigma = 0.0;
    Complex z = 0.0;
};

/// Real-weighted sum of coherent projectors sum_j c_j |alpha_j><alpha_j|;
/// coefficients may be negative but must sum to one.
struct ProjectorMixture {
    Vector amplitudes;
    Eigen::VectorXd coefficients;
    void validate() const;
};

/// Parameters of the multimode coherent-probe form; kappa is the no-click
/// survival factor 1 - eta1 |U11|^2 - eta2 |U21|^2.
struct MultimodeForwardParams {
    double kappa = 1.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    BeamSplitterSpec bs;
};

MultimodeForwardParams make_multimode_params(double eta1, double eta2,
                                             const BeamSplitterSpec& bs);

/// Kernel parameters for detector_index (1 or 2). Throws
/// singular_parameter_error when eta |U_{k,1}|^2 == 1 (sigma diverges).
ForwardParams forward_params(double eta, const BeamSplitterSpec& bs, int detector_index,
                             const OverlapValue& overlap, Complex beta);

/// Gaussian kernel moments
///   K_{n,m}(z, sigma) = int (d^2a/pi) e^{-sigma|a-z|^2} e^{-|a|^2}
///                       conj(a)^n a^m / sqrt(n! m!)
/// for all n, m <= nmax, computed by a two-index recurrence seeded at K_{0,0}.
Matrix kernel_table(Complex z, double sigma, int nmax);

/// p = exp(-gamma) (1 - eta T)^{-1} sum_{n,m} rho_{n,m} K_{n,m}(z, sigma).
/// eta and T must be consistent with params.sigma.
double no_click_fock(const DensityMatrix& rho, const ForwardParams& params,
                     double eta, double T);

/// Convenience composition: forward_params + no_click_fock at detector k.
double no_click_probability(const DensityMatrix& rho, double eta,
                            const BeamSplitterSpec& bs, int detector_index,
                            const OverlapValue& overlap, Complex beta);

struct ProjectorSetting {
    double eta = 0.0;
    BeamSplitterSpec bs;
    OverlapValue overlap{1.0};
    Complex beta = 0.0;
};

/// Coherent-projector form at detector 1:
///   p = exp(-eta |U12|^2 |phi2|^2 |beta|^2) sum_j c_j exp(-|bbar - abar_j|^2)
/// with abar_j = sqrt(eta) |U11| alpha_j and
/// bbar = -sqrt(eta) e^{i arg U11} conj(U12) conj(phi1) beta.
double no_click_projector(const ProjectorMixture& mix, const ProjectorSetting& setting);

/// Multimode coherent-probe form evaluated by S-fold Gauss-Hermite quadrature
/// of the Gaussian-weighted Husimi function. Product-form sources are
/// integrated mode by mode.
double no_click_multimode_coherent(const std::vector<DensityMatrix>& sources_per_mode,
                                   const MultimodeForwardParams& params,
                                   const Vector& beta,
                                   const QuadratureOptions& opts = {});

/// General (possibly correlated) source given as a joint Husimi callable.
double no_click_multimode_coherent(
    const std::function<double(const std::vector<Complex>&)>& husimi_source,
    int mode_count, const MultimodeForwardParams& params, const Vector& beta,
    const QuadratureOptions& opts = {});

/// Test utility for the standard complex Gaussian integral
///   int (dmu(a)/pi^S) exp(-a B a^dag + a h^dag + g a^dag)
///     = exp(g B^{-1} h^dag) / det(B):
/// returns |quadrature(LHS) - closed form|.
double gaussian_integral_identity_check(const Eigen::Matrix2cd& B, const Vector& g,
                                        const Vector& h, int order = 64);

} // namespace ovtom
