// fock_core.hpp — Truncated Fock-space states and the brute-force four-mode
// reference evaluation of zero-click probabilities. Every closed form in the
// library is validated against oracle_no_click.

#pragma once

#include "ovtom/types.hpp"

#include <vector>

namespace ovtom {

/// Fock expansion of |alpha>: entry n = exp(-|alpha|^2/2) alpha^n / sqrt(n!).
Vector coherent_amplitudes(Complex alpha, int cutoff);

/// Poisson tail mass 1 - sum_{n<=cutoff} e^{-|a|^2} |a|^{2n}/n!, i.e. the
/// squared-norm deficit of the truncated coherent state.
double coherent_norm_deficit(Complex alpha, int cutoff);

/// Cutoff heuristic keeping coherent-component tails negligible:
/// max(8, ceil(|beta|^2 + 6|beta| + signal_cutoff)).
int suggested_cutoff(Complex beta, int signal_cutoff);

/// Husimi Q function (1/pi) <alpha| rho |alpha>.
double husimi_q(const DensityMatrix& rho, Complex alpha);

/// Zero-click probability computed by direct state evolution: the signal is
/// rotated into the two-mode internal basis fixed by the overlap, tensored
/// with the coherent probe and vacuum, pushed through the beam splitter
/// acting on each internal mode pair, and measured with the diagonal POVM
/// (1-eta1)^(n11+n12) (1-eta2)^(n21+n22).
///
/// cutoff is the per-mode Fock bound of the four-mode space. The caller is
/// responsible for choosing it so that truncated-state norm deficits are
/// negligible (see suggested_cutoff / coherent_norm_deficit).
double oracle_no_click(const DensityMatrix& rho_signal, Complex probe,
                       const BeamSplitterSpec& bs, const OverlapValue& overlap,
                       double eta1, double eta2, int cutoff);

/// Checks the normal/antinormal ordering identity
///   N exp(-a (I-H) a^dag) = A exp(-a (H^{-1}-I) a^dag) / det(H)
/// for diagonal H, building both sides as truncated Fock-space matrices:
/// the normally ordered side from the (nilpotent, exact) ladder-operator
/// series, the antinormally ordered side from its coherent-projector
/// integral evaluated by Gauss-Hermite quadrature. Returns the maximum
/// elementwise deviation on the subspace with total photon number
/// <= cutoff - 2.
double verify_ordering_identity(const std::vector<double>& h_eigenvalues, int cutoff);

} // namespace ovtom
