#include "ovtom/fock_core.hpp"
#include "ovtom/errors.hpp"
#include "ovtom/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ovtom {

Vector coherent_amplitudes(Complex alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("coherent_amplitudes: cutoff must be >= 0");
    Vector amps(cutoff + 1);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    amps(0) = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        amps(n) = term;
    }
    return amps;
}

double coherent_norm_deficit(Complex alpha, int cutoff) {
    const double lambda = std::norm(alpha);
    double term = std::exp(-lambda);
    double cdf = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= lambda / n;
        cdf += term;
    }
    return std::max(0.0, 1.0 - cdf);
}

int suggested_cutoff(Complex beta, int signal_cutoff) {
    const double b = std::abs(beta);
    const int c = static_cast<int>(std::ceil(b * b + 6.0 * b + signal_cutoff));
    return std::max(8, c);
}

double husimi_q(const DensityMatrix& rho, Complex alpha) {
    const Vector amps = coherent_amplitudes(alpha, rho.cutoff());
    const Complex val = amps.dot(rho.elements() * amps); // <alpha|rho|alpha>
    return val.real() / M_PI;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// (1-eta)^n with the eta = 1 limit 0^0 = 1.
double no_click_weight(double eta, int n) {
    if (n == 0) return 1.0;
    return std::pow(1.0 - eta, n);
}

// Principal logarithm of a 2x2 unitary with det = 1 (our BeamSplitterSpec
// construction guarantees det 1): U = cos(theta) I + sin(theta) K with
// K^2 = -I, so log U = theta K.
Eigen::Matrix2cd unitary_log(const Eigen::Matrix2cd& u) {
    const double ct = std::clamp(0.5 * u.trace().real(), -1.0, 1.0);
    const double theta = std::acos(ct);
    const double st = std::sin(theta);
    if (st < 1e-12) {
        // Diagonal-dominant limit: log of the diagonal phases.
        Eigen::Matrix2cd lg = Eigen::Matrix2cd::Zero();
        lg(0, 0) = Complex(0.0, std::arg(u(0, 0)));
        lg(1, 1) = Complex(0.0, std::arg(u(1, 1)));
        return lg;
    }
    return (theta / st) * (u - ct * Eigen::Matrix2cd::Identity());
}

// Fock-space unitary on a two-mode pair with per-mode dimension d that maps
// a coherent input |alpha_vec> to |conj(U) alpha_vec>, matching the
// Heisenberg convention b_k^dag = sum_l U_{k,l} a_l^dag for the outputs.
// Built as exp(G) with G = sum_{kl} conj(log U)_{kl} a_k^dag a_l, a
// quadratic (photon-number conserving) generator exponentiated through the
// Hermitian eigendecomposition of -iG.
Matrix pair_unitary(const Eigen::Matrix2cd& u, int d) {
    const Eigen::Matrix2cd g2 = unitary_log(u).conjugate();
    const int dim = d * d;
    Matrix h = Matrix::Zero(dim, dim); // -i G, Hermitian
    const Complex mi(0.0, -1.0);
    auto id = [d](int n1, int n2) { return n1 * d + n2; };
    for (int n1 = 0; n1 < d; ++n1) {
        for (int n2 = 0; n2 < d; ++n2) {
            const int row = id(n1, n2);
            h(row, row) += mi * (g2(0, 0) * static_cast<double>(n1) +
                                 g2(1, 1) * static_cast<double>(n2));
            if (n1 + 1 < d && n2 > 0) {
                // a1^dag a2 : (n1, n2) -> (n1+1, n2-1)
                h(id(n1 + 1, n2 - 1), row) +=
                    mi * g2(0, 1) * std::sqrt(static_cast<double>((n1 + 1) * n2));
            }
            if (n2 + 1 < d && n1 > 0) {
                // a2^dag a1 : (n1, n2) -> (n1-1, n2+1)
                h(id(n1 - 1, n2 + 1), row) +=
                    mi * g2(1, 0) * std::sqrt(static_cast<double>((n2 + 1) * n1));
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(dim);
    for (int i = 0; i < dim; ++i)
        phases(i) = std::polar(1.0, es.eigenvalues()(i)); // exp(i lambda)
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

double oracle_no_click(const DensityMatrix& rho_signal, Complex probe,
                       const BeamSplitterSpec& bs, const OverlapValue& overlap,
                       double eta1, double eta2, int cutoff) {
    if (!(eta1 >= 0.0 && eta1 <= 1.0 && eta2 >= 0.0 && eta2 <= 1.0))
        throw std::invalid_argument("oracle_no_click: efficiencies must be in [0,1]");
    if (cutoff < 1) throw std::invalid_argument("oracle_no_click: cutoff must be >= 1");
    if (rho_signal.cutoff() > cutoff)
        throw truncation_error("oracle_no_click: signal photon numbers exceed the cutoff");
    bs.validate();

    const int d = cutoff + 1;
    const int dim = d * d;
    const int nsig = rho_signal.dimension();

    // Signal eigendecomposition; each eigenvector evolves as a pure state.
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_signal.elements());

    const Matrix u_pair = pair_unitary(bs.unitary(), d);
    // Unit-norm truncated probe: keeps the four-mode state a legal quantum
    // state, so blind detectors give exactly 1.
    Vector probe_vec = coherent_amplitudes(probe, cutoff);
    probe_vec /= probe_vec.norm();
    const Complex phi1 = overlap.phi1();
    const double phi2 = overlap.phi2_mag();

    // Binomial embedding |n>_c = sum_k sqrt(C(n,k)) phi1^k phi2^(n-k) |k, n-k>.
    Vector phi1_pow(nsig), phi2_pow(nsig);
    phi1_pow(0) = 1.0;
    phi2_pow(0) = 1.0;
    for (int k = 1; k < nsig; ++k) {
        phi1_pow(k) = phi1_pow(k - 1) * phi1;
        phi2_pow(k) = phi2_pow(k - 1) * phi2;
    }
    Matrix embed = Matrix::Zero(nsig, nsig); // (n, k) coefficient table
    for (int n = 0; n < nsig; ++n) {
        double cnk = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) cnk *= static_cast<double>(n - k + 1) / k;
            embed(n, k) = std::sqrt(cnk) * phi1_pow(k) * phi2_pow(n - k);
        }
    }

    // POVM weights per pair index (n_sig_component, n_probe_component):
    // pair s couples detector-1 mode (1,s) with detector-2 mode (2,s).
    Eigen::VectorXd w_pair(dim);
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            w_pair(n1 * d + n2) = no_click_weight(eta1, n1) * no_click_weight(eta2, n2);

    double total = 0.0;
    for (int j = 0; j < nsig; ++j) {
        const double w = es.eigenvalues()(j);
        if (w < 1e-15) continue;
        const Vector psi = es.eigenvectors().col(j);

        // Four-mode amplitude tensor as a (pair1, pair2) matrix:
        // rows index (n_{1,1}, n_{2,1}), columns index (n_{1,2}, n_{2,2}).
        Matrix state = Matrix::Zero(dim, dim);
        for (int n = 0; n < nsig; ++n) {
            if (std::abs(psi(n)) < 1e-300) continue;
            for (int k = 0; k <= n; ++k) {
                const Complex coef = psi(n) * embed(n, k);
                const int col = (n - k) * d; // vacuum on mode (2,2)
                for (int np = 0; np < d; ++np)
                    state(k * d + np, col) += coef * probe_vec(np);
            }
        }

        state = u_pair * state;              // beam splitter on pair 1
        state = state * u_pair.transpose();  // beam splitter on pair 2

        total += w * (w_pair.transpose() * state.cwiseAbs2() * w_pair).value();
    }
    return total;
}

double verify_ordering_identity(const std::vector<double>& h_eigenvalues, int cutoff) {
    const int S = static_cast<int>(h_eigenvalues.size());
    if (S < 1) throw std::invalid_argument("verify_ordering_identity: empty eigenvalue list");
    if (cutoff < 2) throw std::invalid_argument("verify_ordering_identity: cutoff must be >= 2");
    for (double h : h_eigenvalues)
        if (!(h > 0.0 && h <= 1.0))
            throw std::invalid_argument("verify_ordering_identity: eigenvalues must lie in (0,1]");

    const int d = cutoff + 1;
    std::vector<Matrix> lhs_modes, rhs_modes;
    lhs_modes.reserve(S);
    rhs_modes.reserve(S);

    // Truncated ladder operators.
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Matrix adag = a.adjoint();

    for (double h : h_eigenvalues) {
        // Normally ordered side: sum_j (-(1-h))^j / j! (a^dag)^j a^j.
        // The series terminates (a^j annihilates the truncated space), and
        // lowering first means no truncation-edge loss.
        const double lambda = 1.0 - h;
        Matrix lhs = Matrix::Identity(d, d);
        Matrix raise = Matrix::Identity(d, d);
        Matrix lower = Matrix::Identity(d, d);
        double coef = 1.0;
        for (int j = 1; j <= cutoff; ++j) {
            raise = raise * adag;
            lower = a * lower;
            coef *= -lambda / j;
            lhs += coef * (raise * lower);
        }
        lhs_modes.push_back(std::move(lhs));

        // Antinormally ordered side through its coherent-projector integral:
        // (1/h) int (d^2a/pi) e^{-(1/h)|a|^2} a^n conj(a)^m / sqrt(n! m!).
        const double rate = 1.0 / h;
        const int order = cutoff + 8;
        const auto& rule = gauss_hermite(order);
        const double scale = 1.0 / std::sqrt(rate);
        Matrix rhs = Matrix::Zero(d, d);
        Vector monomials(d);
        for (int i = 0; i < order; ++i) {
            for (int jq = 0; jq < order; ++jq) {
                const Complex alpha(rule.nodes[i] * scale, rule.nodes[jq] * scale);
                monomials(0) = 1.0;
                for (int n = 1; n < d; ++n)
                    monomials(n) = monomials(n - 1) * alpha / std::sqrt(static_cast<double>(n));
                rhs += (rule.weights[i] * rule.weights[jq]) *
                       (monomials * monomials.adjoint());
            }
        }
        rhs *= 1.0 / (h * rate * kPi);
        rhs_modes.push_back(std::move(rhs));
    }

    // Compare on the multimode subspace with total photon number <= cutoff-2
    // on both sides of the matrix element (truncation edge excluded).
    const int bound = cutoff - 2;
    double max_dev = 0.0;
    std::vector<int> bra(S, 0), ket(S, 0);
    auto total = [&](const std::vector<int>& idx) {
        int t = 0;
        for (int v : idx) t += v;
        return t;
    };
    auto advance = [&](std::vector<int>& idx) {
        int pos = 0;
        while (pos < S && ++idx[pos] > bound) idx[pos++] = 0;
        return pos < S;
    };
    do {
        if (total(bra) > bound) continue;
        std::fill(ket.begin(), ket.end(), 0);
        do {
            if (total(ket) > bound) continue;
            Complex l = 1.0, r = 1.0;
            for (int s = 0; s < S; ++s) {
                l *= lhs_modes[s](bra[s], ket[s]);
                r *= rhs_modes[s](bra[s], ket[s]);
            }
            max_dev = std::max(max_dev, std::abs(l - r));
        } while (advance(ket));
    } while (advance(bra));
    return max_dev;
}

} // namespace ovtom
