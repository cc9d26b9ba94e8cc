// types.hpp — Core domain types: truncated Fock-space density matrices,
// beam splitter and detector specifications, mode-overlap values

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ovtom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Density matrix in the truncated Fock basis {|0>, ..., |cutoff>}.
/// Hermitian exactly as stored (enforced on construction), trace one within
/// 1e-12, positive semi-definite within eigenvalue tolerance -1e-10.
class DensityMatrix {
public:
    // Builds from a raw matrix; requires approximate Hermiticity, then stores
    // the exactly symmetrized matrix and validates trace and positivity.
    static DensityMatrix from_matrix(const Matrix& elements);

    // Diagonal state with the given photon-number probabilities.
    static DensityMatrix diagonal(const Eigen::VectorXd& probabilities);

    static DensityMatrix fock(int n, int cutoff);
    static DensityMatrix vacuum(int cutoff);

    // Truncated |alpha><alpha|. Not renormalized: the trace deficit is the
    // Poisson tail mass, so the cutoff must be generous enough for the
    // trace-one invariant to hold.
    static DensityMatrix coherent(Complex alpha, int cutoff);

    int cutoff() const { return static_cast<int>(elements_.rows()) - 1; }
    int dimension() const { return static_cast<int>(elements_.rows()); }
    const Matrix& elements() const { return elements_; }
    Complex element(int n, int m) const { return elements_(n, m); }

    double trace() const { return elements_.trace().real(); }
    bool is_diagonal(double tol = 1e-14) const;

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;

private:
    explicit DensityMatrix(Matrix elements) : elements_(std::move(elements)) {}
    Matrix elements_;
};

/// 2x2 beam splitter U = [[t, r], [-conj(r), conj(t)]] with
/// t = sqrt(T) e^{i phase_t}, r = sqrt(1-T) e^{i phase_r}. Unitary with
/// |U11|^2 = |U22|^2 = T and |U12|^2 = 1 - T by construction. The default
/// zero phases make U11 and U12 real.
struct BeamSplitterSpec {
    double transmittivity = 0.5;
    double phase_t = 0.0;
    double phase_r = 0.0;

    Eigen::Matrix2cd unitary() const;
    // 1-based indices matching the standard port labels.
    Complex u(int k, int l) const { return unitary()(k - 1, l - 1); }

    void validate() const;
};

/// On/off detector with efficiency eta; its no-click POVM element on a
/// single mode is (1-eta)^n.
struct DetectorSpec {
    double efficiency = 1.0;
    void validate() const;
};

/// Signal/probe temporal-mode overlap. Only phi1 is free; the unmatched
/// component enters all probabilities through |phi2|^2 = 1 - |phi1|^2 alone,
/// so phi2 is stored as its non-negative magnitude.
class OverlapValue {
public:
    explicit OverlapValue(Complex phi1);
    Complex phi1() const { return phi1_; }
    double phi2_mag() const { return phi2_mag_; }

private:
    Complex phi1_;
    double phi2_mag_;
};

/// Mode count and probe amplitudes for the multimode coherent-probe forms.
struct MultimodeConfig {
    int mode_count = 1;
    Vector probe_amplitudes;
    void validate() const;
};

} // namespace ovtom
