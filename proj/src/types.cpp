#include "ovtom/types.hpp"

#include <cmath>
#include <stdexcept>

namespace ovtom {

DensityMatrix DensityMatrix::from_matrix(const Matrix& elements) {
    if (elements.rows() != elements.cols() || elements.rows() < 1)
        throw std::invalid_argument("DensityMatrix: elements must be square and non-empty");
    const double herm_dev = (elements - elements.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, elements.cwiseAbs().maxCoeff());
    if (herm_dev > 1e-10 * scale)
        throw std::invalid_argument("DensityMatrix: input is not Hermitian");
    Matrix sym = 0.5 * (elements + elements.adjoint().eval());
    DensityMatrix rho(std::move(sym));
    rho.validate();
    return rho;
}

DensityMatrix DensityMatrix::diagonal(const Eigen::VectorXd& probabilities) {
    if (probabilities.size() < 1)
        throw std::invalid_argument("DensityMatrix::diagonal: empty probability vector");
    Matrix m = Matrix::Zero(probabilities.size(), probabilities.size());
    for (Eigen::Index n = 0; n < probabilities.size(); ++n) m(n, n) = probabilities(n);
    DensityMatrix rho(std::move(m));
    rho.validate();
    return rho;
}

DensityMatrix DensityMatrix::fock(int n, int cutoff) {
    if (cutoff < 0 || n < 0 || n > cutoff)
        throw std::invalid_argument("DensityMatrix::fock: need 0 <= n <= cutoff");
    Matrix m = Matrix::Zero(cutoff + 1, cutoff + 1);
    m(n, n) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::vacuum(int cutoff) { return fock(0, cutoff); }

DensityMatrix DensityMatrix::coherent(Complex alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("DensityMatrix::coherent: cutoff must be >= 0");
    Vector amps(cutoff + 1);
    const double pref = std::exp(-0.5 * std::norm(alpha));
    Complex term = pref;
    amps(0) = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        amps(n) = term;
    }
    Matrix m = amps * amps.adjoint();
    DensityMatrix rho(std::move(m));
    rho.validate();
    return rho;
}

bool DensityMatrix::is_diagonal(double tol) const {
    for (Eigen::Index n = 0; n < elements_.rows(); ++n)
        for (Eigen::Index m = 0; m < elements_.cols(); ++m)
            if (n != m && std::abs(elements_(n, m)) > tol) return false;
    return true;
}

void DensityMatrix::validate() const {
    for (Eigen::Index n = 0; n < elements_.rows(); ++n)
        for (Eigen::Index m = n; m < elements_.cols(); ++m)
            if (elements_(n, m) != std::conj(elements_(m, n)))
                throw std::invalid_argument("DensityMatrix: not Hermitian as stored");
    if (std::abs(trace() - 1.0) > 1e-12)
        throw std::invalid_argument("DensityMatrix: trace deviates from 1 beyond 1e-12");
    Eigen::SelfAdjointEigenSolver<Matrix> es(elements_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond -1e-10");
}

Eigen::Matrix2cd BeamSplitterSpec::unitary() const {
    const double T = transmittivity;
    const Complex t = std::sqrt(T) * std::polar(1.0, phase_t);
    const Complex r = std::sqrt(1.0 - T) * std::polar(1.0, phase_r);
    Eigen::Matrix2cd u;
    u << t, r, -std::conj(r), std::conj(t);
    return u;
}

void BeamSplitterSpec::validate() const {
    if (!(transmittivity >= 0.0 && transmittivity <= 1.0))
        throw std::invalid_argument("BeamSplitterSpec: transmittivity must be in [0,1]");
    const Eigen::Matrix2cd u = unitary();
    const double dev = (u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (dev > 1e-14)
        throw std::invalid_argument("BeamSplitterSpec: unitarity violated beyond 1e-14");
}

void DetectorSpec::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("DetectorSpec: efficiency must be in [0,1]");
}

OverlapValue::OverlapValue(Complex phi1) : phi1_(phi1) {
    const double mag2 = std::norm(phi1);
    if (mag2 > 1.0 + 2e-12)
        throw std::invalid_argument("OverlapValue: |phi1| exceeds 1");
    phi2_mag_ = std::sqrt(std::max(0.0, 1.0 - mag2));
}

void MultimodeConfig::validate() const {
    if (mode_count < 1)
        throw std::invalid_argument("MultimodeConfig: mode_count must be >= 1");
    if (probe_amplitudes.size() != mode_count)
        throw std::invalid_argument("MultimodeConfig: probe amplitude count mismatch");
}

} // namespace ovtom
