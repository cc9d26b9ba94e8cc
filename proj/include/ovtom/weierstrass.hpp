// weierstrass.hpp — Gaussian-convolution (Weierstrass) transform of
// phase-space functions, its differential-series inverse, and the
// analytic-continuation integral inverse, exact on the closed
// polynomial-times-Gaussian family.

#pragma once

#include "ovtom/quadrature.hpp"
#include "ovtom/types.hpp"

#include <optional>

namespace ovtom {

/// Uniformly sampled function over a rectangle of the complex plane.
/// values(i, j) = f(re_axis[i] + i im_axis[j]).
struct PhaseSpaceGrid {
    Eigen::VectorXd re_axis;
    Eigen::VectorXd im_axis;
    Matrix values;
    std::optional<double> sigma_tag; // sigma of the transform that produced it

    void validate() const;
    double re_spacing() const { return re_axis(1) - re_axis(0); }
    double im_spacing() const { return im_axis(1) - im_axis(0); }
    static PhaseSpaceGrid sample(const Eigen::VectorXd& re_axis,
                                 const Eigen::VectorXd& im_axis,
                                 const std::function<Complex(Complex)>& f);
};

/// f(a) = e^{-rate |a-center|^2} sum_{n,m} coeffs(n,m) conj(a-center)^n (a-center)^m.
/// Closed under the Weierstrass transform, both of its inverses, and the
/// symmetric Fourier transform; every Husimi function of a finite-cutoff
/// state lies in this family.
class GaussianPolyForm {
public:
    GaussianPolyForm(Matrix poly_coeffs, double gaussian_rate, Complex center = 0.0);

    /// Husimi function of rho: rate 1, coefficients rho_{n,m}/(pi sqrt(n! m!)).
    static GaussianPolyForm husimi(const DensityMatrix& rho);

    const Matrix& coeffs() const { return coeffs_; }
    double rate() const { return rate_; }
    Complex center() const { return center_; }
    int degree() const { return static_cast<int>(coeffs_.rows()) - 1; }

    Complex value(Complex alpha) const;
    /// Analytic continuation used by the integral inverse: the function of
    /// (Re alpha, Im alpha) evaluated at complex-shifted real/imag parts.
    Complex value_continued(Complex re_arg, Complex im_arg) const;

    /// Exact plane integral: sum_n coeffs(n,n) pi n! / rate^{n+1}.
    Complex integral() const;

    /// Drops trailing rows/columns with negligible coefficients.
    GaussianPolyForm trimmed(double tol = 0.0) const;

    GaussianPolyForm operator*(Complex scale) const;
    GaussianPolyForm operator+(const GaussianPolyForm& other) const; // same rate/center

private:
    Matrix coeffs_; // (n, m): conj power n, plain power m
    double rate_;
    Complex center_;
};

/// W(a) = int d^2b e^{-sigma|a-b|^2} f(b), by exact Gaussian-moment algebra.
GaussianPolyForm weierstrass_forward(const GaussianPolyForm& f, double sigma);

/// Grid route: discrete convolution with the analytically normalized kernel.
/// Rejects grids with sigma * spacing^2 > 0.5 (kernel under-resolved).
PhaseSpaceGrid weierstrass_forward(const PhaseSpaceGrid& f, double sigma);

struct InverseSeriesResult {
    GaussianPolyForm form;
    double last_term_norm = 0.0; // max-abs coefficient of the last retained term
};

/// Differential-series inverse (sigma/pi)^S exp(-(1/sigma) d^2/da da*) W,
/// truncated after the j = order term; derivatives are exact on the family.
InverseSeriesResult weierstrass_inverse_series(const GaussianPolyForm& w, double sigma,
                                               int order);

/// Integral-form inverse evaluated pointwise:
///   Q(a) = (sigma/pi)^2 int dx dy e^{-sigma(x^2+y^2)}
///          W_R(Re a + i x, Im a + i y).
/// Throws quadrature_error when the continued integrand outgrows the Gaussian
/// damping (requires sigma > rate of W).
double weierstrass_inverse_integral_at(const GaussianPolyForm& w, double sigma,
                                       Complex alpha, const QuadratureOptions& opts = {});

PhaseSpaceGrid weierstrass_inverse_integral(const GaussianPolyForm& w, double sigma,
                                            const Eigen::VectorXd& re_axis,
                                            const Eigen::VectorXd& im_axis,
                                            const QuadratureOptions& opts = {});

/// Symmetric complex Fourier transform F(z) = int (d^2a/pi) e^{a z* - z a*} f(a),
/// exact on the centered family.
GaussianPolyForm fourier_transform(const GaussianPolyForm& f);

/// Verifies the F -> Q round trip: |f - int (dmu(z)/pi) e^{z a* - a z*} F(z)|
/// with the inverse evaluated by quadrature on a grid covering |a| <= 2.
/// Returns the maximum deviation.
double fourier_pair_check(const GaussianPolyForm& f, int order = 96);

} // namespace ovtom
