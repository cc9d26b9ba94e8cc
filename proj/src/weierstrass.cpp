#include "ovtom/weierstrass.hpp"
#include "ovtom/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ovtom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void PhaseSpaceGrid::validate() const {
    if (re_axis.size() < 2 || im_axis.size() < 2)
        throw std::invalid_argument("PhaseSpaceGrid: axes need at least two samples");
    auto check_axis = [](const Eigen::VectorXd& ax, const char* name) {
        const double d = ax(1) - ax(0);
        if (d <= 0.0) throw std::invalid_argument(std::string("PhaseSpaceGrid: ") + name +
                                                  " axis not increasing");
        for (Eigen::Index i = 1; i < ax.size(); ++i)
            if (std::abs((ax(i) - ax(i - 1)) - d) > 1e-9 * std::abs(d))
                throw std::invalid_argument(std::string("PhaseSpaceGrid: ") + name +
                                            " axis not uniform");
    };
    check_axis(re_axis, "re");
    check_axis(im_axis, "im");
    if (values.rows() != re_axis.size() || values.cols() != im_axis.size())
        throw std::invalid_argument("PhaseSpaceGrid: value shape does not match axes");
}

PhaseSpaceGrid PhaseSpaceGrid::sample(const Eigen::VectorXd& re_axis,
                                      const Eigen::VectorXd& im_axis,
                                      const std::function<Complex(Complex)>& f) {
    PhaseSpaceGrid g;
    g.re_axis = re_axis;
    g.im_axis = im_axis;
    g.values.resize(re_axis.size(), im_axis.size());
    for (Eigen::Index i = 0; i < re_axis.size(); ++i)
        for (Eigen::Index j = 0; j < im_axis.size(); ++j)
            g.values(i, j) = f(Complex(re_axis(i), im_axis(j)));
    g.validate();
    return g;
}

GaussianPolyForm::GaussianPolyForm(Matrix poly_coeffs, double gaussian_rate, Complex center)
    : coeffs_(std::move(poly_coeffs)), rate_(gaussian_rate), center_(center) {
    if (coeffs_.rows() != coeffs_.cols() || coeffs_.rows() < 1)
        throw std::invalid_argument("GaussianPolyForm: coefficient matrix must be square");
    if (!(rate_ > 0.0))
        throw std::invalid_argument("GaussianPolyForm: gaussian_rate must be > 0");
}

GaussianPolyForm GaussianPolyForm::husimi(const DensityMatrix& rho) {
    const int d = rho.dimension();
    Matrix c(d, d);
    Eigen::VectorXd inv_sqrt_fact(d);
    inv_sqrt_fact(0) = 1.0;
    for (int n = 1; n < d; ++n)
        inv_sqrt_fact(n) = inv_sqrt_fact(n - 1) / std::sqrt(static_cast<double>(n));
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            c(n, m) = rho.element(n, m) * inv_sqrt_fact(n) * inv_sqrt_fact(m) / kPi;
    return GaussianPolyForm(std::move(c), 1.0);
}

Complex GaussianPolyForm::value(Complex alpha) const {
    const Complex a = alpha - center_;
    const Complex ac = std::conj(a);
    Complex poly = 0.0;
    // Horner over the conj index, inner Horner over the plain index.
    for (Eigen::Index n = coeffs_.rows() - 1; n >= 0; --n) {
        Complex row = 0.0;
        for (Eigen::Index m = coeffs_.cols() - 1; m >= 0; --m) row = row * a + coeffs_(n, m);
        poly = poly * ac + row;
    }
    return poly * std::exp(-rate_ * std::norm(a));
}

Complex GaussianPolyForm::value_continued(Complex re_arg, Complex im_arg) const {
    const Complex i(0.0, 1.0);
    const Complex a = re_arg + i * im_arg - center_;      // continued alpha
    const Complex ac = re_arg - i * im_arg - std::conj(center_); // continued conj(alpha)
    Complex poly = 0.0;
    for (Eigen::Index n = coeffs_.rows() - 1; n >= 0; --n) {
        Complex row = 0.0;
        for (Eigen::Index m = coeffs_.cols() - 1; m >= 0; --m) row = row * a + coeffs_(n, m);
        poly = poly * ac + row;
    }
    return poly * std::exp(-rate_ * a * ac);
}

Complex GaussianPolyForm::integral() const {
    Complex sum = 0.0;
    double fact = 1.0; // n!
    double rate_pow = rate_;
    for (Eigen::Index n = 0; n < coeffs_.rows(); ++n) {
        if (n > 0) {
            fact *= static_cast<double>(n);
            rate_pow *= rate_;
        }
        sum += coeffs_(n, n) * kPi * fact / rate_pow;
    }
    return sum;
}

GaussianPolyForm GaussianPolyForm::trimmed(double tol) const {
    Eigen::Index deg = 0;
    for (Eigen::Index n = 0; n < coeffs_.rows(); ++n)
        for (Eigen::Index m = 0; m < coeffs_.cols(); ++m)
            if (std::abs(coeffs_(n, m)) > tol) deg = std::max({deg, n, m});
    return GaussianPolyForm(coeffs_.topLeftCorner(deg + 1, deg + 1), rate_, center_);
}

GaussianPolyForm GaussianPolyForm::operator*(Complex scale) const {
    return GaussianPolyForm(coeffs_ * scale, rate_, center_);
}

GaussianPolyForm GaussianPolyForm::operator+(const GaussianPolyForm& other) const {
    if (std::abs(rate_ - other.rate_) > 1e-12 * std::max(rate_, other.rate_) ||
        std::abs(center_ - other.center_) > 1e-12)
        throw std::invalid_argument("GaussianPolyForm: sum requires matching rate and center");
    const Eigen::Index d = std::max(coeffs_.rows(), other.coeffs_.rows());
    Matrix c = Matrix::Zero(d, d);
    c.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
    c.topLeftCorner(other.coeffs_.rows(), other.coeffs_.cols()) += other.coeffs_;
    return GaussianPolyForm(std::move(c), rate_, center_);
}

namespace {

// Shared Gaussian-moment reduction. For kernels of the shape
//   e^{-B|b|^2 + P b* + Q b},  P = sP * out,  Q = sQ * conj(out),
// the integral against conj(b)^n b^m maps the coefficient table by
//   out(n-k, m-k) += pref (1/B) c(n,m) C(n,k) m!/(m-k)! B^{-(m+n-k)}
//                    sP^{m-k} sQ^{n-k}
// and contributes the Gaussian factor e^{(sP sQ / B)|out|^2}.
Complex int_pow(Complex base, Eigen::Index e) {
    Complex acc = 1.0;
    for (Eigen::Index i = 0; i < e; ++i) acc *= base;
    return acc;
}

Matrix moment_transform_coeffs(const Matrix& c, double B, Complex sP, Complex sQ,
                               double prefactor) {
    const Eigen::Index d = c.rows();
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            if (c(n, m) == Complex(0.0)) continue;
            double binom = 1.0;     // C(n, k)
            double falling = 1.0;   // m! / (m-k)!
            for (Eigen::Index k = 0; k <= std::min(n, m); ++k) {
                if (k > 0) {
                    binom *= static_cast<double>(n - k + 1) / static_cast<double>(k);
                    falling *= static_cast<double>(m - k + 1);
                }
                const double bpow = std::pow(B, -static_cast<double>(m + n - k));
                out(n - k, m - k) += prefactor / B * c(n, m) * binom * falling * bpow *
                                     int_pow(sP, m - k) * int_pow(sQ, n - k);
            }
        }
    }
    return out;
}

} // namespace

GaussianPolyForm weierstrass_forward(const GaussianPolyForm& f, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("weierstrass_forward: sigma must be > 0");
    const double B = sigma + f.rate();
    Matrix out = moment_transform_coeffs(f.coeffs(), B, sigma, sigma, kPi);
    const double out_rate = sigma - sigma * sigma / B; // = sigma f.rate() / B
    return GaussianPolyForm(std::move(out), out_rate, f.center());
}

PhaseSpaceGrid weierstrass_forward(const PhaseSpaceGrid& f, double sigma) {
    f.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("weierstrass_forward: sigma must be > 0");
    const double spacing = std::max(f.re_spacing(), f.im_spacing());
    if (sigma * spacing * spacing > 0.5)
        throw std::invalid_argument("weierstrass_forward: grid too coarse for this sigma");

    // Separable 1-D kernels, each normalized to the exact continuous mass
    // sqrt(pi/sigma) over the sampling lattice.
    auto kernel_1d = [sigma](const Eigen::VectorXd& axis) {
        const double d = axis(1) - axis(0);
        const Eigen::Index n = axis.size();
        const auto reach = static_cast<Eigen::Index>(std::ceil(std::sqrt(42.0 / sigma) / d));
        double mass = 0.0;
        for (Eigen::Index k = -reach; k <= reach; ++k)
            mass += std::exp(-sigma * (k * d) * (k * d)) * d;
        const double scale = std::sqrt(kPi / sigma) / mass;
        Eigen::MatrixXd km(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double delta = (axis(i) - axis(j));
                km(i, j) = scale * std::exp(-sigma * delta * delta) * d;
            }
        return km;
    };

    PhaseSpaceGrid out;
    out.re_axis = f.re_axis;
    out.im_axis = f.im_axis;
    out.values = kernel_1d(f.re_axis) * f.values * kernel_1d(f.im_axis).transpose();
    out.sigma_tag = sigma;
    return out;
}

InverseSeriesResult weierstrass_inverse_series(const GaussianPolyForm& w, double sigma,
                                               int order) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("weierstrass_inverse_series: sigma must be > 0");
    if (order < 0)
        throw std::invalid_argument("weierstrass_inverse_series: order must be >= 0");

    // The Laplacian-like operator L = d^2/da da* acts on coefficient tables
    // of poly x e^{-b|a|^2} as
    //   p'(n,m) = (n+1)(m+1) p(n+1,m+1) - b(n+m+1) p(n,m) + b^2 p(n-1,m-1),
    // growing the degree by one per application.
    const double b = w.rate();
    const Eigen::Index d0 = w.coeffs().rows();
    const Eigen::Index d = d0 + order + 1;
    Matrix term = Matrix::Zero(d, d);
    term.topLeftCorner(d0, d0) = w.coeffs();

    Matrix acc = term; // j = 0 contribution
    double coef = 1.0;
    double last_norm = term.cwiseAbs().maxCoeff();
    for (int j = 1; j <= order; ++j) {
        Matrix next = Matrix::Zero(d, d);
        for (Eigen::Index n = 0; n < d; ++n) {
            for (Eigen::Index m = 0; m < d; ++m) {
                Complex v = -b * static_cast<double>(n + m + 1) * term(n, m);
                if (n + 1 < d && m + 1 < d)
                    v += static_cast<double>((n + 1) * (m + 1)) * term(n + 1, m + 1);
                if (n > 0 && m > 0) v += b * b * term(n - 1, m - 1);
                next(n, m) = v;
            }
        }
        term = std::move(next);
        coef *= -1.0 / (sigma * j);
        acc += coef * term;
        last_norm = std::abs(coef) * term.cwiseAbs().maxCoeff();
    }

    acc *= sigma / kPi;
    InverseSeriesResult res{GaussianPolyForm(std::move(acc), b, w.center()).trimmed(0.0),
                            last_norm * sigma / kPi};
    return res;
}

double weierstrass_inverse_integral_at(const GaussianPolyForm& w, double sigma,
                                       Complex alpha, const QuadratureOptions& opts) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("weierstrass_inverse_integral_at: sigma must be > 0");
    if (w.rate() >= sigma)
        throw quadrature_error(
            "weierstrass_inverse_integral_at: continued integrand outgrows the Gaussian "
            "damping (rate >= sigma)",
            std::numeric_limits<double>::infinity());

    // e^{-sigma(x^2+y^2)} W_R(Re a + ix, Im a + iy): pull the exact Gaussian
    // of effective rate sigma - rate(W) into the quadrature weight; the
    // leftover is an oscillatory polynomial factor.
    const double eff_rate = sigma - w.rate();
    const Complex i(0.0, 1.0);
    auto integrand = [&](Complex u) {
        const Complex xr = Complex(alpha.real(), 0.0) + i * u.real();
        const Complex yi = Complex(alpha.imag(), 0.0) + i * u.imag();
        return w.value_continued(xr, yi) * std::exp(-w.rate() * std::norm(u));
    };
    const Complex val =
        gaussian_plane_integral_adaptive(integrand, Complex(0.0), eff_rate, opts);
    return (sigma / kPi) * (sigma / kPi) * val.real();
}

PhaseSpaceGrid weierstrass_inverse_integral(const GaussianPolyForm& w, double sigma,
                                            const Eigen::VectorXd& re_axis,
                                            const Eigen::VectorXd& im_axis,
                                            const QuadratureOptions& opts) {
    PhaseSpaceGrid out;
    out.re_axis = re_axis;
    out.im_axis = im_axis;
    out.values.resize(re_axis.size(), im_axis.size());
    for (Eigen::Index a = 0; a < re_axis.size(); ++a)
        for (Eigen::Index bb = 0; bb < im_axis.size(); ++bb)
            out.values(a, bb) = weierstrass_inverse_integral_at(
                w, sigma, Complex(re_axis(a), im_axis(bb)), opts);
    out.validate();
    return out;
}

GaussianPolyForm fourier_transform(const GaussianPolyForm& f) {
    if (std::abs(f.center()) != 0.0)
        throw std::invalid_argument("fourier_transform: supported for centered forms only");
    const double b = f.rate();
    Matrix out = moment_transform_coeffs(f.coeffs(), b, Complex(-1.0), Complex(1.0), 1.0);
    return GaussianPolyForm(std::move(out), 1.0 / b);
}

double fourier_pair_check(const GaussianPolyForm& f, int order) {
    const GaussianPolyForm fz = fourier_transform(f);
    // Numerical inverse transform back to Q on a grid covering |a| <= 2.
    double max_dev = 0.0;
    for (double x = -2.0; x <= 2.0 + 1e-9; x += 0.5) {
        for (double y = -2.0; y <= 2.0 + 1e-9; y += 0.5) {
            if (x * x + y * y > 4.0 + 1e-9) continue;
            const Complex alpha(x, y);
            const Complex back =
                gaussian_plane_integral(
                    [&](Complex z) {
                        const Complex phase =
                            z * std::conj(alpha) - alpha * std::conj(z);
                        return fz.value(z) * std::exp(phase) *
                               std::exp(fz.rate() * std::norm(z));
                    },
                    Complex(0.0), fz.rate(), order) /
                kPi;
            max_dev = std::max(max_dev, std::abs(back - f.value(alpha)));
        }
    }
    return max_dev;
}

} // namespace ovtom
