#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ovtom/errors.hpp"
#include "ovtom/io.hpp"
#include "ovtom/weierstrass.hpp"

#include <cmath>

using namespace ovtom;

namespace {

double sup_deviation(const GaussianPolyForm& a, const GaussianPolyForm& b, double radius,
                     double step = 0.2) {
    double dev = 0.0;
    for (double x = -radius; x <= radius + 1e-12; x += step)
        for (double y = -radius; y <= radius + 1e-12; y += step) {
            if (x * x + y * y > radius * radius + 1e-12) continue;
            dev = std::max(dev, std::abs(a.value(Complex(x, y)) - b.value(Complex(x, y))));
        }
    return dev;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * i / (n - 1);
    return v;
}

} // namespace

TEST_CASE("forward transform of the vacuum Husimi is the closed-form Gaussian") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    CHECK(w.rate() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(w.coeffs()(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (double x : {0.0, 0.7, -1.3})
        CHECK(w.value(Complex(x, 0.2)).real() ==
              doctest::Approx((1.0 / 3.0) *
                              std::exp(-2.0 / 3.0 * std::norm(Complex(x, 0.2))))
                  .epsilon(1e-13));
}

TEST_CASE("forward transform preserves polynomial degree") {
    const GaussianPolyForm q1 = GaussianPolyForm::husimi(DensityMatrix::fock(1, 1));
    const GaussianPolyForm w = weierstrass_forward(q1, 2.0).trimmed(1e-15);
    CHECK(w.degree() == 1);
}

TEST_CASE("forward transform cross-checked by grid convolution") {
    const GaussianPolyForm q1 = GaussianPolyForm::husimi(DensityMatrix::fock(1, 1));
    const GaussianPolyForm w_closed = weierstrass_forward(q1, 2.0);

    const Eigen::VectorXd axis = linspace(-5.0, 5.0, 201);
    const PhaseSpaceGrid sampled = PhaseSpaceGrid::sample(
        axis, axis, [&q1](Complex a) { return q1.value(a); });
    const PhaseSpaceGrid w_grid = weierstrass_forward(sampled, 2.0);
    CHECK(w_grid.sigma_tag.value() == 2.0);

    double dev = 0.0;
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
        for (Eigen::Index j = 0; j < axis.size(); ++j) {
            const Complex a(axis(i), axis(j));
            if (std::abs(a) > 1.5) continue;
            dev = std::max(dev, std::abs(w_grid.values(i, j) - w_closed.value(a)));
        }
    }
    CHECK(dev < 1e-6);
}

TEST_CASE("grid transform rejects under-resolved kernels") {
    const Eigen::VectorXd axis = linspace(-3.0, 3.0, 7); // spacing 1
    const PhaseSpaceGrid g = PhaseSpaceGrid::sample(
        axis, axis, [](Complex a) { return Complex(std::exp(-std::norm(a))); });
    CHECK_THROWS_AS(weierstrass_forward(g, 2.0), std::invalid_argument);
}

TEST_CASE("series inverse at order zero is the bare prefactor") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(1, 2));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const auto res = weierstrass_inverse_series(w, 2.0, 0);
    for (double x : {0.2, 0.9})
        CHECK(std::abs(res.form.value(Complex(x, -0.4)) -
                       (2.0 / M_PI) * w.value(Complex(x, -0.4))) < 1e-14);
}

TEST_CASE("series inverse round trip: vacuum") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const auto res = weierstrass_inverse_series(w, 2.0, 12);
    CHECK(sup_deviation(res.form, q, 2.0) < 1e-4);
    CHECK(res.last_term_norm >= 0.0);
}

TEST_CASE("series inverse round trip: single photon") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(1, 1));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const auto res = weierstrass_inverse_series(w, 2.0, 12);
    CHECK(sup_deviation(res.form, q, 2.0) < 1e-4);
}

TEST_CASE("series inverse of zero is zero") {
    const GaussianPolyForm zero(Matrix::Zero(2, 2), 0.5);
    const auto res = weierstrass_inverse_series(zero, 2.0, 6);
    CHECK(res.form.coeffs().cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.last_term_norm == 0.0);
}

TEST_CASE("series truncation error decays beyond some order") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(1, 1));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int order : {8, 12, 16, 20}) {
        const auto res = weierstrass_inverse_series(w, 2.0, order);
        const double err = sup_deviation(res.form, q, 2.0, 0.4);
        CHECK(err < prev + 1e-12);
        prev = err;
    }
}

TEST_CASE("integral inverse matches the series inverse") {
    for (int fock_n : {0, 1}) {
        const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(fock_n, fock_n));
        const GaussianPolyForm w = weierstrass_forward(q, 2.0);
        const GaussianPolyForm series = weierstrass_inverse_series(w, 2.0, 24).form;
        double dev = 0.0;
        for (double x = -2.0; x <= 2.0; x += 0.5)
            for (double y = -2.0; y <= 2.0; y += 0.5) {
                if (x * x + y * y > 4.0) continue;
                const Complex a(x, y);
                const double integral = weierstrass_inverse_integral_at(w, 2.0, a);
                dev = std::max(dev, std::abs(integral - series.value(a).real()));
            }
        CHECK(dev < 1e-6);
    }
}

TEST_CASE("integral inverse round trip errors stay within the family tolerance") {
    for (int fock_n : {0, 1}) {
        const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(fock_n, fock_n));
        const GaussianPolyForm w = weierstrass_forward(q, 2.0);
        double dev = 0.0;
        for (double x = -2.0; x <= 2.0; x += 0.5)
            for (double y = -2.0; y <= 2.0; y += 0.5) {
                if (x * x + y * y > 4.0) continue;
                const Complex a(x, y);
                dev = std::max(dev, std::abs(weierstrass_inverse_integral_at(w, 2.0, a) -
                                             q.value(a).real()));
            }
        CHECK(dev < 1e-4);
    }
}

TEST_CASE("integral inverse rejects insufficient damping") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    CHECK_THROWS_AS(weierstrass_inverse_integral_at(q, 0.5, Complex(0.0)), quadrature_error);
}

TEST_CASE("integral inverse grid writer") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const Eigen::VectorXd axis = linspace(-1.0, 1.0, 5);
    const PhaseSpaceGrid g = weierstrass_inverse_integral(w, 2.0, axis, axis);
    for (Eigen::Index i = 0; i < axis.size(); ++i)
        for (Eigen::Index j = 0; j < axis.size(); ++j)
            CHECK(std::abs(g.values(i, j).real() -
                           q.value(Complex(axis(i), axis(j))).real()) < 1e-6);
}

TEST_CASE("linearity of forward and inverse") {
    const GaussianPolyForm qa = GaussianPolyForm::husimi(DensityMatrix::vacuum(1));
    const GaussianPolyForm qb = GaussianPolyForm::husimi(DensityMatrix::fock(1, 1));
    const GaussianPolyForm mix = qa * Complex(0.3) + qb * Complex(0.7);
    const GaussianPolyForm w_mix = weierstrass_forward(mix, 2.0);
    const GaussianPolyForm w_parts =
        weierstrass_forward(qa, 2.0) * Complex(0.3) + weierstrass_forward(qb, 2.0) * Complex(0.7);
    CHECK(sup_deviation(w_mix, w_parts, 2.0) < 1e-14);
}

TEST_CASE("normalization: integral of W is (pi/sigma) integral of f") {
    for (int fock_n : {0, 1, 2}) {
        const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::fock(fock_n, fock_n));
        const GaussianPolyForm w = weierstrass_forward(q, 2.0);
        CHECK(std::abs(w.integral() - (M_PI / 2.0) * q.integral()) < 1e-8);
        CHECK(q.integral().real() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("operator-identity normalization: constant W maps to (sigma/pi) W") {
    const double sigma = 2.0;
    const double c = 0.37;
    const Complex val = gaussian_plane_integral(
        [c](Complex) { return Complex(c); }, Complex(0.0), sigma, 32);
    const double q = (sigma / M_PI) * (sigma / M_PI) * val.real();
    CHECK(q == doctest::Approx((sigma / M_PI) * c).epsilon(1e-10));
}

TEST_CASE("shifted-center forms round trip through both inverses") {
    // Coherent-state Husimi written directly in the centered family.
    const Complex center(0.6, -0.3);
    const GaussianPolyForm q(Matrix::Constant(1, 1, 1.0 / M_PI), 1.0, center);
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    CHECK(w.center() == center);

    const GaussianPolyForm series = weierstrass_inverse_series(w, 2.0, 14).form;
    double dev_series = 0.0, dev_integral = 0.0;
    for (double x = -1.0; x <= 1.5; x += 0.5) {
        for (double y = -1.0; y <= 1.0; y += 0.5) {
            const Complex a(x, y);
            dev_series = std::max(dev_series, std::abs(series.value(a) - q.value(a)));
            dev_integral = std::max(
                dev_integral,
                std::abs(weierstrass_inverse_integral_at(w, 2.0, a) - q.value(a).real()));
        }
    }
    CHECK(dev_series < 1e-4);
    CHECK(dev_integral < 1e-6);
}

TEST_CASE("grid CSV export") {
    const Eigen::VectorXd axis = linspace(-1.0, 1.0, 3);
    const PhaseSpaceGrid g = PhaseSpaceGrid::sample(
        axis, axis, [](Complex a) { return Complex(std::exp(-std::norm(a))); });
    const std::string csv = ovtom::grid_to_csv(g);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10); // header + 9 points
    CHECK(csv.rfind("re,im,value_re,value_im\n", 0) == 0);
    CHECK(csv.find("-1,-1,") != std::string::npos);
}

TEST_CASE("fourier pair checks") {
    CHECK(fourier_pair_check(GaussianPolyForm::husimi(DensityMatrix::vacuum(0))) < 1e-8);
    CHECK(fourier_pair_check(GaussianPolyForm(Matrix::Zero(1, 1), 1.0)) == 0.0);
    CHECK(fourier_pair_check(GaussianPolyForm::husimi(DensityMatrix::fock(1, 1)), 96) < 1e-6);
}

TEST_CASE("fourier transform of the vacuum Husimi is self-similar") {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm f = fourier_transform(q);
    CHECK(f.rate() == doctest::Approx(1.0));
    CHECK(f.coeffs()(0, 0).real() == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
}
