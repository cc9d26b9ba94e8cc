#include "validate.hpp"

#include "ovtom/fock_core.hpp"
#include "ovtom/forward_model.hpp"
#include "ovtom/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ovtom::cli {

namespace {

using namespace ovtom;

double closed_form_no_click(const DensityMatrix& rho, double eta, const BeamSplitterSpec& bs,
                            const OverlapValue& overlap, Complex beta, bool flip_kernel_sign) {
    ForwardParams params = forward_params(eta, bs, 1, overlap, beta);
    if (flip_kernel_sign) params.z = -params.z;
    return no_click_fock(rho, params, eta, std::norm(bs.u(1, 1)));
}

double oracle_spot_checks(bool flip_kernel_sign, bool fast) {
    const BeamSplitterSpec bs{0.456, 0.0, 0.0};
    const int cutoff = fast ? 10 : 12;
    double max_dev = 0.0;

    struct Case {
        DensityMatrix rho;
        Complex beta;
        Complex phi1;
        double eta;
    };
    Eigen::VectorXd diag(3);
    diag << 0.335, 0.465, 0.2;
    std::vector<Case> cases;
    cases.push_back({DensityMatrix::vacuum(0), Complex(1.0), Complex(0.7, 0.1), 0.59});
    cases.push_back({DensityMatrix::coherent(Complex(0.6, 0.2), cutoff), Complex(0.9, -0.3),
                     Complex(0.8, 0.0), 0.59});
    if (!fast) {
        cases.push_back({DensityMatrix::diagonal(diag), Complex(1.0), Complex(0.6, 0.0), 0.9});
        cases.push_back({DensityMatrix::fock(1, 1), Complex(0.5, 0.5), Complex(0.3, -0.4), 0.2});
    }
    for (const auto& c : cases) {
        const OverlapValue overlap(c.phi1);
        const double closed =
            closed_form_no_click(c.rho, c.eta, bs, overlap, c.beta, flip_kernel_sign);
        const double brute = oracle_no_click(c.rho, c.beta, bs, overlap, c.eta, 0.0, cutoff);
        max_dev = std::max(max_dev, std::abs(closed - brute));
    }
    return max_dev;
}

double projector_spot_check() {
    const Complex a0(0.7, 0.25);
    const DensityMatrix rho = DensityMatrix::coherent(a0, 14);
    ProjectorMixture mix;
    mix.amplitudes = Vector::Constant(1, a0);
    mix.coefficients = Eigen::VectorXd::Ones(1);
    ProjectorSetting setting;
    setting.eta = 0.59;
    setting.bs = BeamSplitterSpec{0.456, 0.0, 0.0};
    setting.overlap = OverlapValue(Complex(0.6, 0.3));
    setting.beta = Complex(0.8, -0.1);
    const double via_projector = no_click_projector(mix, setting);
    const double via_fock = no_click_probability(rho, setting.eta, setting.bs, 1,
                                                 setting.overlap, setting.beta);
    return std::abs(via_projector - via_fock);
}

double weierstrass_series_round_trip() {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const GaussianPolyForm back = weierstrass_inverse_series(w, 2.0, 12).form;
    double max_dev = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.4)
        for (double y = -2.0; y <= 2.0; y += 0.4) {
            if (x * x + y * y > 4.0) continue;
            const Complex a(x, y);
            max_dev = std::max(max_dev, std::abs(back.value(a) - q.value(a)));
        }
    return max_dev;
}

double weierstrass_series_vs_integral() {
    const GaussianPolyForm q = GaussianPolyForm::husimi(DensityMatrix::vacuum(0));
    const GaussianPolyForm w = weierstrass_forward(q, 2.0);
    const GaussianPolyForm series = weierstrass_inverse_series(w, 2.0, 24).form;
    double max_dev = 0.0;
    for (double x = -2.0; x <= 2.0; x += 1.0)
        for (double y = -2.0; y <= 2.0; y += 1.0) {
            if (x * x + y * y > 4.0) continue;
            const Complex a(x, y);
            const double integral = weierstrass_inverse_integral_at(w, 2.0, a);
            max_dev = std::max(max_dev, std::abs(series.value(a).real() - integral));
        }
    return max_dev;
}

} // namespace

std::vector<CheckResult> run_validation_suite(const ValidateOptions& options) {
    std::vector<CheckResult> results;
    auto add = [&results](const std::string& name, double dev, double tol) {
        results.push_back({name, dev, tol, dev < tol});
    };

    add("ordering identity, single mode h=0.5 (cutoff 8)",
        verify_ordering_identity({0.5}, 8), 1e-10);
    if (!options.fast)
        add("ordering identity, two modes h=(0.3,0.9) (cutoff 8)",
            verify_ordering_identity({0.3, 0.9}, 8), 1e-10);

    {
        Eigen::Matrix2cd b = Eigen::Matrix2cd::Zero();
        b(0, 0) = 2.0;
        b(1, 1) = 3.0;
        Vector g(2);
        g << Complex(0.5, 0.0), Complex(0.0, 0.1);
        add("gaussian integral identity, diagonal B",
            gaussian_integral_identity_check(b, g, g, 64), 1e-6);
    }
    if (!options.fast) {
        Eigen::Matrix2cd b;
        b << Complex(2.0, 0.0), Complex(0.4, 0.3), Complex(0.4, -0.3), Complex(1.5, 0.0);
        Vector g(2), h(2);
        g << Complex(0.5, 0.0), Complex(0.0, 0.1);
        h << Complex(0.2, -0.1), Complex(0.3, 0.2);
        add("gaussian integral identity, general B",
            gaussian_integral_identity_check(b, g, h, 64), 1e-6);
    }

    add("oracle vs closed form", oracle_spot_checks(options.inject_kernel_sign_flip,
                                                    options.fast),
        1e-6);
    add("projector form vs closed form", projector_spot_check(), 1e-8);
    add("weierstrass series round trip (vacuum, sigma 2, order 12)",
        weierstrass_series_round_trip(), 1e-4);
    if (!options.fast)
        add("weierstrass series vs integral inverse", weierstrass_series_vs_integral(), 1e-6);
    add("fourier round trip (vacuum)",
        fourier_pair_check(GaussianPolyForm::husimi(DensityMatrix::vacuum(0))), 1e-8);

    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

std::string render_validation_table(const std::vector<CheckResult>& results) {
    std::string out;
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof(line), "[%s] %-55s max deviation %.3e (tolerance %.0e)\n",
                      r.passed ? "PASS" : "FAIL", r.name.c_str(), r.deviation, r.tolerance);
        out += line;
    }
    return out;
}

} // namespace ovtom::cli
