#include "ovtom/reconstruction.hpp"
#include "ovtom/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ovtom {

void ClickDataset::validate() const {
    for (const auto& r : records) {
        if (r.setting_id < 0 || r.setting_id >= static_cast<int>(settings.size()))
            throw std::invalid_argument("ClickDataset: record references unknown setting");
        if (r.trials < 0) throw std::invalid_argument("ClickDataset: negative trials");
        if (r.trials > 0) {
            if (r.zero_clicks < 0.0 || r.zero_clicks > static_cast<double>(r.trials))
                throw std::invalid_argument("ClickDataset: zero_clicks outside [0, trials]");
            if (r.zero_clicks != std::floor(r.zero_clicks))
                throw std::invalid_argument("ClickDataset: zero_clicks must be integral");
        } else {
            if (r.zero_clicks < 0.0 || r.zero_clicks > 1.0)
                throw std::invalid_argument(
                    "ClickDataset: exact record probability outside [0,1]");
        }
    }
}

DesignMatrix build_design_matrix(const std::vector<MeasurementSetting>& settings,
                                 const FockDiagonalBasis& basis) {
    if (settings.empty())
        throw std::invalid_argument("build_design_matrix: empty setting list");
    if (basis.cutoff < 0)
        throw std::invalid_argument("build_design_matrix: negative cutoff");
    DesignMatrix d;
    d.settings = settings;
    d.entries.resize(settings.size(), basis.cutoff + 1);
    for (std::size_t l = 0; l < settings.size(); ++l) {
        const auto& s = settings[l];
        const double T = std::norm(s.bs.u(1, 1));
        if (s.eta * T >= 1.0)
            throw singular_parameter_error("build_design_matrix: singular setting " +
                                           std::to_string(l));
        const OverlapValue overlap(s.phi1);
        const ForwardParams params = forward_params(s.eta, s.bs, 1, overlap, s.beta);
        const Matrix k = kernel_table(params.z, params.sigma, basis.cutoff);
        const double pref = std::exp(-params.gamma) / (1.0 - s.eta * T);
        for (int n = 0; n <= basis.cutoff; ++n)
            d.entries(static_cast<Eigen::Index>(l), n) = pref * k(n, n).real();
    }
    return d;
}

DesignMatrix build_design_matrix(const std::vector<MeasurementSetting>& settings,
                                 const ProjectorBasis& basis) {
    if (settings.empty())
        throw std::invalid_argument("build_design_matrix: empty setting list");
    if (basis.grid.empty())
        throw std::invalid_argument("build_design_matrix: empty projector grid");
    DesignMatrix d;
    d.settings = settings;
    d.entries.resize(settings.size(), basis.grid.size());
    ProjectorMixture unit;
    unit.coefficients = Eigen::VectorXd::Ones(1);
    for (std::size_t l = 0; l < settings.size(); ++l) {
        const auto& s = settings[l];
        ProjectorSetting ps;
        ps.eta = s.eta;
        ps.bs = s.bs;
        ps.overlap = OverlapValue(s.phi1);
        ps.beta = s.beta;
        for (std::size_t j = 0; j < basis.grid.size(); ++j) {
            unit.amplitudes = Vector::Constant(1, basis.grid[j]);
            d.entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
                no_click_projector(unit, ps);
        }
    }
    return d;
}

namespace {

// Indices of dataset records sorted by (setting_id, trials, zero_clicks) so
// that accumulation order, and therefore rounding, is independent of record
// permutation.
std::vector<std::size_t> canonical_record_order(const ClickDataset& dataset) {
    std::vector<std::size_t> order(dataset.records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = dataset.records[a];
        const auto& rb = dataset.records[b];
        if (ra.setting_id != rb.setting_id) return ra.setting_id < rb.setting_id;
        if (ra.trials != rb.trials) return ra.trials < rb.trials;
        return ra.zero_clicks < rb.zero_clicks;
    });
    return order;
}

double record_weight(const ClickRecord& r) {
    if (r.trials == 0) return 1.0;
    const double phat = ClickDataset::frequency(r);
    return static_cast<double>(r.trials) / (phat * (1.0 - phat) + 1e-9);
}

// Weighted rows (sqrt(w) * design row, sqrt(w) * frequency) in canonical order.
void assemble_weighted_system(const ClickDataset& dataset, const DesignMatrix& design,
                              Eigen::MatrixXd& a, Eigen::VectorXd& b) {
    const auto order = canonical_record_order(dataset);
    a.resize(dataset.records.size(), design.entries.cols());
    b.resize(dataset.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& r = dataset.records[order[i]];
        const double sw = std::sqrt(record_weight(r));
        a.row(static_cast<Eigen::Index>(i)) = sw * design.entries.row(r.setting_id);
        b(static_cast<Eigen::Index>(i)) = sw * ClickDataset::frequency(r);
    }
}

// Singular values of the weighted design, zero-padded to the unknown count so
// wide systems report their rank deficiency.
Eigen::VectorXd padded_singular_values(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    Eigen::VectorXd sv = Eigen::VectorXd::Zero(a.cols());
    sv.head(svd.singularValues().size()) = svd.singularValues();
    return sv;
}

double condition_from_singular_values(const Eigen::VectorXd& sv) {
    if (sv.size() == 0 || sv(0) <= 0.0) return std::numeric_limits<double>::infinity();
    const double smin = sv(sv.size() - 1);
    if (smin <= sv(0) * 1e-13) // below numerical rank: not identifiable
        return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

// Equality-constrained quadratic solve on the free index set:
//   min 0.5 q^T H q - c^T q  s.t.  sum q = 1
// with a tiny ridge keeping degenerate systems well posed (and selecting the
// minimum-norm point in the rank-deficient case).
Eigen::VectorXd solve_equality_kkt(const Eigen::MatrixXd& h, const Eigen::VectorXd& c,
                                   const std::vector<int>& free, double ridge) {
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd kkt(nf + 1, nf + 1);
    Eigen::VectorXd rhs(nf + 1);
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) kkt(i, j) = h(free[i], free[j]);
        kkt(i, i) += ridge;
        kkt(i, nf) = 1.0;
        kkt(nf, i) = 1.0;
        rhs(i) = c(free[i]);
    }
    kkt(nf, nf) = 0.0;
    rhs(nf) = 1.0;
    return Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs);
}

} // namespace

ReconstructionResult infer_diagonal(const ClickDataset& dataset, const DesignMatrix& design) {
    dataset.validate();
    if (dataset.records.empty())
        throw std::invalid_argument("infer_diagonal: empty dataset");
    for (const auto& r : dataset.records)
        if (r.setting_id >= design.entries.rows())
            throw std::invalid_argument("infer_diagonal: design rows do not cover dataset");

    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    assemble_weighted_system(dataset, design, a, b);

    const int dim = static_cast<int>(a.cols());
    const Eigen::MatrixXd h = 2.0 * (a.transpose() * a);
    const Eigen::VectorXd c = 2.0 * (a.transpose() * b);
    const double ridge = 1e-12 * std::max(1.0, h.diagonal().maxCoeff());

    // Active-set iteration on the simplex, Lawson-Hanson style: hold a
    // feasible iterate, solve the equality-constrained problem on the free
    // set, step to the first blocking bound when the solve leaves the
    // feasible region, release the most negative multiplier otherwise.
    Eigen::VectorXd p = Eigen::VectorXd::Constant(dim, 1.0 / dim);
    std::vector<bool> active(dim, false);
    const int max_iter = 50 * (dim + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<int> free;
        for (int i = 0; i < dim; ++i)
            if (!active[i]) free.push_back(i);
        if (free.empty()) break;

        const Eigen::VectorXd sol = solve_equality_kkt(h, c, free, ridge);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i < free.size(); ++i) q(free[i]) = sol(static_cast<int>(i));

        const double qmin = [&] {
            double m = 0.0;
            for (int i : free) m = std::min(m, q(i));
            return m;
        }();

        if (qmin < -1e-12) {
            // Step p -> p + theta (q - p) until the first free coordinate
            // hits zero; that coordinate joins the active set.
            double theta = 1.0;
            int blocking = -1;
            for (int i : free) {
                if (q(i) < p(i)) {
                    const double t = p(i) / (p(i) - q(i));
                    if (t < theta) {
                        theta = t;
                        blocking = i;
                    }
                }
            }
            p += theta * (q - p);
            if (blocking >= 0) {
                p(blocking) = 0.0;
                active[blocking] = true;
            }
            continue;
        }

        p = q.cwiseMax(0.0);
        // Bound multipliers lambda_i = g_i + nu must be non-negative at the
        // optimum; nu is read off the free coordinates.
        const Eigen::VectorXd grad = h * p - c;
        double nu = 0.0;
        for (int i : free) nu -= grad(i);
        nu /= static_cast<double>(free.size());
        int release = -1;
        double most_negative = -1e-10;
        for (int i = 0; i < dim; ++i) {
            if (!active[i]) continue;
            const double lambda = grad(i) + nu;
            if (lambda < most_negative) {
                most_negative = lambda;
                release = i;
            }
        }
        if (release < 0) break;
        active[release] = false;
    }

    // Exact constraint cleanup: clip negatives from rounding, renormalize.
    p = p.cwiseMax(0.0);
    p /= p.sum();

    ReconstructionResult res;
    res.estimate = p;
    res.residual_norm = (a * p - b).norm();
    res.condition_number = condition_from_singular_values(padded_singular_values(a));
    for (int i = 0; i < dim; ++i)
        if (p(i) == 0.0) res.constraint_active_set.push_back(i);
    return res;
}

ReconstructionResult infer_projector_coefficients(const ClickDataset& dataset,
                                                  const std::vector<Complex>& projector_grid,
                                                  double ridge) {
    if (projector_grid.empty())
        throw std::invalid_argument("infer_projector_coefficients: empty grid");
    dataset.validate();
    if (dataset.records.empty())
        throw std::invalid_argument("infer_projector_coefficients: empty dataset");

    ProjectorBasis basis{projector_grid};
    const DesignMatrix design = build_design_matrix(dataset.settings, basis);

    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    assemble_weighted_system(dataset, design, a, b);

    const int dim = static_cast<int>(a.cols());
    Eigen::MatrixXd kkt(dim + 1, dim + 1);
    kkt.topLeftCorner(dim, dim) =
        2.0 * (a.transpose() * a + ridge * Eigen::MatrixXd::Identity(dim, dim));
    kkt.topRightCorner(dim, 1).setOnes();
    kkt.bottomLeftCorner(1, dim).setOnes();
    kkt(dim, dim) = 0.0;
    Eigen::VectorXd rhs(dim + 1);
    rhs.head(dim) = 2.0 * (a.transpose() * b);
    rhs(dim) = 1.0;
    const Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs);

    ReconstructionResult res;
    res.estimate = sol.head(dim);
    res.residual_norm = (a * res.estimate - b).norm();
    res.condition_number = condition_from_singular_values(padded_singular_values(a));
    return res;
}

IdentifiabilityReport identifiability_report(const DesignMatrix& design) {
    if (design.entries.size() == 0)
        throw std::invalid_argument("identifiability_report: empty design");
    IdentifiabilityReport rep;
    rep.singular_values = padded_singular_values(design.entries);
    rep.condition_number = condition_from_singular_values(rep.singular_values);
    return rep;
}

std::vector<Complex> disk_grid(int count, double radius) {
    if (count < 1) throw std::invalid_argument("disk_grid: count must be >= 1");
    // Sunflower layout: radius sqrt(k/N), golden-angle azimuth. Deterministic
    // and roughly uniform over the disk.
    std::vector<Complex> grid;
    grid.reserve(count);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        const double r = radius * std::sqrt((k + 0.5) / count);
        grid.push_back(std::polar(r, golden * k));
    }
    return grid;
}

} // namespace ovtom
