// reconstruction.hpp — Inversion of measured zero-click probabilities into
// photon-number distributions or coherent-projector coefficients by least
// squares with linear constraints.

#pragma once

#include "ovtom/forward_model.hpp"
#include "ovtom/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ovtom {

/// One measurement configuration: detector efficiency, beam splitter, probe
/// amplitude, and the (known) signal/probe overlap. delay_fs is carried along
/// when the setting came from a delay scan.
struct MeasurementSetting {
    double eta = 0.0;
    BeamSplitterSpec bs;
    Complex beta = 0.0;
    Complex phi1 = 0.0;
    std::optional<double> delay_fs;
};

/// Trial counts per setting. zero_clicks is an integer count when trials > 0;
/// the sentinel trials == 0 marks a noiseless record whose zero_clicks field
/// holds the exact probability.
struct ClickRecord {
    int setting_id = 0;
    long long trials = 0;
    double zero_clicks = 0.0;
};

struct ClickDataset {
    std::vector<ClickRecord> records;
    std::vector<MeasurementSetting> settings;

    void validate() const;
    // Observed zero-click frequency of one record.
    static double frequency(const ClickRecord& r) {
        return r.trials > 0 ? r.zero_clicks / static_cast<double>(r.trials) : r.zero_clicks;
    }
};

struct FockDiagonalBasis {
    int cutoff = 5;
};
struct ProjectorBasis {
    std::vector<Complex> grid;
};

/// Rows: one per setting. Columns: predicted no-click probability of each
/// basis element at that setting, via the forward model.
struct DesignMatrix {
    Eigen::MatrixXd entries;
    std::vector<MeasurementSetting> settings;
};

DesignMatrix build_design_matrix(const std::vector<MeasurementSetting>& settings,
                                 const FockDiagonalBasis& basis);
DesignMatrix build_design_matrix(const std::vector<MeasurementSetting>& settings,
                                 const ProjectorBasis& basis);

struct ReconstructionResult {
    Eigen::VectorXd estimate;
    double residual_norm = 0.0;    // weighted residual 2-norm
    double condition_number = 0.0; // of the weighted design
    std::vector<int> constraint_active_set;
};

/// Weighted least squares over the probability simplex (p >= 0, sum p = 1),
/// weights trials / (phat (1-phat) + 1e-9); exact-probability records get
/// unit weight. Deterministic active-set solve.
ReconstructionResult infer_diagonal(const ClickDataset& dataset, const DesignMatrix& design);

/// Equality-constrained ridge least squares for projector coefficients:
/// sum c = 1, signs free.
ReconstructionResult infer_projector_coefficients(const ClickDataset& dataset,
                                                  const std::vector<Complex>& projector_grid,
                                                  double ridge = 1e-6);

struct IdentifiabilityReport {
    Eigen::VectorXd singular_values; // descending
    double condition_number = 0.0;   // inf when rank deficient
};

IdentifiabilityReport identifiability_report(const DesignMatrix& design);

/// Shared with tests and the projector-grid CLI path: deterministic ring grid
/// of `count` amplitudes covering the disk of the given radius.
std::vector<Complex> disk_grid(int count, double radius);

} // namespace ovtom
