#include "ovtom/io.hpp"
#include "ovtom/forward_model.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ovtom {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed number '" + s + "'");
    }
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& expected_header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw std::invalid_argument("CSV: expected header '" + expected_header + "', got '" +
                                    line + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

std::string dataset_to_csv(const ClickDataset& ds) {
    std::string out = "setting_id,trials,zero_clicks\n";
    for (const auto& r : ds.records) {
        out += std::to_string(r.setting_id);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        if (r.trials > 0)
            out += std::to_string(static_cast<long long>(r.zero_clicks));
        else
            out += format_double(r.zero_clicks);
        out += '\n';
    }
    return out;
}

std::vector<ClickRecord> dataset_from_csv(const std::string& text) {
    const auto rows = parse_csv(text, "setting_id,trials,zero_clicks");
    std::vector<ClickRecord> records;
    records.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 3)
            throw std::invalid_argument("dataset CSV: expected 3 columns");
        ClickRecord r;
        r.setting_id = static_cast<int>(parse_double(row[0]));
        r.trials = static_cast<long long>(parse_double(row[1]));
        r.zero_clicks = parse_double(row[2]);
        records.push_back(r);
    }
    return records;
}

std::string settings_to_json(const std::vector<MeasurementSetting>& settings) {
    ordered_json root;
    root["settings"] = ordered_json::array();
    for (std::size_t i = 0; i < settings.size(); ++i) {
        const auto& s = settings[i];
        ordered_json j;
        j["id"] = static_cast<int>(i);
        j["eta"] = s.eta;
        j["transmittivity"] = s.bs.transmittivity;
        j["phase_t"] = s.bs.phase_t;
        j["phase_r"] = s.bs.phase_r;
        j["beta_re"] = s.beta.real();
        j["beta_im"] = s.beta.imag();
        j["phi_re"] = s.phi1.real();
        j["phi_im"] = s.phi1.imag();
        if (s.delay_fs) j["delay_fs"] = *s.delay_fs;
        root["settings"].push_back(std::move(j));
    }
    return root.dump(2) + "\n";
}

std::vector<MeasurementSetting> settings_from_json(const std::string& text) {
    const auto root = ordered_json::parse(text);
    if (!root.contains("settings") || !root["settings"].is_array())
        throw std::invalid_argument("settings JSON: missing 'settings' array");
    std::vector<MeasurementSetting> settings;
    settings.reserve(root["settings"].size());
    int expected_id = 0;
    for (const auto& j : root["settings"]) {
        if (j.value("id", -1) != expected_id)
            throw std::invalid_argument("settings JSON: ids must be 0..n-1 in order");
        ++expected_id;
        MeasurementSetting s;
        s.eta = j.at("eta").get<double>();
        s.bs.transmittivity = j.at("transmittivity").get<double>();
        s.bs.phase_t = j.value("phase_t", 0.0);
        s.bs.phase_r = j.value("phase_r", 0.0);
        s.beta = Complex(j.at("beta_re").get<double>(), j.at("beta_im").get<double>());
        if (!j.contains("phi_re") || !j.contains("phi_im"))
            throw std::invalid_argument("settings JSON: phi_re/phi_im required per setting");
        s.phi1 = Complex(j.at("phi_re").get<double>(), j.at("phi_im").get<double>());
        if (j.contains("delay_fs")) s.delay_fs = j.at("delay_fs").get<double>();
        settings.push_back(std::move(s));
    }
    return settings;
}

std::string state_to_json(const DensityMatrix& rho) {
    ordered_json root;
    root["cutoff"] = rho.cutoff();
    if (rho.is_diagonal()) {
        ordered_json diag = ordered_json::array();
        for (int n = 0; n <= rho.cutoff(); ++n) diag.push_back(rho.element(n, n).real());
        root["diagonal"] = std::move(diag);
    } else {
        ordered_json re = ordered_json::array(), im = ordered_json::array();
        for (int n = 0; n <= rho.cutoff(); ++n) {
            ordered_json rrow = ordered_json::array(), irow = ordered_json::array();
            for (int m = 0; m <= rho.cutoff(); ++m) {
                rrow.push_back(rho.element(n, m).real());
                irow.push_back(rho.element(n, m).imag());
            }
            re.push_back(std::move(rrow));
            im.push_back(std::move(irow));
        }
        root["re"] = std::move(re);
        root["im"] = std::move(im);
    }
    return root.dump(2) + "\n";
}

DensityMatrix state_from_json(const std::string& text) {
    const auto root = ordered_json::parse(text);
    const int cutoff = root.at("cutoff").get<int>();
    if (cutoff < 0) throw std::invalid_argument("state JSON: negative cutoff");
    if (root.contains("diagonal")) {
        const auto& diag = root.at("diagonal");
        if (static_cast<int>(diag.size()) != cutoff + 1)
            throw std::invalid_argument("state JSON: diagonal length must be cutoff+1");
        Eigen::VectorXd p(cutoff + 1);
        for (int n = 0; n <= cutoff; ++n) p(n) = diag[n].get<double>();
        return DensityMatrix::diagonal(p);
    }
    const auto& re = root.at("re");
    const auto& im = root.at("im");
    Matrix m(cutoff + 1, cutoff + 1);
    if (static_cast<int>(re.size()) != cutoff + 1 || static_cast<int>(im.size()) != cutoff + 1)
        throw std::invalid_argument("state JSON: matrix shape must be (cutoff+1)^2");
    for (int n = 0; n <= cutoff; ++n) {
        if (static_cast<int>(re[n].size()) != cutoff + 1 ||
            static_cast<int>(im[n].size()) != cutoff + 1)
            throw std::invalid_argument("state JSON: matrix shape must be (cutoff+1)^2");
        for (int c = 0; c <= cutoff; ++c)
            m(n, c) = Complex(re[n][c].get<double>(), im[n][c].get<double>());
    }
    return DensityMatrix::from_matrix(m);
}

std::string reconstruction_to_json(const ReconstructionResult& result,
                                   const std::string& basis_kind) {
    ordered_json root;
    root["basis"] = basis_kind;
    ordered_json est = ordered_json::array();
    for (Eigen::Index i = 0; i < result.estimate.size(); ++i) est.push_back(result.estimate(i));
    root["estimate"] = std::move(est);
    root["residual_norm"] = result.residual_norm;
    root["condition_number"] = std::isfinite(result.condition_number)
                                   ? ordered_json(result.condition_number)
                                   : ordered_json("inf");
    root["active_set"] = result.constraint_active_set;
    return root.dump(2) + "\n";
}

std::string curve_to_csv(const OverlapCurve& curve) {
    std::string out = "delay_fs,phi_mag,phi_err,flagged\n";
    for (std::size_t i = 0; i < curve.phi_mag.size(); ++i) {
        out += format_double(curve.delays_s[i] * 1e15);
        out += ',';
        out += format_double(curve.phi_mag[i]);
        out += ',';
        out += format_double(curve.phi_err[i]);
        out += ',';
        out += curve.flagged[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

OverlapCurve curve_from_csv(const std::string& text) {
    const auto rows = parse_csv(text, "delay_fs,phi_mag,phi_err,flagged");
    OverlapCurve curve;
    for (const auto& row : rows) {
        if (row.size() != 4)
            throw std::invalid_argument("curve CSV: expected 4 columns");
        curve.delays_s.push_back(parse_double(row[0]) * 1e-15);
        curve.phi_mag.push_back(parse_double(row[1]));
        curve.phi_err.push_back(parse_double(row[2]));
        curve.flagged.push_back(parse_double(row[3]) != 0.0);
        curve.phi_phase.push_back(0.0);
    }
    return curve;
}

std::string profile_fit_to_json(const ProfileFit& fit) {
    ordered_json root;
    root["kind"] = "gaussian";
    root["amplitude"] = fit.model.amplitude;
    root["sigma_eff_rad_per_s"] = fit.model.sigma_eff_rad_s;
    root["center_offset_rad_per_s"] = fit.model.center_offset_rad_s;
    root["center_offset_identified"] = !fit.center_offset_fixed;
    root["residual"] = fit.residual;
    root["iterations"] = fit.iterations;
    root["converged"] = fit.converged;
    return root.dump(2) + "\n";
}

std::string grid_to_csv(const PhaseSpaceGrid& grid) {
    std::string out = "re,im,value_re,value_im\n";
    for (Eigen::Index i = 0; i < grid.re_axis.size(); ++i) {
        for (Eigen::Index j = 0; j < grid.im_axis.size(); ++j) {
            out += format_double(grid.re_axis(i));
            out += ',';
            out += format_double(grid.im_axis(j));
            out += ',';
            out += format_double(grid.values(i, j).real());
            out += ',';
            out += format_double(grid.values(i, j).imag());
            out += '\n';
        }
    }
    return out;
}

std::string kernel_table_to_csv(const std::vector<Complex>& z_list, double eta,
                                double transmittivity, int cutoff) {
    if (eta * transmittivity >= 1.0)
        throw std::invalid_argument("kernel_table_to_csv: eta*T must be < 1");
    const double sigma = eta * transmittivity / (1.0 - eta * transmittivity);
    std::string out = "z_index,z_re,z_im,n,m,k_re,k_im\n";
    for (std::size_t zi = 0; zi < z_list.size(); ++zi) {
        const Matrix k = kernel_table(z_list[zi], sigma, cutoff);
        for (int n = 0; n <= cutoff; ++n) {
            for (int m = 0; m <= cutoff; ++m) {
                out += std::to_string(zi);
                out += ',';
                out += format_double(z_list[zi].real());
                out += ',';
                out += format_double(z_list[zi].imag());
                out += ',';
                out += std::to_string(n);
                out += ',';
                out += std::to_string(m);
                out += ',';
                out += format_double(k(n, m).real());
                out += ',';
                out += format_double(k(n, m).imag());
                out += '\n';
            }
        }
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace ovtom
