#include "commands.hpp"
#include "validate.hpp"

#include "ovtom/errors.hpp"
#include "ovtom/experiment_sim.hpp"
#include "ovtom/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace ovtom::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Configuration problems reported with a field path and exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error(path + ": expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw config_error(path + "." + item.key() + ": unknown key");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw config_error(path + "." + key + ": missing");
    return obj.at(key);
}

double number_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) throw config_error(path + "." + key + ": expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        throw config_error(path + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

long long integer_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) throw config_error(path + "." + key + ": expected an integer");
    return v.get<long long>();
}

std::string string_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_string()) throw config_error(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

Complex complex_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    const std::string sub = path + "." + key;
    require_keys(v, sub, {"re", "im"});
    return Complex(number_at(v, sub, "re"), number_at(v, sub, "im"));
}

json load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse: ") + e.what());
    }
}

DensityMatrix state_from_config(const json& j, const std::string& path) {
    require_keys(j, path, {"cutoff", "diagonal", "re", "im"});
    try {
        return state_from_json(j.dump());
    } catch (const std::exception& e) {
        throw config_error(path + ": " + e.what());
    }
}

std::string resolve_out_dir(const json& cfg, const std::string& path,
                            const CommonOverrides& overrides) {
    std::string out;
    if (overrides.out)
        out = *overrides.out;
    else if (cfg.contains("out"))
        out = string_at(cfg, path, "out");
    else
        throw config_error(path + ".out: missing (or pass --out)");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw config_error("cannot create output directory " + out + ": " + ec.message());
    return out;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["config_hash"] = fnv1a_hex(config_text);
    m["seed"] = seed;
    m["version"] = kVersion;
    m["outputs"] = outputs;
    write_file(out_dir + "/manifest.json", m.dump(2) + "\n");
}

int report_config_error(const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
}

int report_numerical_error(const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
}

ScanPlan scan_plan_from_config(const json& cfg, const CommonOverrides& overrides) {
    const std::string p = "scan";
    const json& scan = require(cfg, "", "scan");
    require_keys(scan, p,
                 {"delays", "profile", "signal", "probe_beta", "beam_splitter", "detector",
                  "trials_per_delay", "drift"});

    ScanPlan plan;

    const json& delays = require(scan, p, "delays");
    require_keys(delays, p + ".delays", {"count", "spacing_fs", "centered", "list_fs"});
    if (delays.contains("list_fs")) {
        const json& list = delays.at("list_fs");
        if (!list.is_array() || list.empty())
            throw config_error(p + ".delays.list_fs: expected a non-empty array");
        plan.schedule.delays_s.clear();
        for (const auto& v : list) plan.schedule.delays_s.push_back(v.get<double>() * 1e-15);
    } else {
        const int count = static_cast<int>(integer_at(delays, p + ".delays", "count"));
        const double spacing = number_at(delays, p + ".delays", "spacing_fs") * 1e-15;
        bool centered = true;
        if (delays.contains("centered")) centered = delays.at("centered").get<bool>();
        plan.schedule = DelaySchedule::uniform(count, spacing, centered);
    }

    const json& profile = require(scan, p, "profile");
    require_keys(profile, p + ".profile",
                 {"amplitude", "sigma_eff_rad_per_s", "center_offset_rad_per_s"});
    plan.profile.amplitude = number_at(profile, p + ".profile", "amplitude");
    plan.profile.sigma_eff_rad_s = number_at(profile, p + ".profile", "sigma_eff_rad_per_s");
    plan.profile.center_offset_rad_s =
        number_or(profile, p + ".profile", "center_offset_rad_per_s", 0.0);

    plan.signal = state_from_config(require(scan, p, "signal"), p + ".signal");
    plan.probe_beta = complex_at(scan, p, "probe_beta");

    const json& bs = require(scan, p, "beam_splitter");
    require_keys(bs, p + ".beam_splitter", {"transmittivity", "phase_t", "phase_r"});
    plan.bs.transmittivity = number_at(bs, p + ".beam_splitter", "transmittivity");
    plan.bs.phase_t = number_or(bs, p + ".beam_splitter", "phase_t", 0.0);
    plan.bs.phase_r = number_or(bs, p + ".beam_splitter", "phase_r", 0.0);

    const json& det = require(scan, p, "detector");
    require_keys(det, p + ".detector", {"efficiency"});
    plan.detector.efficiency = number_at(det, p + ".detector", "efficiency");

    plan.trials_per_delay = integer_at(scan, p, "trials_per_delay");

    if (scan.contains("drift")) {
        const json& drift = scan.at("drift");
        require_keys(drift, p + ".drift", {"relative_amplitude", "period_in_settings"});
        DriftSpec d;
        d.relative_amplitude = number_at(drift, p + ".drift", "relative_amplitude");
        d.period_in_settings = number_at(drift, p + ".drift", "period_in_settings");
        plan.drift = d;
    }

    plan.seed = overrides.seed ? *overrides.seed
                               : static_cast<std::uint64_t>(
                                     cfg.contains("seed") ? integer_at(cfg, "", "seed") : 0);

    try {
        plan.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("scan: ") + e.what());
    }
    return plan;
}

ClickDataset load_dataset(const json& cfg, const std::string& path_prefix) {
    const std::string dataset_path = string_at(cfg, path_prefix, "dataset_csv");
    const std::string settings_path = string_at(cfg, path_prefix, "settings_json");
    ClickDataset ds;
    try {
        ds.records = dataset_from_csv(read_file(dataset_path));
        ds.settings = settings_from_json(read_file(settings_path));
        ds.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("dataset: ") + e.what());
    }
    return ds;
}

} // namespace

int cmd_simulate(const std::string& config_path, const CommonOverrides& overrides) {
    json cfg;
    ScanPlan plan = ScanPlan{DelaySchedule{{0.0}}, SpectralProfileModel{},
                             DensityMatrix::vacuum(0)};
    std::string out_dir, config_text;
    try {
        cfg = load_config(config_path);
        config_text = cfg.dump();
        require_keys(cfg, "", {"scan", "seed", "out"});
        plan = scan_plan_from_config(cfg, overrides);
        out_dir = resolve_out_dir(cfg, "", overrides);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }

    try {
        const ClickDataset ds = simulate_scan(plan);
        write_file(out_dir + "/dataset.csv", dataset_to_csv(ds));
        write_file(out_dir + "/settings.json", settings_to_json(ds.settings));
        write_manifest(out_dir, "simulate", config_text, plan.seed,
                       {"dataset.csv", "settings.json"});
        std::cout << "simulate: wrote " << ds.records.size() << " records to " << out_dir
                  << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return report_numerical_error(e);
    }
}

int cmd_reconstruct(const std::string& config_path, const CommonOverrides& overrides) {
    json cfg;
    ClickDataset ds;
    std::string out_dir, config_text, basis_kind;
    FockDiagonalBasis fock_basis;
    ProjectorBasis projector_basis;
    double ridge = 1e-6;
    try {
        cfg = load_config(config_path);
        config_text = cfg.dump();
        require_keys(cfg, "", {"dataset_csv", "settings_json", "basis", "out"});
        ds = load_dataset(cfg, "");

        const json& basis = require(cfg, "", "basis");
        basis_kind = string_at(basis, "basis", "kind");
        if (basis_kind == "fock_diagonal") {
            require_keys(basis, "basis", {"kind", "cutoff"});
            fock_basis.cutoff = static_cast<int>(integer_at(basis, "basis", "cutoff"));
        } else if (basis_kind == "projectors") {
            require_keys(basis, "basis", {"kind", "grid", "disk_count", "disk_radius", "ridge"});
            ridge = number_or(basis, "basis", "ridge", 1e-6);
            if (basis.contains("grid")) {
                for (const auto& g : basis.at("grid"))
                    projector_basis.grid.push_back(
                        Complex(g.at("re").get<double>(), g.at("im").get<double>()));
            } else {
                const int count = static_cast<int>(integer_at(basis, "basis", "disk_count"));
                const double radius = number_at(basis, "basis", "disk_radius");
                projector_basis.grid = disk_grid(count, radius);
            }
            if (projector_basis.grid.empty())
                throw config_error("basis.grid: empty projector grid");
        } else {
            throw config_error("basis.kind: expected 'fock_diagonal' or 'projectors'");
        }
        out_dir = resolve_out_dir(cfg, "", overrides);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }

    try {
        ReconstructionResult result;
        DesignMatrix design;
        if (basis_kind == "fock_diagonal") {
            design = build_design_matrix(ds.settings, fock_basis);
            result = infer_diagonal(ds, design);
        } else {
            design = build_design_matrix(ds.settings, ProjectorBasis{projector_basis.grid});
            result = infer_projector_coefficients(ds, projector_basis.grid, ridge);
        }

        write_file(out_dir + "/result.json", reconstruction_to_json(result, basis_kind));

        // Plot-ready per-setting residuals.
        std::string residuals = "setting_id,observed,predicted,residual\n";
        for (const auto& r : ds.records) {
            const double observed = ClickDataset::frequency(r);
            const double predicted = design.entries.row(r.setting_id) * result.estimate;
            residuals += std::to_string(r.setting_id) + "," + format_double(observed) + "," +
                         format_double(predicted) + "," + format_double(observed - predicted) +
                         "\n";
        }
        write_file(out_dir + "/residuals.csv", residuals);
        write_manifest(out_dir, "reconstruct", config_text, 0,
                       {"result.json", "residuals.csv"});
        std::cout << "reconstruct: wrote result.json to " << out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return report_numerical_error(e);
    }
}

int cmd_infer_overlap(const std::string& config_path, const CommonOverrides& overrides) {
    json cfg;
    ClickDataset ds;
    std::string out_dir, config_text;
    DensityMatrix state = DensityMatrix::vacuum(0);
    bool do_fit = true;
    try {
        cfg = load_config(config_path);
        config_text = cfg.dump();
        require_keys(cfg, "", {"state_json", "dataset_csv", "settings_json", "fit_profile",
                               "out"});
        state = [&] {
            try {
                return state_from_json(read_file(string_at(cfg, "", "state_json")));
            } catch (const std::exception& e) {
                throw config_error(std::string("state_json: ") + e.what());
            }
        }();
        ds = load_dataset(cfg, "");
        if (cfg.contains("fit_profile")) do_fit = cfg.at("fit_profile").get<bool>();
        out_dir = resolve_out_dir(cfg, "", overrides);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }

    try {
        const OverlapCurve curve = overlap_curve_from_scan(state, ds);
        write_file(out_dir + "/overlap_curve.csv", curve_to_csv(curve));
        std::vector<std::string> outputs = {"overlap_curve.csv"};

        const int flagged = static_cast<int>(curve.phi_mag.size()) - curve.valid_count();
        if (flagged > 0)
            std::cout << "infer-overlap: " << flagged << " flagged point(s)\n";

        if (do_fit) {
            if (curve.valid_count() >= 4) {
                const ProfileFit fit = fit_profile(curve);
                write_file(out_dir + "/profile_fit.json", profile_fit_to_json(fit));
                outputs.push_back("profile_fit.json");
            } else {
                std::cout << "infer-overlap: too few valid points for a profile fit\n";
            }
        }
        write_manifest(out_dir, "infer-overlap", config_text, 0, outputs);
        return kExitOk;
    } catch (const std::exception& e) {
        return report_numerical_error(e);
    }
}

int cmd_fit_profile(const std::string& config_path, const CommonOverrides& overrides) {
    json cfg;
    OverlapCurve curve;
    std::string out_dir, config_text;
    try {
        cfg = load_config(config_path);
        config_text = cfg.dump();
        require_keys(cfg, "", {"curve_csv", "out"});
        curve = curve_from_csv(read_file(string_at(cfg, "", "curve_csv")));
        out_dir = resolve_out_dir(cfg, "", overrides);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    try {
        const ProfileFit fit = fit_profile(curve);
        write_file(out_dir + "/profile_fit.json", profile_fit_to_json(fit));
        write_manifest(out_dir, "fit-profile", config_text, 0, {"profile_fit.json"});
        return kExitOk;
    } catch (const std::exception& e) {
        return report_numerical_error(e);
    }
}

int cmd_kernel_table(const std::string& config_path, const CommonOverrides& overrides) {
    json cfg;
    std::string out_dir, config_text;
    std::vector<Complex> z_list;
    double eta = 0.0, transmittivity = 0.0;
    int cutoff = 0;
    try {
        cfg = load_config(config_path);
        config_text = cfg.dump();
        require_keys(cfg, "", {"eta", "transmittivity", "z_list", "cutoff", "out"});
        eta = number_at(cfg, "", "eta");
        transmittivity = number_at(cfg, "", "transmittivity");
        cutoff = static_cast<int>(integer_at(cfg, "", "cutoff"));
        const json& zl = require(cfg, "", "z_list");
        if (!zl.is_array() || zl.empty())
            throw config_error("z_list: expected a non-empty array");
        for (const auto& z : zl)
            z_list.push_back(Complex(z.at("re").get<double>(), z.at("im").get<double>()));
        out_dir = resolve_out_dir(cfg, "", overrides);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    try {
        write_file(out_dir + "/kernel_table.csv",
                   kernel_table_to_csv(z_list, eta, transmittivity, cutoff));
        write_manifest(out_dir, "kernel-table", config_text, 0, {"kernel_table.csv"});
        return kExitOk;
    } catch (const std::exception& e) {
        return report_numerical_error(e);
    }
}

int cmd_validate(bool fast, const std::optional<std::string>& out_dir) {
    ValidateOptions options;
    options.fast = fast;
    const auto results = run_validation_suite(options);
    const std::string table = render_validation_table(results);
    std::cout << table;
    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        if (!ec) write_file(*out_dir + "/validate_report.txt", table);
    }
    return all_passed(results) ? kExitOk : kExitNumerical;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"ovtom: zero-click interference simulation and inversion"};
    app.require_subcommand(1);

    std::string config_path;
    CommonOverrides overrides;
    std::int64_t seed_flag = -1;
    std::string out_flag;
    bool fast = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--seed", seed_flag, "seed override");
        sub->add_option("--out", out_flag, "output directory override");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a click dataset");
    add_common(simulate, true);
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "invert a dataset to a state");
    add_common(reconstruct, true);
    CLI::App* infer = app.add_subcommand("infer-overlap", "invert a scan to an overlap curve");
    add_common(infer, true);
    CLI::App* fitp = app.add_subcommand("fit-profile", "fit a spectral profile to a curve");
    add_common(fitp, true);
    CLI::App* ktab = app.add_subcommand("kernel-table", "export kernel moments as CSV");
    add_common(ktab, true);
    CLI::App* validate = app.add_subcommand("validate", "run the built-in identity suite");
    validate->add_flag("--fast", fast, "run the quick subset");
    validate->add_option("--out", out_flag, "directory for the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    if (seed_flag >= 0) overrides.seed = static_cast<std::uint64_t>(seed_flag);
    if (!out_flag.empty()) overrides.out = out_flag;

    if (simulate->parsed()) return cmd_simulate(config_path, overrides);
    if (reconstruct->parsed()) return cmd_reconstruct(config_path, overrides);
    if (infer->parsed()) return cmd_infer_overlap(config_path, overrides);
    if (fitp->parsed()) return cmd_fit_profile(config_path, overrides);
    if (ktab->parsed()) return cmd_kernel_table(config_path, overrides);
    if (validate->parsed()) return cmd_validate(fast, overrides.out);
    return kExitValidation;
}

} // namespace ovtom::cli
