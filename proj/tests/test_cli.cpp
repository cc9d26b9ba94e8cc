#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "commands.hpp"
#include "validate.hpp"

#include "ovtom/io.hpp"
#include "ovtom/overlap_inference.hpp"
#include "ovtom/reconstruction.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>

using namespace ovtom;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ovtom_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& rel) const { return (path / rel).string(); }
};

json simulate_config(const std::string& out, long long trials, int seed) {
    json cfg;
    cfg["seed"] = seed;
    cfg["out"] = out;
    cfg["scan"] = {
        {"delays", {{"count", 81}, {"spacing_fs", 33.0}}},
        {"profile", {{"amplitude", 1.0}, {"sigma_eff_rad_per_s", 2.5e12}}},
        {"signal", {{"cutoff", 1}, {"diagonal", {0.335, 0.665}}}},
        {"probe_beta", {{"re", 1.0}, {"im", 0.0}}},
        {"beam_splitter", {{"transmittivity", 0.456}}},
        {"detector", {{"efficiency", 0.59}}},
        {"trials_per_delay", trials},
    };
    return cfg;
}

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"ovtom"};
    argv.insert(argv.end(), args.begin(), args.end());
    return ovtom::cli::run(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("simulate writes an 81-row dataset plus settings and manifest") {
    TempDir tmp("simulate");
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, simulate_config(tmp.str("out"), 1000, 1).dump(2));
    CHECK(run_cli({"simulate", "--config", cfg_path.c_str()}) == cli::kExitOk);

    const auto records = dataset_from_csv(read_file(tmp.str("out/dataset.csv")));
    CHECK(records.size() == 81);
    const auto settings = settings_from_json(read_file(tmp.str("out/settings.json")));
    CHECK(settings.size() == 81);
    CHECK(settings[40].delay_fs.has_value());
    CHECK(*settings[40].delay_fs == doctest::Approx(0.0));

    const auto manifest = json::parse(read_file(tmp.str("out/manifest.json")));
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("seed") == 1);
}

TEST_CASE("simulate with the noiseless sentinel emits exact probabilities") {
    TempDir tmp("noiseless");
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, simulate_config(tmp.str("out"), 0, 1).dump(2));
    CHECK(run_cli({"simulate", "--config", cfg_path.c_str()}) == cli::kExitOk);
    const auto records = dataset_from_csv(read_file(tmp.str("out/dataset.csv")));
    for (const auto& r : records) {
        CHECK(r.trials == 0);
        CHECK(r.zero_clicks > 0.0);
        CHECK(r.zero_clicks < 1.0);
    }
}

TEST_CASE("unknown config keys are rejected with the field path") {
    TempDir tmp("badschema");
    json cfg = simulate_config(tmp.str("out"), 10, 1);
    cfg["scan"]["detektor"] = json{{"efficiency", 0.5}};
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, cfg.dump(2));
    CHECK(run_cli({"simulate", "--config", cfg_path.c_str()}) == cli::kExitValidation);
}

TEST_CASE("missing config file exits with the validation code") {
    CHECK(run_cli({"simulate", "--config", "/nonexistent/nope.json"}) ==
          cli::kExitValidation);
}

TEST_CASE("numerical failures exit with code 3") {
    // eta * T = 1 makes the forward model singular during simulation.
    TempDir tmp("numfail");
    json cfg = simulate_config(tmp.str("out"), 10, 1);
    cfg["scan"]["detector"]["efficiency"] = 1.0;
    cfg["scan"]["beam_splitter"]["transmittivity"] = 1.0;
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, cfg.dump(2));
    CHECK(run_cli({"simulate", "--config", cfg_path.c_str()}) == cli::kExitNumerical);
}

TEST_CASE("reconstruct recovers the generating diagonal from a noiseless run") {
    TempDir tmp("reconstruct");
    write_file(tmp.str("sim.json"), simulate_config(tmp.str("out"), 0, 1).dump(2));
    REQUIRE(run_cli({"simulate", "--config", tmp.str("sim.json").c_str()}) == cli::kExitOk);

    json rcfg;
    rcfg["dataset_csv"] = tmp.str("out/dataset.csv");
    rcfg["settings_json"] = tmp.str("out/settings.json");
    rcfg["basis"] = {{"kind", "fock_diagonal"}, {"cutoff", 5}};
    rcfg["out"] = tmp.str("rec");
    write_file(tmp.str("rec.json"), rcfg.dump(2));
    REQUIRE(run_cli({"reconstruct", "--config", tmp.str("rec.json").c_str()}) == cli::kExitOk);

    const auto result = json::parse(read_file(tmp.str("rec/result.json")));
    CHECK(std::abs(result.at("estimate")[0].get<double>() - 0.335) < 1e-6);
    CHECK(std::abs(result.at("estimate")[1].get<double>() - 0.665) < 1e-6);
    for (int n = 2; n <= 5; ++n)
        CHECK(result.at("estimate")[n].get<double>() < 1e-6);
    CHECK(fs::exists(tmp.str("rec/residuals.csv")));
}

TEST_CASE("reconstruct rejects mismatched dataset and settings") {
    TempDir tmp("mismatch");
    write_file(tmp.str("sim.json"), simulate_config(tmp.str("out"), 0, 1).dump(2));
    REQUIRE(run_cli({"simulate", "--config", tmp.str("sim.json").c_str()}) == cli::kExitOk);
    // Truncate the settings file to 3 entries.
    auto settings = settings_from_json(read_file(tmp.str("out/settings.json")));
    settings.resize(3);
    write_file(tmp.str("out/settings.json"), settings_to_json(settings));

    json rcfg;
    rcfg["dataset_csv"] = tmp.str("out/dataset.csv");
    rcfg["settings_json"] = tmp.str("out/settings.json");
    rcfg["basis"] = {{"kind", "fock_diagonal"}, {"cutoff", 5}};
    rcfg["out"] = tmp.str("rec");
    write_file(tmp.str("rec.json"), rcfg.dump(2));
    CHECK(run_cli({"reconstruct", "--config", tmp.str("rec.json").c_str()}) ==
          cli::kExitValidation);
}

TEST_CASE("infer-overlap round trip with a profile fit") {
    TempDir tmp("overlap");
    json scfg = simulate_config(tmp.str("out"), 200000, 5);
    write_file(tmp.str("sim.json"), scfg.dump(2));
    REQUIRE(run_cli({"simulate", "--config", tmp.str("sim.json").c_str()}) == cli::kExitOk);

    Eigen::VectorXd diag(2);
    diag << 0.335, 0.665;
    write_file(tmp.str("state.json"), state_to_json(DensityMatrix::diagonal(diag)));

    json cfg;
    cfg["state_json"] = tmp.str("state.json");
    cfg["dataset_csv"] = tmp.str("out/dataset.csv");
    cfg["settings_json"] = tmp.str("out/settings.json");
    cfg["fit_profile"] = true;
    cfg["out"] = tmp.str("inf");
    write_file(tmp.str("inf.json"), cfg.dump(2));
    REQUIRE(run_cli({"infer-overlap", "--config", tmp.str("inf.json").c_str()}) ==
            cli::kExitOk);

    const auto fit = json::parse(read_file(tmp.str("inf/profile_fit.json")));
    // The saturated peak (amplitude 1) clips the center points, so this is a
    // plumbing check, not a statistics check; the tight recovery bound lives
    // in the overlap-inference suite with an interior amplitude.
    CHECK(std::abs(fit.at("sigma_eff_rad_per_s").get<double>() - 2.5e12) < 1.25e11);
    CHECK(fit.at("amplitude").get<double>() > 0.9);
    CHECK(fit.at("center_offset_identified") == false);

    const OverlapCurve curve = curve_from_csv(read_file(tmp.str("inf/overlap_curve.csv")));
    CHECK(curve.phi_mag.size() == 81);
}

TEST_CASE("infer-overlap with a vacuum state flags everything and still exits 0") {
    TempDir tmp("vacuum");
    write_file(tmp.str("sim.json"), simulate_config(tmp.str("out"), 0, 1).dump(2));
    REQUIRE(run_cli({"simulate", "--config", tmp.str("sim.json").c_str()}) == cli::kExitOk);
    write_file(tmp.str("state.json"), state_to_json(DensityMatrix::vacuum(1)));

    json cfg;
    cfg["state_json"] = tmp.str("state.json");
    cfg["dataset_csv"] = tmp.str("out/dataset.csv");
    cfg["settings_json"] = tmp.str("out/settings.json");
    cfg["out"] = tmp.str("inf");
    write_file(tmp.str("inf.json"), cfg.dump(2));
    CHECK(run_cli({"infer-overlap", "--config", tmp.str("inf.json").c_str()}) == cli::kExitOk);

    const OverlapCurve curve = curve_from_csv(read_file(tmp.str("inf/overlap_curve.csv")));
    CHECK(curve.valid_count() == 0);
    CHECK_FALSE(fs::exists(tmp.str("inf/profile_fit.json")));
}

TEST_CASE("missing state file exits with the validation code") {
    TempDir tmp("nostate");
    write_file(tmp.str("sim.json"), simulate_config(tmp.str("out"), 0, 1).dump(2));
    REQUIRE(run_cli({"simulate", "--config", tmp.str("sim.json").c_str()}) == cli::kExitOk);
    json cfg;
    cfg["state_json"] = tmp.str("does_not_exist.json");
    cfg["dataset_csv"] = tmp.str("out/dataset.csv");
    cfg["settings_json"] = tmp.str("out/settings.json");
    cfg["out"] = tmp.str("inf");
    write_file(tmp.str("inf.json"), cfg.dump(2));
    CHECK(run_cli({"infer-overlap", "--config", tmp.str("inf.json").c_str()}) ==
          cli::kExitValidation);
}

TEST_CASE("kernel-table export matches the library kernel") {
    TempDir tmp("ktab");
    json cfg;
    cfg["eta"] = 0.59;
    cfg["transmittivity"] = 0.456;
    cfg["z_list"] = json::array({json{{"re", -1.0}, {"im", 0.2}}});
    cfg["cutoff"] = 3;
    cfg["out"] = tmp.str("out");
    write_file(tmp.str("cfg.json"), cfg.dump(2));
    REQUIRE(run_cli({"kernel-table", "--config", tmp.str("cfg.json").c_str()}) == cli::kExitOk);

    const std::string csv = read_file(tmp.str("out/kernel_table.csv"));
    // 1 header + 16 rows for cutoff 3.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
    const double sigma = 0.59 * 0.456 / (1.0 - 0.59 * 0.456);
    const Matrix k = kernel_table(Complex(-1.0, 0.2), sigma, 3);
    CHECK(csv.find(format_double(k(0, 0).real())) != std::string::npos);
    CHECK(csv.find(format_double(k(2, 1).real())) != std::string::npos);
}

TEST_CASE("fit-profile command consumes a curve CSV") {
    TempDir tmp("fitp");
    OverlapCurve curve;
    const SpectralProfileModel truth{0.9, 2.0e12, 0.0};
    for (int j = -20; j <= 20; ++j) {
        const double dt = j * 33e-15;
        curve.delays_s.push_back(dt);
        curve.phi_mag.push_back(std::abs(overlap_from_profile(truth, dt)));
        curve.phi_err.push_back(0.0);
        curve.flagged.push_back(false);
        curve.phi_phase.push_back(0.0);
    }
    write_file(tmp.str("curve.csv"), curve_to_csv(curve));
    json cfg;
    cfg["curve_csv"] = tmp.str("curve.csv");
    cfg["out"] = tmp.str("out");
    write_file(tmp.str("cfg.json"), cfg.dump(2));
    REQUIRE(run_cli({"fit-profile", "--config", tmp.str("cfg.json").c_str()}) == cli::kExitOk);
    const auto fit = json::parse(read_file(tmp.str("out/profile_fit.json")));
    CHECK(std::abs(fit.at("amplitude").get<double>() - 0.9) < 1e-6);
}

TEST_CASE("validate --fast passes within its time budget") {
    TempDir tmp("validate");
    const auto start = std::chrono::steady_clock::now();
    CHECK(cli::cmd_validate(true, tmp.str("report")) == cli::kExitOk);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(elapsed < 10.0);
    const std::string report = read_file(tmp.str("report/validate_report.txt"));
    CHECK(report.find("[PASS]") != std::string::npos);
    CHECK(report.find("[FAIL]") == std::string::npos);
}

TEST_CASE("kernel sign canary trips the oracle comparison") {
    cli::ValidateOptions opts;
    opts.fast = true;
    opts.inject_kernel_sign_flip = true;
    const auto results = cli::run_validation_suite(opts);
    bool oracle_check_failed = false;
    for (const auto& r : results)
        if (r.name.find("oracle vs closed form") != std::string::npos && !r.passed)
            oracle_check_failed = true;
    CHECK(oracle_check_failed);
    CHECK_FALSE(cli::all_passed(results));
}

TEST_CASE("simulate + reconstruct are byte-identical across repeated runs") {
    TempDir tmp("determinism");
    for (const char* run : {"a", "b"}) {
        json scfg = simulate_config(tmp.str(std::string("out_") + run), 20000, 11);
        const std::string sim_cfg = tmp.str(std::string("sim_") + run + ".json");
        write_file(sim_cfg, scfg.dump(2));
        REQUIRE(run_cli({"simulate", "--config", sim_cfg.c_str()}) == cli::kExitOk);

        json rcfg;
        rcfg["dataset_csv"] = tmp.str(std::string("out_") + run + "/dataset.csv");
        rcfg["settings_json"] = tmp.str(std::string("out_") + run + "/settings.json");
        rcfg["basis"] = {{"kind", "fock_diagonal"}, {"cutoff", 5}};
        rcfg["out"] = tmp.str(std::string("rec_") + run);
        const std::string rec_cfg = tmp.str(std::string("rec_") + run + ".json");
        write_file(rec_cfg, rcfg.dump(2));
        REQUIRE(run_cli({"reconstruct", "--config", rec_cfg.c_str()}) == cli::kExitOk);
    }
    CHECK(read_file(tmp.str("out_a/dataset.csv")) == read_file(tmp.str("out_b/dataset.csv")));
    CHECK(read_file(tmp.str("out_a/settings.json")) ==
          read_file(tmp.str("out_b/settings.json")));
    CHECK(read_file(tmp.str("rec_a/result.json")) == read_file(tmp.str("rec_b/result.json")));
    CHECK(read_file(tmp.str("rec_a/residuals.csv")) ==
          read_file(tmp.str("rec_b/residuals.csv")));
}

TEST_CASE("state JSON round trip") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.3;
    m(2, 2) = 0.2;
    m(0, 1) = Complex(0.1, 0.05);
    m(1, 0) = std::conj(m(0, 1));
    const DensityMatrix rho = DensityMatrix::from_matrix(m);
    const DensityMatrix back = state_from_json(state_to_json(rho));
    CHECK((back.elements() - rho.elements()).cwiseAbs().maxCoeff() < 1e-15);

    const DensityMatrix diag = state_from_json("{\"cutoff\":1,\"diagonal\":[0.4,0.6]}");
    CHECK(diag.element(1, 1).real() == doctest::Approx(0.6));
}
