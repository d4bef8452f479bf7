// Command-line front end: scenario generation, single-shot estimation, CRLB
// reports, and the sigma/gamma/CEP sweep experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "uavloc/crlb.hpp"
#include "uavloc/errors.hpp"
#include "uavloc/estimators.hpp"
#include "uavloc/model.hpp"
#include "uavloc/montecarlo.hpp"
#include "uavloc/rng.hpp"
#include "uavloc/scenario_io.hpp"

namespace {

constexpr const char* kVersion = "uavloc 0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTotalFailure = 4;

using nlohmann::json;
using namespace uavloc;

struct CommonFlags {
    std::string scenario = "paper-hexagon";
    std::uint64_t seed = 1;
    double sigma = -1.0;   // <0: keep scenario value
    double gamma = -1.0;
    double grid_step = 10.0;
    double aoi = 2000.0;
    std::string mode = "2d";
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
    cmd->add_option("--scenario", flags->scenario,
                    "builtin name or scenario file");
    cmd->add_option("--seed", flags->seed, "master RNG seed");
    cmd->add_option("--sigma", flags->sigma,
                    "override shadowing std deviation (dB)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--gamma", flags->gamma, "override path loss exponent");
    cmd->add_option("--grid-step", flags->grid_step, "grid step (m)");
    cmd->add_option("--aoi", flags->aoi, "area of interest width (m)");
    cmd->add_option("--mode", flags->mode, "search mode: 2d or 3d")
        ->check(CLI::IsMember({"2d", "3d"}));
    cmd->add_option("--threads", flags->threads, "worker thread cap");
}

Scenario resolve_scenario(const CommonFlags& flags) {
    Scenario scenario = load_scenario(flags.scenario);
    if (flags.sigma >= 0.0) {
        scenario.noise = NoiseModel::homogeneous(
            scenario.num_steps(), scenario.num_bs(), flags.sigma);
    }
    if (flags.gamma > 0.0) {
        scenario.path_loss.gamma = flags.gamma;
    }
    scenario.validate();
    return scenario;
}

SearchGrid resolve_grid(const CommonFlags& flags, const Scenario& scenario) {
    SearchGrid grid = default_grid(scenario);
    grid.step = Vec3::Constant(flags.grid_step);
    grid.half_extent.x() = flags.aoi / 2.0;
    grid.half_extent.y() = flags.aoi / 2.0;
    if (flags.mode == "3d") {
        grid.mode = GridMode::volumetric;
        grid.half_extent.z() = flags.aoi / 2.0;
    }
    grid.validate();
    return grid;
}

std::string output_path(const std::string& out_flag,
                        const std::string& default_name) {
    if (!out_flag.empty()) return out_flag;
    const char* dir = std::getenv("UAVLOC_OUT_DIR");
    if (dir && *dir) {
        std::filesystem::create_directories(dir);
        return (std::filesystem::path(dir) / default_name).string();
    }
    return default_name;
}

json vec3_json(const Vec3& v) { return json{v.x(), v.y(), v.z()}; }

json grid_json(const SearchGrid& grid) {
    return json{{"center", vec3_json(grid.center)},
                {"half_extent", vec3_json(grid.half_extent)},
                {"step", vec3_json(grid.step)},
                {"mode", grid.mode == GridMode::planar ? "2d" : "3d"}};
}

char hash_hex_buf[32];
std::string hash_hex(std::uint64_t h) {
    std::snprintf(hash_hex_buf, sizeof hash_hex_buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return hash_hex_buf;
}

int run_scenario_cmd(const std::string& name, const std::string& out) {
    const Scenario scenario = load_scenario(name);
    scenario.validate();
    std::cout << "scenario: " << name << "  (N=" << scenario.num_bs()
              << ", K=" << scenario.num_steps() << ")\n";
    std::cout << "displacements and virtual BS-1 positions:\n";
    for (int k = 0; k < scenario.num_steps(); ++k) {
        const Vec3& du = scenario.trajectory.displacement(k);
        const Vec3 vbs = virtual_bs_position(scenario.base_stations[0],
                                             scenario.trajectory, k);
        std::printf("  k=%-3d du=[%8.1f %8.1f %8.1f]  s'_1=[%8.1f %8.1f %8.1f]\n",
                    k, du.x(), du.y(), du.z(), vbs.x(), vbs.y(), vbs.z());
    }
    if (!out.empty()) {
        save_scenario(scenario, out);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int run_estimate_cmd(const CommonFlags& flags, const std::string& estimator,
                     int repeat, bool refine) {
    const auto kind = parse_estimator(estimator);
    if (!kind) {
        throw CLI::ValidationError("--estimator",
                                   "expected joint|bst|tbs|baseline");
    }
    const Scenario scenario = resolve_scenario(flags);
    const SearchGrid grid = resolve_grid(flags, scenario);
    const MeanRssTable table(grid, scenario.knowledge());
    const EstimateOptions options{refine};

    json out;
    out["estimator"] = estimator_name(*kind);
    out["seed"] = flags.seed;
    out["scenario_hash"] = hash_hex(scenario_hash(scenario));
    out["grid"] = grid_json(grid);

    if (repeat <= 1) {
        const RssMatrix rss = synthesize(scenario, flags.seed);
        const EstimateReport report = estimate(*kind, rss, table, options);
        out["u1_hat_m"] = vec3_json(report.u1_hat);
        out["objective_at_min"] = report.objective_at_min;
        if (report.alpha_hat_dbm) out["alpha_hat_dbm"] = *report.alpha_hat_dbm;
        out["grid_points_evaluated"] = report.grid_points_evaluated;
        out["cost_multiplications"] = report.cost_multiplications;
        out["miss_distance_m"] = (report.u1_hat - scenario.true_u1).norm();
        if (!report.per_component_estimates.empty()) {
            json comps = json::array();
            for (const Vec3& c : report.per_component_estimates)
                comps.push_back(vec3_json(c));
            out["per_component_estimates_m"] = comps;
        }
    } else {
        TrialBatch batch{scenario, *kind,       grid,
                         repeat,   flags.seed, flags.threads,
                         options};
        const BatchResult result = run_batch(batch);
        out["trials"] = repeat;
        out["n_ok"] = result.miss_m.size();
        out["n_failed"] = result.n_failed;
        out["mean_miss_m"] = result.rms();
        out["stderr_m"] = result.stderr_of_rms();
        out["arith_mean_miss_m"] = result.mean();
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_crlb_cmd(const CommonFlags& flags) {
    const Scenario scenario = resolve_scenario(flags);
    if (!scenario.noise.is_homogeneous()) {
        throw CLI::ValidationError("--sigma",
                                   "CRLB requires homogeneous noise");
    }
    const double sigma = scenario.noise.sigma_db(0, 0);
    if (!(sigma > 0.0)) {
        throw CLI::ValidationError("--sigma", "must be positive");
    }
    const CrlbMode mode =
        flags.mode == "3d" ? CrlbMode::volumetric : CrlbMode::planar;
    const auto knowledge = scenario.knowledge();
    const FisherMatrix fim = fisher_matrix(scenario.true_u1, knowledge);
    const CrlbReport report =
        crlb_report(scenario.true_u1, knowledge, sigma, mode);

    json out;
    out["mode"] = flags.mode;
    out["sigma_db"] = sigma;
    out["beta"] = fim.beta;
    out["fisher_g"] = json::array();
    for (int i = 0; i < 3; ++i) {
        out["fisher_g"].push_back(
            {fim.g(i, 0), fim.g(i, 1), fim.g(i, 2)});
    }
    out["condition"] = report.condition;
    out["h"] = report.h;
    out["miss_distance_bound_m"] = report.miss_distance_bound_m;
    out["scenario_hash"] = hash_hex(scenario_hash(scenario));
    std::cout << out.dump(2) << "\n";
    return 0;
}

std::vector<double> linspace(double lo, double hi, double step) {
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
}

int run_sweep_cmd(const CommonFlags& flags, const std::string& kind,
                  int trials, double threshold,
                  const std::vector<double>& sigmas_flag,
                  const std::vector<double>& gammas_flag,
                  const std::string& out_flag) {
    const Scenario scenario = resolve_scenario(flags);
    const SearchGrid grid = resolve_grid(flags, scenario);
    const std::vector<EstimatorKind> estimators = {
        EstimatorKind::joint, EstimatorKind::lcsl_bst, EstimatorKind::lcsl_tbs,
        EstimatorKind::baseline};

    std::vector<double> sigmas =
        sigmas_flag.empty() ? linspace(1.0, 10.0, 1.0) : sigmas_flag;
    std::vector<double> gammas =
        gammas_flag.empty() ? linspace(2.0, 5.0, 0.25) : gammas_flag;

    json meta;
    meta["version"] = kVersion;
    meta["seed"] = flags.seed;
    meta["trials"] = trials;
    meta["scenario_hash"] = hash_hex(scenario_hash(scenario));
    meta["grid"] = grid_json(grid);

    const std::string csv_path = output_path(out_flag, "sweep_" + kind + ".csv");
    const std::string json_path =
        csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv"
            ? csv_path.substr(0, csv_path.size() - 4) + ".json"
            : csv_path + ".json";

    int total_rows = 0;
    int failed_rows = 0;
    std::ostringstream csv;

    if (kind == "cep") {
        const CepMap map = cep_map(scenario, sigmas, gammas, threshold, grid,
                                   trials, flags.seed, flags.threads);
        write_cep_csv(csv, map);
        json cells = json::array();
        for (const CepCell& cell : map.cells) {
            ++total_rows;
            if (cell.n_ok == 0) ++failed_rows;
            cells.push_back({{"sigma_db", cell.sigma_db},
                             {"gamma", cell.gamma},
                             {"cep_m", cell.cep_m},
                             {"below_threshold", cell.below_threshold},
                             {"n_ok", cell.n_ok},
                             {"n_failed", cell.n_failed}});
            std::printf("  sigma=%5.2f gamma=%5.2f  CEP=%8.2f m  %s\n",
                        cell.sigma_db, cell.gamma, cell.cep_m,
                        cell.below_threshold ? "ok" : "above threshold");
        }
        meta["threshold_m"] = threshold;
        meta["cells"] = cells;
    } else {
        SweepResult result;
        if (kind == "sigma") {
            result = sweep_sigma(scenario, sigmas, estimators, grid, trials,
                                 flags.seed, flags.threads);
        } else {
            result = sweep_gamma(scenario, gammas, estimators, grid, trials,
                                 flags.seed, flags.threads);
        }
        write_sweep_csv(csv, result);
        json rows = json::array();
        for (const SweepRow& row : result.rows) {
            ++total_rows;
            if (row.n_ok == 0) ++failed_rows;
            rows.push_back({{result.axis_name, row.axis_value},
                            {"estimator", estimator_name(row.estimator)},
                            {"mean_miss_m", row.mean_miss_m},
                            {"stderr_m", row.stderr_m},
                            {"crlb_m", row.crlb_m},
                            {"n_ok", row.n_ok},
                            {"n_failed", row.n_failed}});
            std::printf("  %s=%5.2f  %-8s  miss=%8.2f m (se %5.2f)  crlb=%7.2f m\n",
                        result.axis_name.c_str(), row.axis_value,
                        estimator_name(row.estimator), row.mean_miss_m,
                        row.stderr_m, row.crlb_m);
        }
        meta["rows"] = rows;
    }

    std::ofstream csv_file(csv_path);
    csv_file << csv.str();
    std::ofstream json_file(json_path);
    json_file << meta.dump(2) << "\n";
    std::cout << "wrote " << csv_path << " and " << json_path << "\n";

    if (total_rows > 0 && failed_rows == total_rows) return kExitTotalFailure;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " - trajectory-aided RSS localization"};
    app.require_subcommand(1);

    // scenario
    auto* scenario_cmd =
        app.add_subcommand("scenario", "generate or validate a scenario file");
    std::string scenario_name = "paper-hexagon";
    std::string scenario_out;
    scenario_cmd->add_option("name", scenario_name,
                             "builtin name or scenario file");
    scenario_cmd->add_option("--out", scenario_out, "write normalized file");

    // estimate
    auto* estimate_cmd =
        app.add_subcommand("estimate", "synthesize one RSS matrix and estimate");
    CommonFlags estimate_flags;
    add_common(estimate_cmd, &estimate_flags);
    std::string estimator = "joint";
    int repeat = 1;
    bool refine = false;
    estimate_cmd->add_option("--estimator", estimator,
                             "joint|bst|tbs|baseline");
    estimate_cmd->add_option("--repeat", repeat,
                             "average miss distance over this many trials");
    estimate_cmd->add_flag("--refine", refine, "one-level grid refinement");

    // crlb
    auto* crlb_cmd = app.add_subcommand("crlb", "joint CRLB report");
    CommonFlags crlb_flags;
    add_common(crlb_cmd, &crlb_flags);

    // sweep
    auto* sweep_cmd =
        app.add_subcommand("sweep", "sigma/gamma/CEP experiment sweeps");
    CommonFlags sweep_flags;
    add_common(sweep_cmd, &sweep_flags);
    std::string sweep_kind;
    int trials = 1000;
    double threshold = 100.0;
    std::vector<double> sigmas, gammas;
    std::string sweep_out;
    sweep_cmd->add_option("kind", sweep_kind, "sigma|gamma|cep")
        ->required()
        ->check(CLI::IsMember({"sigma", "gamma", "cep"}));
    sweep_cmd->add_option("--trials", trials, "trials per point");
    sweep_cmd->add_option("--threshold", threshold, "CEP threshold (m)");
    sweep_cmd->add_option("--sigmas", sigmas, "sigma axis values (dB)");
    sweep_cmd->add_option("--gammas", gammas, "gamma axis values");
    sweep_cmd->add_option("--out", sweep_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*scenario_cmd) return run_scenario_cmd(scenario_name, scenario_out);
        if (*estimate_cmd)
            return run_estimate_cmd(estimate_flags, estimator, repeat, refine);
        if (*crlb_cmd) return run_crlb_cmd(crlb_flags);
        if (*sweep_cmd)
            return run_sweep_cmd(sweep_flags, sweep_kind, trials, threshold,
                                 sigmas, gammas, sweep_out);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DegenerateGeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularFisherError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
