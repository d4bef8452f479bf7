// End-to-end checks of the CLI binary: exit codes, determinism, and the
// stability of emitted file schemas.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(UAVLOC_CLI) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

json json_output(const std::string& args) {
    const RunResult r = run(args);
    REQUIRE(r.exit_code == 0);
    return json::parse(r.output);
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "uavloc_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario subcommand") {
    CHECK(run("scenario paper-hexagon").exit_code == 0);

    SUBCASE("generate-then-load round trip is idempotent") {
        const fs::path a = temp_dir() / "a.json";
        const fs::path b = temp_dir() / "b.json";
        CHECK(run("scenario paper-hexagon --out " + a.string()).exit_code == 0);
        CHECK(run("scenario " + a.string() + " --out " + b.string())
                  .exit_code == 0);
        CHECK(slurp(a) == slurp(b));
    }

    SUBCASE("malformed file exits 2 and names the field") {
        const fs::path bad = temp_dir() / "bad.json";
        std::ofstream(bad) << R"({"base_stations": [[0,0,20]], "alpha_dbm": -30,
                                  "sigma_db": 6, "true_u1": [0,0,100]})";
        const RunResult r = run("scenario " + bad.string());
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("gamma") != std::string::npos);
    }

    SUBCASE("unparseable JSON exits 2") {
        const fs::path bad = temp_dir() / "garbage.json";
        std::ofstream(bad) << "{not json";
        CHECK(run("scenario " + bad.string()).exit_code == 2);
    }
}

TEST_CASE("estimate subcommand") {
    SUBCASE("zero noise recovers the on-grid truth") {
        const json out = json_output("estimate --sigma 0 --seed 1");
        CHECK(out["miss_distance_m"].get<double>() == 0.0);
        CHECK(out["objective_at_min"].get<double>() ==
              doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("same seed gives byte-identical JSON") {
        const RunResult a = run("estimate --sigma 6 --seed 42");
        const RunResult b = run("estimate --sigma 6 --seed 42");
        CHECK(a.exit_code == 0);
        CHECK(a.output == b.output);
    }

    SUBCASE("all estimators run") {
        for (const char* est : {"joint", "bst", "tbs", "baseline"}) {
            const json out = json_output(
                std::string("estimate --sigma 6 --seed 3 --estimator ") + est);
            CHECK(out["estimator"] == est);
        }
    }

    SUBCASE("unknown estimator exits 2") {
        CHECK(run("estimate --estimator nope").exit_code == 2);
    }
}

TEST_CASE("crlb subcommand") {
    SUBCASE("doubling sigma doubles the bound") {
        const double b3 =
            json_output("crlb --sigma 3")["miss_distance_bound_m"];
        const double b6 =
            json_output("crlb --sigma 6")["miss_distance_bound_m"];
        CHECK(b6 == doctest::Approx(2.0 * b3).epsilon(1e-14));
    }

    SUBCASE("collinear 3D scenario exits 3") {
        const fs::path bad = temp_dir() / "collinear.json";
        json j;
        j["base_stations"] = {{500, 0, 20}, {600, 0, 20}, {700, 0, 20}};
        j["gamma"] = 3.3;
        j["alpha_dbm"] = -30;
        j["sigma_db"] = 6;
        j["true_u1"] = {0, 0, 100};
        std::ofstream(bad) << j.dump();
        const RunResult r =
            run("crlb --scenario " + bad.string() + " --mode 3d");
        CHECK(r.exit_code == 3);
    }

    SUBCASE("usage error exits 2") {
        CHECK(run("crlb --sigma -4").exit_code == 2);
    }
}

TEST_CASE("sweep subcommand") {
    const fs::path dir = temp_dir();

    SUBCASE("sigma sweep emits parseable CSV and JSON") {
        const fs::path csv = dir / "sweep.csv";
        const RunResult r = run(
            "sweep sigma --sigmas 4 8 --trials 4 --grid-step 50 --seed 5 "
            "--out " + csv.string());
        CHECK(r.exit_code == 0);
        const std::string text = slurp(csv);
        CHECK(text.rfind("sigma_db,estimator,mean_miss_m", 0) == 0);
        // 2 sigmas x 4 estimators + header
        CHECK(std::count(text.begin(), text.end(), '\n') == 9);

        const json meta = json::parse(slurp(dir / "sweep.json"));
        CHECK(meta["seed"] == 5);
        CHECK(meta["rows"].size() == 8);
        CHECK(meta.contains("scenario_hash"));
    }

    SUBCASE("cep sweep emits a mask consistent with radii") {
        const fs::path csv = dir / "cep.csv";
        const RunResult r = run(
            "sweep cep --sigmas 2 --gammas 3.3 --trials 6 --grid-step 50 "
            "--threshold 100 --seed 5 --out " + csv.string());
        CHECK(r.exit_code == 0);
        const json meta = json::parse(slurp(dir / "cep.json"));
        for (const auto& cell : meta["cells"]) {
            CHECK(cell["below_threshold"].get<bool>() ==
                  (cell["cep_m"].get<double>() < 100.0));
        }
    }

    SUBCASE("invalid kind exits 2") {
        CHECK(run("sweep nope").exit_code == 2);
    }
}
