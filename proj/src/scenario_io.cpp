#include "uavloc/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "uavloc/errors.hpp"

namespace uavloc {

using nlohmann::json;

Scenario builtin_hexagon_scenario() {
    Scenario scenario;
    const double radius = 1000.0;  // adjacent spacing equals the circumradius
    const double bs_height = 20.0;
    // exact vertex coordinates; cos/sin of i*60 degrees would leave
    // residuals of ~1e-13 m that break the hexagon's mirror symmetries
    const double h = 0.5 * radius;
    const double s = std::sqrt(3.0) / 2.0 * radius;
    const double xs[6] = {radius, h, -h, -radius, -h, h};
    const double ys[6] = {0.0, s, s, 0.0, -s, -s};
    for (int i = 0; i < 6; ++i) {
        scenario.base_stations.emplace_back(xs[i], ys[i], bs_height);
    }
    const int num_steps = 10;
    scenario.trajectory =
        Trajectory(std::vector<Vec3>(num_steps - 1, Vec3(10.0, 0.0, 0.0)),
                   std::vector<double>(num_steps - 1, 5.0));
    scenario.path_loss = PathLossParams{3.3, 1.0, -30.0};
    scenario.noise = NoiseModel::homogeneous(num_steps, 6, 6.0);
    scenario.true_u1 = Vec3(0.0, 0.0, 100.0);
    return scenario;
}

SearchGrid default_grid(const Scenario& scenario) {
    SearchGrid grid;
    grid.center = Vec3(0.0, 0.0, scenario.true_u1.z());
    grid.half_extent = Vec3(1000.0, 1000.0, 0.0);
    grid.step = Vec3(10.0, 10.0, 10.0);
    grid.mode = GridMode::planar;
    return grid;
}

namespace {

Vec3 parse_vec3(const json& j, const std::string& field, bool allow_2d) {
    if (!j.is_array() || (j.size() != 3 && !(allow_2d && j.size() == 2))) {
        throw SchemaError(field, allow_2d
                                     ? "expected an array of 2 or 3 numbers"
                                     : "expected an array of 3 numbers");
    }
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(field, "non-numeric entry");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw SchemaError(field, "missing or non-numeric");
    }
    return j[field].get<double>();
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Scenario scenario;

    if (!j.contains("base_stations") || !j["base_stations"].is_array() ||
        j["base_stations"].empty()) {
        throw SchemaError("base_stations", "expected a nonempty array");
    }
    for (const auto& bs : j["base_stations"]) {
        scenario.base_stations.push_back(parse_vec3(bs, "base_stations", false));
    }

    std::vector<Vec3> velocities;
    std::vector<double> intervals;
    if (j.contains("velocities")) {
        if (!j["velocities"].is_array()) {
            throw SchemaError("velocities", "expected an array");
        }
        for (const auto& v : j["velocities"]) {
            velocities.push_back(parse_vec3(v, "velocities", true));
        }
    }
    if (j.contains("intervals_s")) {
        if (!j["intervals_s"].is_array()) {
            throw SchemaError("intervals_s", "expected an array");
        }
        for (const auto& dt : j["intervals_s"]) {
            if (!dt.is_number() || !(dt.get<double>() > 0.0)) {
                throw SchemaError("intervals_s",
                                  "entries must be positive numbers");
            }
            intervals.push_back(dt.get<double>());
        }
    }
    if (velocities.size() != intervals.size()) {
        throw SchemaError("intervals_s", "count must match velocities");
    }
    scenario.trajectory = Trajectory(std::move(velocities), std::move(intervals));

    scenario.path_loss.gamma = require_number(j, "gamma");
    scenario.path_loss.d0_m =
        j.contains("d0_m") ? require_number(j, "d0_m") : 1.0;
    scenario.path_loss.alpha_dbm = require_number(j, "alpha_dbm");
    if (j.contains("d_min_m")) {
        scenario.d_min_m = require_number(j, "d_min_m");
    }

    const int num_steps = scenario.num_steps();
    const int num_bs = scenario.num_bs();
    if (!j.contains("sigma_db")) {
        throw SchemaError("sigma_db", "missing");
    }
    const json& sigma = j["sigma_db"];
    if (sigma.is_number()) {
        scenario.noise =
            NoiseModel::homogeneous(num_steps, num_bs, sigma.get<double>());
    } else if (sigma.is_array()) {
        if (static_cast<int>(sigma.size()) != num_steps) {
            throw SchemaError("sigma_db", "expected K rows");
        }
        scenario.noise.sigma_db.resize(num_steps, num_bs);
        for (int k = 0; k < num_steps; ++k) {
            if (!sigma[k].is_array() ||
                static_cast<int>(sigma[k].size()) != num_bs) {
                throw SchemaError("sigma_db", "expected N columns per row");
            }
            for (int n = 0; n < num_bs; ++n) {
                if (!sigma[k][n].is_number()) {
                    throw SchemaError("sigma_db", "non-numeric entry");
                }
                scenario.noise.sigma_db(k, n) = sigma[k][n].get<double>();
            }
        }
    } else {
        throw SchemaError("sigma_db", "expected a number or K x N matrix");
    }

    if (!j.contains("true_u1")) {
        throw SchemaError("true_u1", "missing");
    }
    scenario.true_u1 = parse_vec3(j["true_u1"], "true_u1", false);

    try {
        scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError("scenario", e.what());
    }
    return scenario;
}

json scenario_to_json(const Scenario& scenario) {
    json j;
    j["base_stations"] = json::array();
    for (const Vec3& bs : scenario.base_stations) {
        j["base_stations"].push_back({bs.x(), bs.y(), bs.z()});
    }
    j["velocities"] = json::array();
    for (const Vec3& v : scenario.trajectory.velocities()) {
        j["velocities"].push_back({v.x(), v.y(), v.z()});
    }
    j["intervals_s"] = scenario.trajectory.intervals_s();
    j["gamma"] = scenario.path_loss.gamma;
    j["d0_m"] = scenario.path_loss.d0_m;
    j["alpha_dbm"] = scenario.path_loss.alpha_dbm;
    j["d_min_m"] = scenario.d_min_m;
    if (scenario.noise.is_homogeneous()) {
        j["sigma_db"] = scenario.noise.sigma_db(0, 0);
    } else {
        json rows = json::array();
        for (int k = 0; k < scenario.noise.sigma_db.rows(); ++k) {
            json row = json::array();
            for (int n = 0; n < scenario.noise.sigma_db.cols(); ++n) {
                row.push_back(scenario.noise.sigma_db(k, n));
            }
            rows.push_back(row);
        }
        j["sigma_db"] = rows;
    }
    j["true_u1"] = {scenario.true_u1.x(), scenario.true_u1.y(),
                    scenario.true_u1.z()};
    return j;
}

Scenario load_scenario(const std::string& name_or_path) {
    if (name_or_path == "paper-hexagon") {
        return builtin_hexagon_scenario();
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw SchemaError("file", "cannot open '" + name_or_path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("file", std::string("invalid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("file", "cannot write '" + path + "'");
    }
    out << scenario_to_json(scenario).dump(2) << '\n';
}

}  // namespace uavloc
