#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "uavloc/estimators.hpp"
#include "uavloc/model.hpp"

namespace uavloc {

/// Hexagon simulation scenario: six BSs on the corners of a hexagon
/// centered at the origin with 1 km adjacent spacing at 20 m height, a UAV
/// at 100 m altitude flying [10,0,0] m/s in 5 s steps for K=10 points.
Scenario builtin_hexagon_scenario();

/// Search grid covering a 2 km x 2 km area of interest around the scenario
/// altitude at 10 m spacing, planar mode.
SearchGrid default_grid(const Scenario& scenario);

/// Parses a scenario from JSON. Throws SchemaError naming the offending
/// field. 2D velocities are zero-filled in z; scalar sigma_db is broadcast
/// to the full K x N matrix.
Scenario scenario_from_json(const nlohmann::json& j);

/// Canonical serialization: load(to_json(s)) reproduces to_json(s) exactly.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Loads a scenario by builtin name ("paper-hexagon") or file path.
Scenario load_scenario(const std::string& name_or_path);

void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace uavloc
