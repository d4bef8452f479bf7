#include <doctest.h>

#include <nlohmann/json.hpp>

#include "uavloc/errors.hpp"
#include "uavloc/scenario_io.hpp"

using namespace uavloc;
using nlohmann::json;

TEST_CASE("builtin hexagon matches the reference layout") {
    const Scenario s = builtin_hexagon_scenario();
    CHECK(s.num_bs() == 6);
    CHECK(s.num_steps() == 10);
    for (const Vec3& bs : s.base_stations) {
        CHECK(std::hypot(bs.x(), bs.y()) == doctest::Approx(1000.0));
        CHECK(bs.z() == doctest::Approx(20.0));
    }
    // adjacent spacing equals the circumradius for a regular hexagon
    CHECK((s.base_stations[0] - s.base_stations[1]).head<2>().norm() ==
          doctest::Approx(1000.0));
    CHECK(s.true_u1.z() == doctest::Approx(100.0));
    CHECK(s.path_loss.gamma == doctest::Approx(3.3));
    CHECK(s.noise.is_homogeneous());
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("JSON round trip is canonical") {
    const Scenario s = builtin_hexagon_scenario();
    const json emitted = scenario_to_json(s);
    const Scenario reloaded = scenario_from_json(emitted);
    CHECK(scenario_to_json(reloaded) == emitted);
}

TEST_CASE("2D velocities are zero-filled") {
    json j = scenario_to_json(builtin_hexagon_scenario());
    j["velocities"] = json::array();
    for (int i = 0; i < 9; ++i) j["velocities"].push_back({10.0, 0.0});
    const Scenario s = scenario_from_json(j);
    for (const Vec3& v : s.trajectory.velocities()) {
        CHECK(v.z() == 0.0);
        CHECK(v.x() == doctest::Approx(10.0));
    }
}

TEST_CASE("scalar sigma broadcasts to the full matrix") {
    json j = scenario_to_json(builtin_hexagon_scenario());
    j["sigma_db"] = 4.5;
    const Scenario s = scenario_from_json(j);
    CHECK(s.noise.sigma_db.rows() == 10);
    CHECK(s.noise.sigma_db.cols() == 6);
    CHECK((s.noise.sigma_db.array() == 4.5).all());
}

TEST_CASE("matrix sigma survives the round trip") {
    Scenario s = builtin_hexagon_scenario();
    s.noise.sigma_db(2, 3) = 9.0;
    const json emitted = scenario_to_json(s);
    CHECK(emitted["sigma_db"].is_array());
    const Scenario reloaded = scenario_from_json(emitted);
    CHECK(reloaded.noise.sigma_db(2, 3) == doctest::Approx(9.0));
}

TEST_CASE("schema errors carry the field name") {
    const json good = scenario_to_json(builtin_hexagon_scenario());

    auto expect_field = [&](json j, const char* drop, const char* field) {
        j.erase(drop);
        try {
            (void)scenario_from_json(j);
            FAIL("expected SchemaError for ", field);
        } catch (const SchemaError& e) {
            CHECK(e.field == field);
        }
    };
    expect_field(good, "gamma", "gamma");
    expect_field(good, "sigma_db", "sigma_db");
    expect_field(good, "true_u1", "true_u1");
    expect_field(good, "base_stations", "base_stations");

    json bad = good;
    bad["intervals_s"] = {1.0};
    CHECK_THROWS_AS((void)scenario_from_json(bad), SchemaError);

    bad = good;
    bad["base_stations"][0] = {1.0, "x", 3.0};
    CHECK_THROWS_AS((void)scenario_from_json(bad), SchemaError);
}

TEST_CASE("load_scenario resolves the builtin name and rejects bad paths") {
    CHECK_NOTHROW((void)load_scenario("paper-hexagon"));
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/file.json"),
                    SchemaError);
}
