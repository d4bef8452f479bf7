#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "uavloc/model.hpp"
#include "uavloc/rng.hpp"

using namespace uavloc;
using uavloc::testing::hexagon;

TEST_CASE("displacement basics") {
    Trajectory traj(std::vector<Vec3>(9, Vec3(10, 0, 0)),
                    std::vector<double>(9, 5.0));
    CHECK(traj.displacement(0) == Vec3::Zero());
    CHECK(traj.displacement(9) == Vec3(450, 0, 0));

    Trajectory cancel({Vec3(1, 2, 3), Vec3(-1, -2, -3)}, {1.0, 1.0});
    CHECK(cancel.displacement(2).norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)traj.displacement(10), std::out_of_range);
    CHECK_THROWS_AS((void)traj.displacement(-1), std::out_of_range);
}

TEST_CASE("displacement prefix-sum identity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::vector<Vec3> v;
    std::vector<double> dt;
    for (int i = 0; i < 8; ++i) {
        v.emplace_back(u(rng), u(rng), u(rng));
        dt.push_back(std::abs(u(rng)) + 0.1);
    }
    Trajectory traj(v, dt);
    for (int k = 1; k < traj.num_steps(); ++k) {
        const Vec3 step = traj.displacement(k) - traj.displacement(k - 1);
        CHECK((step - v[k - 1] * dt[k - 1]).norm() < 1e-12);
    }
}

TEST_CASE("trajectory validation") {
    CHECK_THROWS_AS(Trajectory({Vec3(1, 0, 0)}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Trajectory({Vec3(1, 0, 0)}, {0.0}), std::invalid_argument);
}

TEST_CASE("virtual BS position") {
    Trajectory traj(std::vector<Vec3>(9, Vec3(10, 0, 0)),
                    std::vector<double>(9, 5.0));
    const Vec3 bs(500, 0, 20);
    CHECK(virtual_bs_position(bs, traj, 0) == bs);
    CHECK(virtual_bs_position(bs, traj, 1) == Vec3(450, 0, 20));
}

TEST_CASE("virtual BS equivalence with shifted UAV") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    Trajectory traj({Vec3(3, -2, 1), Vec3(-7, 4, 0)}, {2.0, 3.5});
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 u1(u(rng), u(rng), 100.0);
        const Vec3 bs(u(rng) + 2000.0, u(rng), 20.0);
        for (int k = 0; k < traj.num_steps(); ++k) {
            const double via_uav = (u1 + traj.displacement(k) - bs).norm();
            const double via_vbs = (u1 - virtual_bs_position(bs, traj, k)).norm();
            CHECK(via_uav == doctest::Approx(via_vbs).epsilon(1e-14));
        }
    }
}

TEST_CASE("distance") {
    Trajectory still;
    CHECK(distance(Vec3(3, 4, 0), Vec3::Zero(), still, 0) ==
          doctest::Approx(5.0));
    CHECK(distance(Vec3(0, 0, 100), Vec3(0, 0, 20), still, 0) ==
          doctest::Approx(80.0));

    // hexagon corner, one trajectory step of 50 m
    Trajectory traj(std::vector<Vec3>(9, Vec3(10, 0, 0)),
                    std::vector<double>(9, 5.0));
    const double d =
        distance(Vec3(0, 0, 100), Vec3(1000, 0, 20), traj, 1);
    CHECK(d == doctest::Approx(std::sqrt(950.0 * 950.0 + 80.0 * 80.0))
                   .epsilon(1e-12));
    CHECK(d == doctest::Approx(953.3628).epsilon(1e-6));

    CHECK_THROWS_AS(distance(Vec3(0, 0, 0), Vec3(0.5, 0, 0), still, 0, 1.0),
                    DegenerateGeometryError);
}

TEST_CASE("mean RSS") {
    Scenario s = hexagon();
    s.path_loss.gamma = 2.0;
    auto kn = s.knowledge();

    SUBCASE("zero at the reference distance") {
        // put a BS exactly d0 away from u1
        Scenario t = s;
        t.path_loss.d0_m = 80.0;
        t.base_stations[0] = Vec3(0, 0, 20);  // 80 m below u1
        const double a = mean_rss(Vec3(0, 0, 100), t.knowledge(), 0, 0);
        CHECK(a == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("one decade at exponent 2") {
        Scenario t = s;
        t.path_loss.d0_m = 8.0;
        t.base_stations[0] = Vec3(0, 0, 20);
        const double a = mean_rss(Vec3(0, 0, 100), t.knowledge(), 0, 0);
        CHECK(a == doctest::Approx(-20.0).epsilon(1e-12));
    }

    SUBCASE("direct evaluation at the hexagon corner") {
        auto kn33 = hexagon(6.0, 3.3).knowledge();
        const double a = mean_rss(Vec3(0, 0, 100), kn33, 1, 0);
        const double d = std::sqrt(950.0 * 950.0 + 80.0 * 80.0);
        CHECK(a == doctest::Approx(33.0 * std::log10(1.0 / d)).epsilon(1e-12));
        CHECK(a == doctest::Approx(-98.31556).epsilon(1e-6));
    }

    SUBCASE("doubling the distance subtracts 10 gamma log10(2)") {
        Scenario t = s;
        t.path_loss.gamma = 3.7;
        t.base_stations[0] = Vec3(0, 0, 20);
        const double near = mean_rss(Vec3(0, 0, 100), t.knowledge(), 0, 0);
        const double far = mean_rss(Vec3(0, 0, 180), t.knowledge(), 0, 0);
        CHECK(far - near ==
              doctest::Approx(-10.0 * 3.7 * std::log10(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("synthesize") {
    Scenario s = hexagon();

    SUBCASE("noiseless limit reproduces the mean model") {
        s.noise = NoiseModel::homogeneous(s.num_steps(), s.num_bs(), 0.0);
        const RssMatrix r = synthesize(s, 123);
        const Eigen::MatrixXd a = mean_rss_matrix(s.true_u1, s.knowledge());
        CHECK((r - (a.array() + s.path_loss.alpha_dbm).matrix()).norm() ==
              doctest::Approx(0.0));
    }

    SUBCASE("identical seeds give identical matrices") {
        CHECK(synthesize(s, 99) == synthesize(s, 99));
        CHECK(synthesize(s, 99) != synthesize(s, 100));
    }

    SUBCASE("noise is zero mean across seeds") {
        Scenario tiny = s;
        tiny.base_stations.resize(1);
        tiny.trajectory = Trajectory();
        const double sigma = 3.0;
        tiny.noise = NoiseModel::homogeneous(1, 1, sigma);
        const double mean_model =
            tiny.path_loss.alpha_dbm +
            mean_rss(tiny.true_u1, tiny.knowledge(), 0, 0);
        const int n = 100000;
        double sum = 0.0;
        for (int seed = 0; seed < n; ++seed) {
            sum += synthesize(tiny, child_seed(0, seed))(0, 0) - mean_model;
        }
        CHECK(std::abs(sum / n) < 3.0 * sigma / std::sqrt(double(n)));
    }
}

TEST_CASE("scenario validation") {
    Scenario s = hexagon();
    CHECK_NOTHROW(s.validate());

    Scenario bad = s;
    bad.base_stations.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = s;
    bad.path_loss.gamma = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = s;
    bad.true_u1 = bad.base_stations[0];  // coincides with a BS
    CHECK_THROWS_AS(bad.validate(), std::exception);
}

TEST_CASE("child seeds are stable and distinct") {
    CHECK(child_seed(1, 0) == child_seed(1, 0));
    CHECK(child_seed(1, 0) != child_seed(1, 1));
    CHECK(child_seed(1, 0) != child_seed(2, 0));
}
