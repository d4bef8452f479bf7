#pragma once

#include <random>

#include "uavloc/model.hpp"
#include "uavloc/scenario_io.hpp"

namespace uavloc::testing {

inline Scenario hexagon(double sigma_db = 6.0, double gamma = 3.3) {
    Scenario s = builtin_hexagon_scenario();
    s.noise = NoiseModel::homogeneous(s.num_steps(), s.num_bs(), sigma_db);
    s.path_loss.gamma = gamma;
    return s;
}

/// Small randomized scenario with well-spread geometry (BS heights vary so
/// the 3D Fisher matrix stays well conditioned).
inline Scenario random_scenario(std::mt19937_64& rng, int min_bs = 3,
                                int max_bs = 8, int min_steps = 2,
                                int max_steps = 12) {
    std::uniform_real_distribution<double> xy(-1200.0, 1200.0);
    std::uniform_real_distribution<double> bs_z(0.0, 400.0);
    std::uniform_real_distribution<double> vel(-15.0, 15.0);
    std::uniform_real_distribution<double> dt(1.0, 8.0);
    std::uniform_int_distribution<int> nbs(min_bs, max_bs);
    std::uniform_int_distribution<int> nsteps(min_steps, max_steps);

    Scenario s;
    const int n = nbs(rng);
    for (int i = 0; i < n; ++i) {
        s.base_stations.emplace_back(xy(rng), xy(rng), bs_z(rng));
    }
    const int k = nsteps(rng);
    std::vector<Vec3> velocities;
    std::vector<double> intervals;
    for (int i = 0; i + 1 < k; ++i) {
        velocities.emplace_back(vel(rng), vel(rng), vel(rng) / 10.0);
        intervals.push_back(dt(rng));
    }
    s.trajectory = Trajectory(velocities, intervals);
    s.path_loss.gamma = std::uniform_real_distribution<double>(2.0, 5.0)(rng);
    s.noise = NoiseModel::homogeneous(k, n, 4.0);
    s.true_u1 = Vec3(xy(rng) / 3.0, xy(rng) / 3.0, 100.0);
    return s;
}

inline RssMatrix noiseless_rss(const Scenario& s) {
    return Eigen::MatrixXd::Constant(s.num_steps(), s.num_bs(),
                                     s.path_loss.alpha_dbm) +
           mean_rss_matrix(s.true_u1, s.knowledge());
}

}  // namespace uavloc::testing
