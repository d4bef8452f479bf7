#include "uavloc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "uavloc/rng.hpp"

namespace uavloc {

Trajectory::Trajectory() : displacements_{Vec3::Zero()} {}

Trajectory::Trajectory(std::vector<Vec3> velocities,
                       std::vector<double> intervals_s)
    : velocities_(std::move(velocities)), intervals_s_(std::move(intervals_s)) {
    if (velocities_.size() != intervals_s_.size()) {
        throw std::invalid_argument(
            "trajectory: velocity and interval counts differ");
    }
    for (double dt : intervals_s_) {
        if (!(dt > 0.0)) {
            throw std::invalid_argument(
                "trajectory: intervals must be strictly positive");
        }
    }
    displacements_.reserve(velocities_.size() + 1);
    displacements_.push_back(Vec3::Zero());
    for (std::size_t i = 0; i < velocities_.size(); ++i) {
        displacements_.push_back(displacements_.back() +
                                 velocities_[i] * intervals_s_[i]);
    }
}

const Vec3& Trajectory::displacement(int k) const {
    if (k < 0 || k >= num_steps()) {
        throw std::out_of_range("trajectory: time index out of range");
    }
    return displacements_[static_cast<std::size_t>(k)];
}

NoiseModel NoiseModel::homogeneous(int num_steps, int num_bs, double sigma_db) {
    return NoiseModel{Eigen::MatrixXd::Constant(num_steps, num_bs, sigma_db)};
}

bool NoiseModel::is_homogeneous() const {
    return sigma_db.size() == 0 ||
           (sigma_db.array() == sigma_db(0, 0)).all();
}

ScenarioKnowledge Scenario::knowledge() const {
    return ScenarioKnowledge{base_stations, trajectory, path_loss,
                             noise.sigma_db, d_min_m};
}

void Scenario::validate() const {
    if (base_stations.empty()) {
        throw std::invalid_argument("scenario: at least one base station");
    }
    for (const Vec3& bs : base_stations) {
        if (!bs.allFinite()) {
            throw std::invalid_argument("scenario: non-finite BS coordinate");
        }
    }
    if (!true_u1.allFinite()) {
        throw std::invalid_argument("scenario: non-finite true_u1");
    }
    if (noise.sigma_db.rows() != num_steps() ||
        noise.sigma_db.cols() != num_bs()) {
        throw std::invalid_argument("scenario: sigma matrix dimensions");
    }
    if ((noise.sigma_db.array() < 0.0).any()) {
        throw std::invalid_argument("scenario: negative sigma");
    }
    if (!(path_loss.d0_m > 0.0)) {
        throw std::invalid_argument("scenario: d0 must be positive");
    }
    if (path_loss.gamma < 2.0 || path_loss.gamma > 5.0) {
        throw std::invalid_argument("scenario: gamma outside [2, 5]");
    }
    for (int k = 0; k < num_steps(); ++k) {
        for (const Vec3& bs : base_stations) {
            // throws on degenerate geometry
            (void)distance(true_u1, bs, trajectory, k, d_min_m);
        }
    }
}

Vec3 virtual_bs_position(const Vec3& bs, const Trajectory& trajectory, int k) {
    return bs - trajectory.displacement(k);
}

double distance(const Vec3& u1, const Vec3& bs, const Trajectory& trajectory,
                int k, double d_min_m) {
    const double d = (u1 + trajectory.displacement(k) - bs).norm();
    if (d < d_min_m) {
        throw DegenerateGeometryError(d, d_min_m);
    }
    return d;
}

double mean_rss(const Vec3& u1, const ScenarioKnowledge& knowledge, int k,
                int n) {
    const double d = distance(u1, knowledge.base_stations.at(n),
                              knowledge.trajectory, k, knowledge.d_min_m);
    return 10.0 * knowledge.path_loss.gamma *
           std::log10(knowledge.path_loss.d0_m / d);
}

Eigen::MatrixXd mean_rss_matrix(const Vec3& u1,
                                const ScenarioKnowledge& knowledge) {
    Eigen::MatrixXd a(knowledge.num_steps(), knowledge.num_bs());
    for (int k = 0; k < knowledge.num_steps(); ++k) {
        for (int n = 0; n < knowledge.num_bs(); ++n) {
            a(k, n) = mean_rss(u1, knowledge, k, n);
        }
    }
    return a;
}

RssMatrix synthesize(const Scenario& scenario, std::uint64_t seed) {
    const Eigen::MatrixXd a = mean_rss_matrix(scenario.true_u1,
                                              scenario.knowledge());
    RssMatrix r(scenario.num_steps(), scenario.num_bs());
    GaussianStream noise(seed);
    for (int k = 0; k < scenario.num_steps(); ++k) {
        for (int n = 0; n < scenario.num_bs(); ++n) {
            r(k, n) = scenario.path_loss.alpha_dbm + a(k, n) +
                      scenario.noise.sigma_db(k, n) * noise.next();
        }
    }
    return r;
}

}  // namespace uavloc
