#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "uavloc/errors.hpp"

namespace uavloc {

using Vec3 = Eigen::Vector3d;

/// K x N matrix of RSS measurements in dBm; entry (k, n) is the power
/// received from base station n at trajectory point k.
using RssMatrix = Eigen::MatrixXd;

/// Known flight profile: per-leg velocities and durations. The only unknown
/// of the whole problem is the initial position u1; every later position is
/// u1 plus a known displacement.
class Trajectory {
public:
    /// Stationary single-point trajectory (K = 1).
    Trajectory();

    /// velocities[i] (m/s) held for intervals_s[i] seconds, i = 0..K-2.
    Trajectory(std::vector<Vec3> velocities, std::vector<double> intervals_s);

    int num_steps() const { return static_cast<int>(displacements_.size()); }

    /// Displacement from the initial position at time index k (0-based).
    /// displacement(0) is exactly zero.
    const Vec3& displacement(int k) const;

    const std::vector<Vec3>& velocities() const { return velocities_; }
    const std::vector<double>& intervals_s() const { return intervals_s_; }

private:
    std::vector<Vec3> velocities_;
    std::vector<double> intervals_s_;
    std::vector<Vec3> displacements_;  // prefix sums, [0] = 0
};

/// Log-distance path loss model parameters.
struct PathLossParams {
    double gamma = 3.3;      ///< path loss exponent, typically in [2, 5]
    double d0_m = 1.0;       ///< reference distance
    double alpha_dbm = -30;  ///< mean RSS at d0 (common to all BSs)
};

/// Per-measurement shadowing standard deviations in dB (diagonal covariance).
struct NoiseModel {
    Eigen::MatrixXd sigma_db;  // K x N, all entries > 0 (or 0 for noiseless)

    static NoiseModel homogeneous(int num_steps, int num_bs, double sigma_db);
    bool is_homogeneous() const;
};

/// Everything an estimator is allowed to know: geometry of the base
/// stations, the flight profile, channel parameters, and noise levels.
struct ScenarioKnowledge {
    std::vector<Vec3> base_stations;
    Trajectory trajectory;
    PathLossParams path_loss;
    Eigen::MatrixXd sigma_db;
    double d_min_m = 1.0;

    int num_bs() const { return static_cast<int>(base_stations.size()); }
    int num_steps() const { return trajectory.num_steps(); }
};

/// Full simulation scenario: knowledge plus the ground-truth initial
/// position used to synthesize measurements and score estimates.
struct Scenario {
    std::vector<Vec3> base_stations;
    Trajectory trajectory;
    PathLossParams path_loss;
    NoiseModel noise;
    Vec3 true_u1 = Vec3::Zero();
    double d_min_m = 1.0;

    int num_bs() const { return static_cast<int>(base_stations.size()); }
    int num_steps() const { return trajectory.num_steps(); }

    ScenarioKnowledge knowledge() const;

    /// Throws std::invalid_argument on dimension mismatches, non-positive
    /// parameters, or a true trajectory passing within d_min of a BS.
    void validate() const;
};

/// Position of base station `bs` after absorbing the UAV displacement at
/// time k: the "virtual moving BS" view, s_n - du_k.
Vec3 virtual_bs_position(const Vec3& bs, const Trajectory& trajectory, int k);

/// Euclidean distance between the UAV at time k (starting from u1) and the
/// base station. Throws DegenerateGeometryError below d_min.
double distance(const Vec3& u1, const Vec3& bs, const Trajectory& trajectory,
                int k, double d_min_m = 1.0);

/// Mean RSS excess over the reference power: 10*gamma*log10(d0/d) in dB.
double mean_rss(const Vec3& u1, const ScenarioKnowledge& knowledge, int k,
                int n);

/// K x N matrix of mean RSS terms a_{k,n} for a candidate initial position.
Eigen::MatrixXd mean_rss_matrix(const Vec3& u1,
                                const ScenarioKnowledge& knowledge);

/// Draws one noisy measurement matrix: r = alpha + a + w, with w zero-mean
/// Gaussian per cell. Draws are made in row-major (k outer, n inner) order,
/// so the result is a pure function of (scenario, seed).
RssMatrix synthesize(const Scenario& scenario, std::uint64_t seed);

}  // namespace uavloc
