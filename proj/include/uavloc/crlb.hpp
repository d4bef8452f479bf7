#pragma once

#include <Eigen/Core>
#include <array>

#include "uavloc/model.hpp"

namespace uavloc {

/// Fisher information of the initial position after profiling out the
/// common reference power. g = p - q, where p is the gradient Gram matrix
/// and q the mean-removal correction.
struct FisherMatrix {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    double beta = 0.0;  // -10*gamma/ln 10
};

enum class CrlbMode {
    planar,     ///< altitude known: z row/column removed before inversion
    volumetric  ///< full 3-parameter bound
};

struct CrlbReport {
    /// sigma^2 * G^-1 in m^2. In planar mode the z row/column are zero.
    Eigen::Matrix3d crlb_matrix = Eigen::Matrix3d::Zero();
    double miss_distance_bound_m = 0.0;
    double h = 0.0;  ///< determinant of the inverted block
    double condition = 0.0;
    CrlbMode mode = CrlbMode::planar;
};

/// Partial derivatives of the mean-RSS vector with respect to x1, y1, z1,
/// each of length N*K in vec order (index n*K+k).
std::array<Eigen::VectorXd, 3> gradient_vectors(
    const Vec3& u1, const ScenarioKnowledge& knowledge);

/// g via the bilinear form of the gradient vectors; p and q via the
/// explicit double sums. The two routes agree to rounding.
FisherMatrix fisher_matrix(const Vec3& u1, const ScenarioKnowledge& knowledge);

/// Joint bound for homogeneous noise of sigma_db. The miss-distance bound is
/// sigma * sqrt(sum of the inverse-Fisher diagonal), with the diagonal
/// computed from closed-form cofactors. Throws SingularFisherError when the
/// (sub)matrix condition number exceeds 1e12.
CrlbReport crlb_report(const Vec3& u1, const ScenarioKnowledge& knowledge,
                       double sigma_db, CrlbMode mode = CrlbMode::planar);

}  // namespace uavloc
