#include "uavloc/crlb.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "uavloc/errors.hpp"

namespace uavloc {

std::array<Eigen::VectorXd, 3> gradient_vectors(
    const Vec3& u1, const ScenarioKnowledge& knowledge) {
    const int num_steps = knowledge.num_steps();
    const int num_bs = knowledge.num_bs();
    const double beta = -10.0 * knowledge.path_loss.gamma / std::log(10.0);
    std::array<Eigen::VectorXd, 3> grad;
    for (auto& g : grad) g.resize(num_steps * num_bs);
    for (int n = 0; n < num_bs; ++n) {
        for (int k = 0; k < num_steps; ++k) {
            const Vec3 diff = u1 + knowledge.trajectory.displacement(k) -
                              knowledge.base_stations[n];
            const double d2 = diff.squaredNorm();
            if (d2 < knowledge.d_min_m * knowledge.d_min_m) {
                throw DegenerateGeometryError(std::sqrt(d2), knowledge.d_min_m);
            }
            const int idx = n * num_steps + k;
            for (int axis = 0; axis < 3; ++axis) {
                grad[axis][idx] = beta * diff[axis] / d2;
            }
        }
    }
    return grad;
}

FisherMatrix fisher_matrix(const Vec3& u1,
                           const ScenarioKnowledge& knowledge) {
    const auto grad = gradient_vectors(u1, knowledge);
    const int num_steps = knowledge.num_steps();
    const int num_bs = knowledge.num_bs();
    const double total = static_cast<double>(num_steps) * num_bs;
    FisherMatrix fim;
    fim.beta = -10.0 * knowledge.path_loss.gamma / std::log(10.0);

    // bilinear form: g_ij = a_i . a_j - (1/NK)(sum a_i)(sum a_j)
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const double gij = grad[i].dot(grad[j]) -
                               grad[i].sum() * grad[j].sum() / total;
            fim.g(i, j) = gij;
            fim.g(j, i) = gij;
        }
    }

    // explicit double sums for p and q
    const double beta2 = fim.beta * fim.beta;
    Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
    Vec3 linear = Vec3::Zero();
    for (int k = 0; k < num_steps; ++k) {
        for (int n = 0; n < num_bs; ++n) {
            const Vec3 diff = u1 + knowledge.trajectory.displacement(k) -
                              knowledge.base_stations[n];
            const double d2 = diff.squaredNorm();
            p += (diff * diff.transpose()) / (d2 * d2);
            linear += diff / d2;
        }
    }
    fim.p = beta2 * p;
    fim.q = (beta2 / total) * (linear * linear.transpose());
    return fim;
}

namespace {

double condition_number(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    const auto& ev = solver.eigenvalues();
    const double lo = ev.cwiseAbs().minCoeff();
    const double hi = ev.cwiseAbs().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace

CrlbReport crlb_report(const Vec3& u1, const ScenarioKnowledge& knowledge,
                       double sigma_db, CrlbMode mode) {
    const FisherMatrix fim = fisher_matrix(u1, knowledge);
    const Eigen::Matrix3d& g = fim.g;
    CrlbReport report;
    report.mode = mode;

    if (mode == CrlbMode::volumetric) {
        report.condition = condition_number(g);
        if (!(report.condition <= 1e12)) {
            throw SingularFisherError(report.condition);
        }
        // cofactor diagonal of the 3x3 inverse
        const double c11 = g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2);
        const double c22 = g(0, 0) * g(2, 2) - g(0, 2) * g(0, 2);
        const double c33 = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
        report.h = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2)) -
                   g(0, 1) * (g(0, 1) * g(2, 2) - g(0, 2) * g(1, 2)) +
                   g(0, 2) * (g(0, 1) * g(1, 2) - g(0, 2) * g(1, 1));
        report.miss_distance_bound_m =
            sigma_db * std::sqrt((c11 + c22 + c33) / report.h);
        report.crlb_matrix = sigma_db * sigma_db * g.inverse();
    } else {
        const Eigen::Matrix2d g2 = g.topLeftCorner<2, 2>();
        report.condition = condition_number(g2);
        if (!(report.condition <= 1e12)) {
            throw SingularFisherError(report.condition);
        }
        report.h = g2(0, 0) * g2(1, 1) - g2(0, 1) * g2(0, 1);
        report.miss_distance_bound_m =
            sigma_db * std::sqrt((g2(0, 0) + g2(1, 1)) / report.h);
        report.crlb_matrix.topLeftCorner<2, 2>() =
            sigma_db * sigma_db * g2.inverse();
    }
    return report;
}

}  // namespace uavloc
