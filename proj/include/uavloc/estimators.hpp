#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/model.hpp"

namespace uavloc {

enum class GridMode {
    planar,     ///< altitude known, search over x/y only
    volumetric  ///< full 3D search
};

/// Regular search grid centered on `center`. In planar mode z is fixed to
/// center.z. Nodes along each axis run center - half_extent .. center +
/// half_extent inclusive when the extent is a multiple of the step.
struct SearchGrid {
    Vec3 center = Vec3::Zero();
    Vec3 half_extent = Vec3::Zero();
    Vec3 step = Vec3::Ones();
    GridMode mode = GridMode::planar;

    int nodes_along(int axis) const;
    int num_nodes() const;

    /// Node at flat index i; x varies fastest, then y, then z.
    Vec3 node(int i) const;

    void validate() const;
};

/// Which cells of the K x N measurement matrix enter the objective.
struct Slice {
    enum class Kind { all, per_bs, per_time };
    Kind kind = Kind::all;
    int index = 0;  // BS index for per_bs, time index for per_time

    static Slice all() { return {Kind::all, 0}; }
    static Slice per_bs(int n) { return {Kind::per_bs, n}; }
    static Slice per_time(int k) { return {Kind::per_time, k}; }
};

enum class EstimatorKind { joint, lcsl_bst, lcsl_tbs, baseline };

const char* estimator_name(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(const std::string& name);

struct EstimateReport {
    Vec3 u1_hat = Vec3::Zero();
    double objective_at_min = 0.0;
    std::optional<double> alpha_hat_dbm;  // joint/baseline only
    long grid_points_evaluated = 0;
    /// Documented cost model: real multiplications per grid search times the
    /// number of searches performed.
    double cost_multiplications = 0.0;
    /// Per-BS estimates (LCSL-BST) or per-time estimates (LCSL-TBS).
    std::vector<Vec3> per_component_estimates;
};

struct EstimateOptions {
    /// Re-search a +/- one-step neighborhood of the coarse argmin at
    /// step/10. Off by default so results match a single-level grid search.
    bool refine = false;
};

/// Exact minimizer of the weighted least-squares objective over the
/// reference power: the weight-averaged residual. Reduces to the plain mean
/// for homogeneous noise.
double alpha_hat(const Eigen::VectorXd& residuals,
                 const Eigen::VectorXd& weights);

/// Profile objective at a candidate u1: sum over the selected cells of
/// sigma^-2 (r - a - alpha_hat)^2, with alpha_hat fit over the same cells.
/// Throws on degenerate geometry or a slice with fewer than two cells.
double objective(const Vec3& u1, const RssMatrix& rss,
                 const ScenarioKnowledge& knowledge, const Slice& slice);

/// Mean-RSS values precomputed at every grid node, reusable across the
/// trials of a Monte Carlo batch (geometry does not change with noise).
/// Degenerate nodes are flagged and skipped by the searches.
class MeanRssTable {
public:
    MeanRssTable(const SearchGrid& grid, const ScenarioKnowledge& knowledge);

    const SearchGrid& grid() const { return grid_; }
    const ScenarioKnowledge& knowledge() const { return knowledge_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const Vec3& node(int i) const { return nodes_[i]; }

    /// Row i holds a_{k,n} at node i, flattened in vec order (index n*K+k).
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>&
    values() const {
        return a_;
    }
    bool degenerate(int i) const { return degenerate_[i] != 0; }

private:
    SearchGrid grid_;
    ScenarioKnowledge knowledge_;
    std::vector<Vec3> nodes_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a_;
    std::vector<char> degenerate_;
};

/// Joint ML over all K*N measurements.
EstimateReport estimate_joint(const RssMatrix& rss, const MeanRssTable& table,
                              const EstimateOptions& options = {});

/// Per-BS searches along the trajectory, fused by arithmetic mean.
EstimateReport estimate_lcsl_bst(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options = {});

/// Per-time searches across the base stations, fused by arithmetic mean.
EstimateReport estimate_lcsl_tbs(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options = {});

/// Conventional ML without trajectory knowledge: the first time row only.
EstimateReport estimate_baseline(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options = {});

EstimateReport estimate(EstimatorKind kind, const RssMatrix& rss,
                        const MeanRssTable& table,
                        const EstimateOptions& options = {});

/// Convenience overload building the node table on the fly.
EstimateReport estimate(EstimatorKind kind, const RssMatrix& rss,
                        const ScenarioKnowledge& knowledge,
                        const SearchGrid& grid,
                        const EstimateOptions& options = {});

}  // namespace uavloc
