#include "uavloc/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavloc {

namespace {

std::vector<int> slice_cells(const Slice& slice, int num_steps, int num_bs) {
    std::vector<int> cells;
    switch (slice.kind) {
        case Slice::Kind::all:
            cells.resize(static_cast<std::size_t>(num_steps) * num_bs);
            for (int c = 0; c < static_cast<int>(cells.size()); ++c)
                cells[c] = c;
            break;
        case Slice::Kind::per_bs:
            if (slice.index < 0 || slice.index >= num_bs)
                throw std::out_of_range("slice: BS index out of range");
            for (int k = 0; k < num_steps; ++k)
                cells.push_back(slice.index * num_steps + k);
            break;
        case Slice::Kind::per_time:
            if (slice.index < 0 || slice.index >= num_steps)
                throw std::out_of_range("slice: time index out of range");
            for (int n = 0; n < num_bs; ++n)
                cells.push_back(n * num_steps + slice.index);
            break;
    }
    if (cells.size() < 2) {
        throw std::invalid_argument(
            "slice selects fewer than two cells; the profile objective is "
            "identically zero");
    }
    return cells;
}

// sigma^-2 weights flattened in vec order (index n*K+k). The noiseless
// limit (all sigma zero) degrades to unit weights; the argmin is unchanged
// by any uniform weight.
Eigen::VectorXd flat_weights(const Eigen::MatrixXd& sigma_db) {
    if ((sigma_db.array() <= 0.0).all()) {
        return Eigen::VectorXd::Ones(sigma_db.size());
    }
    Eigen::MatrixXd w = sigma_db.array().square().inverse();
    return Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
}

Eigen::VectorXd flat_rss(const RssMatrix& rss) {
    Eigen::MatrixXd r = rss;
    return Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
}

// Weighted profile objective from partial sums: sum w res^2 - (sum w res)^2
// / sum w. Clamped at zero against rounding.
double profile_objective(double sw_res, double sw_res2, double sw,
                         double* alpha_out) {
    const double alpha = sw_res / sw;
    if (alpha_out) *alpha_out = alpha;
    const double q = sw_res2 - sw_res * alpha;
    if (std::isnan(q)) return q;  // degenerate cell in the slice
    return q > 0.0 ? q : 0.0;
}

double objective_direct(const Vec3& u1, const Eigen::VectorXd& rvec,
                        const Eigen::VectorXd& wvec,
                        const std::vector<int>& cells,
                        const ScenarioKnowledge& knowledge,
                        double* alpha_out) {
    const int num_steps = knowledge.num_steps();
    double sw_res = 0.0, sw_res2 = 0.0, sw = 0.0;
    for (int c : cells) {
        const int k = c % num_steps;
        const int n = c / num_steps;
        const double res = rvec[c] - mean_rss(u1, knowledge, k, n);
        const double w = wvec[c];
        sw_res += w * res;
        sw_res2 += w * res * res;
        sw += w;
    }
    return profile_objective(sw_res, sw_res2, sw, alpha_out);
}

struct ScanResult {
    int best_node = -1;
    double best_objective = std::numeric_limits<double>::infinity();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    long evaluated = 0;
};

// Row-major scan (x fastest); first strict minimum wins. Nodes with any
// selected cell degenerate evaluate to NaN and are skipped.
ScanResult scan_grid(const MeanRssTable& table, const Eigen::VectorXd& rvec,
                     const Eigen::VectorXd& wvec,
                     const std::vector<int>& cells) {
    ScanResult out;
    const auto& a = table.values();
    const int num_nodes = table.num_nodes();
    for (int i = 0; i < num_nodes; ++i) {
        const double* row = a.data() + static_cast<std::ptrdiff_t>(i) * a.cols();
        double sw_res = 0.0, sw_res2 = 0.0, sw = 0.0;
        for (int c : cells) {
            const double res = rvec[c] - row[c];
            const double w = wvec[c];
            sw_res += w * res;
            sw_res2 += w * res * res;
            sw += w;
        }
        double alpha;
        const double q = profile_objective(sw_res, sw_res2, sw, &alpha);
        if (std::isnan(q)) continue;  // degenerate node
        ++out.evaluated;
        if (q < out.best_objective) {
            out.best_objective = q;
            out.best_node = i;
            out.alpha = alpha;
        }
    }
    return out;
}

// Fine re-search of the +/- one-coarse-step neighborhood at step/10.
void refine_argmin(const MeanRssTable& table, const Eigen::VectorXd& rvec,
                   const Eigen::VectorXd& wvec, const std::vector<int>& cells,
                   Vec3* u_best, double* obj_best, double* alpha_best) {
    const SearchGrid& grid = table.grid();
    const int axes = grid.mode == GridMode::planar ? 2 : 3;
    const Vec3 origin = *u_best;
    Vec3 fine_step = grid.step / 10.0;
    const int span = 10;
    for (int iz = (axes == 3 ? -span : 0); iz <= (axes == 3 ? span : 0); ++iz) {
        for (int iy = -span; iy <= span; ++iy) {
            for (int ix = -span; ix <= span; ++ix) {
                Vec3 u = origin + Vec3(ix * fine_step.x(), iy * fine_step.y(),
                                       iz * fine_step.z());
                double alpha;
                double q;
                try {
                    q = objective_direct(u, rvec, wvec, cells,
                                         table.knowledge(), &alpha);
                } catch (const DegenerateGeometryError&) {
                    continue;
                }
                if (q < *obj_best) {
                    *obj_best = q;
                    *u_best = u;
                    *alpha_best = alpha;
                }
            }
        }
    }
}

struct SingleSearch {
    Vec3 u1_hat;
    double objective;
    double alpha;
    long evaluated;
};

SingleSearch search(const MeanRssTable& table, const Eigen::VectorXd& rvec,
                    const Eigen::VectorXd& wvec, const Slice& slice,
                    bool refine) {
    const auto cells = slice_cells(slice, table.knowledge().num_steps(),
                                   table.knowledge().num_bs());
    ScanResult coarse = scan_grid(table, rvec, wvec, cells);
    if (coarse.best_node < 0) {
        throw DegenerateGeometryError(0.0, table.knowledge().d_min_m);
    }
    SingleSearch out{table.node(coarse.best_node), coarse.best_objective,
                     coarse.alpha, coarse.evaluated};
    if (refine) {
        refine_argmin(table, rvec, wvec, cells, &out.u1_hat, &out.objective,
                      &out.alpha);
    }
    return out;
}

double per_search_multiplications(EstimatorKind kind, int num_steps,
                                  int num_bs) {
    const double k = num_steps, n = num_bs;
    switch (kind) {
        case EstimatorKind::joint:
            return 4.0 * (k * n) * (k * n);
        case EstimatorKind::lcsl_bst:
            return 4.0 * k * k * n;
        case EstimatorKind::lcsl_tbs:
            return 4.0 * k * n * n;
        case EstimatorKind::baseline:
            return 4.0 * n * n;
    }
    return 0.0;
}

}  // namespace

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::joint: return "joint";
        case EstimatorKind::lcsl_bst: return "bst";
        case EstimatorKind::lcsl_tbs: return "tbs";
        case EstimatorKind::baseline: return "baseline";
    }
    return "?";
}

std::optional<EstimatorKind> parse_estimator(const std::string& name) {
    if (name == "joint") return EstimatorKind::joint;
    if (name == "bst" || name == "lcsl-bst") return EstimatorKind::lcsl_bst;
    if (name == "tbs" || name == "lcsl-tbs") return EstimatorKind::lcsl_tbs;
    if (name == "baseline") return EstimatorKind::baseline;
    return std::nullopt;
}

int SearchGrid::nodes_along(int axis) const {
    if (mode == GridMode::planar && axis == 2) return 1;
    return static_cast<int>(std::floor(2.0 * half_extent[axis] / step[axis] +
                                       1e-9)) +
           1;
}

int SearchGrid::num_nodes() const {
    return nodes_along(0) * nodes_along(1) * nodes_along(2);
}

Vec3 SearchGrid::node(int i) const {
    const int nx = nodes_along(0), ny = nodes_along(1);
    const int ix = i % nx;
    const int iy = (i / nx) % ny;
    const int iz = i / (nx * ny);
    Vec3 u = center;
    u.x() += -half_extent.x() + ix * step.x();
    u.y() += -half_extent.y() + iy * step.y();
    if (mode == GridMode::volumetric) {
        u.z() += -half_extent.z() + iz * step.z();
    }
    return u;
}

void SearchGrid::validate() const {
    if (!(step.array() > 0.0).all()) {
        throw std::invalid_argument("grid: steps must be positive");
    }
    if ((half_extent.array() < 0.0).any()) {
        throw std::invalid_argument("grid: negative half extent");
    }
    if (!(half_extent.x() > 0.0 && half_extent.y() > 0.0)) {
        throw std::invalid_argument("grid: horizontal extents must be positive");
    }
}

double alpha_hat(const Eigen::VectorXd& residuals,
                 const Eigen::VectorXd& weights) {
    if (residuals.size() == 0) {
        throw std::invalid_argument("alpha_hat: empty residuals");
    }
    if (residuals.size() != weights.size()) {
        throw std::invalid_argument("alpha_hat: residual/weight size mismatch");
    }
    return residuals.dot(weights) / weights.sum();
}

double objective(const Vec3& u1, const RssMatrix& rss,
                 const ScenarioKnowledge& knowledge, const Slice& slice) {
    const auto cells =
        slice_cells(slice, knowledge.num_steps(), knowledge.num_bs());
    return objective_direct(u1, flat_rss(rss), flat_weights(knowledge.sigma_db),
                            cells, knowledge, nullptr);
}

MeanRssTable::MeanRssTable(const SearchGrid& grid,
                           const ScenarioKnowledge& knowledge)
    : grid_(grid), knowledge_(knowledge) {
    grid_.validate();
    const int num_nodes = grid_.num_nodes();
    const int num_cells = knowledge_.num_steps() * knowledge_.num_bs();
    nodes_.resize(num_nodes);
    a_.resize(num_nodes, num_cells);
    degenerate_.assign(num_nodes, 0);
    const int num_steps = knowledge_.num_steps();
    const double log_scale = 10.0 * knowledge_.path_loss.gamma / std::log(10.0);
    const double log_d0 = std::log(knowledge_.path_loss.d0_m);
    const double d_min2 = knowledge_.d_min_m * knowledge_.d_min_m;
    for (int i = 0; i < num_nodes; ++i) {
        nodes_[i] = grid_.node(i);
        double* row = a_.data() + static_cast<std::ptrdiff_t>(i) * num_cells;
        for (int n = 0; n < knowledge_.num_bs(); ++n) {
            for (int k = 0; k < num_steps; ++k) {
                const Vec3 diff = nodes_[i] +
                                  knowledge_.trajectory.displacement(k) -
                                  knowledge_.base_stations[n];
                const double d2 = diff.squaredNorm();
                if (d2 < d_min2) {
                    row[n * num_steps + k] =
                        std::numeric_limits<double>::quiet_NaN();
                    degenerate_[i] = 1;
                } else {
                    row[n * num_steps + k] =
                        log_scale * (log_d0 - 0.5 * std::log(d2));
                }
            }
        }
    }
}

EstimateReport estimate_joint(const RssMatrix& rss, const MeanRssTable& table,
                              const EstimateOptions& options) {
    const auto rvec = flat_rss(rss);
    const auto wvec = flat_weights(table.knowledge().sigma_db);
    const auto s = search(table, rvec, wvec, Slice::all(), options.refine);
    EstimateReport report;
    report.u1_hat = s.u1_hat;
    report.objective_at_min = s.objective;
    report.alpha_hat_dbm = s.alpha;
    report.grid_points_evaluated = s.evaluated;
    report.cost_multiplications =
        per_search_multiplications(EstimatorKind::joint,
                                   table.knowledge().num_steps(),
                                   table.knowledge().num_bs()) *
        table.num_nodes();
    return report;
}

EstimateReport estimate_lcsl_bst(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options) {
    const auto rvec = flat_rss(rss);
    const auto wvec = flat_weights(table.knowledge().sigma_db);
    const int num_bs = table.knowledge().num_bs();
    EstimateReport report;
    Vec3 fused = Vec3::Zero();
    for (int n = 0; n < num_bs; ++n) {
        const auto s =
            search(table, rvec, wvec, Slice::per_bs(n), options.refine);
        report.per_component_estimates.push_back(s.u1_hat);
        report.objective_at_min += s.objective;
        report.grid_points_evaluated += s.evaluated;
        fused += s.u1_hat;
    }
    report.u1_hat = fused / num_bs;
    report.cost_multiplications =
        per_search_multiplications(EstimatorKind::lcsl_bst,
                                   table.knowledge().num_steps(), num_bs) *
        table.num_nodes();
    return report;
}

EstimateReport estimate_lcsl_tbs(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options) {
    const auto rvec = flat_rss(rss);
    const auto wvec = flat_weights(table.knowledge().sigma_db);
    const int num_steps = table.knowledge().num_steps();
    EstimateReport report;
    Vec3 fused = Vec3::Zero();
    for (int k = 0; k < num_steps; ++k) {
        const auto s =
            search(table, rvec, wvec, Slice::per_time(k), options.refine);
        report.per_component_estimates.push_back(s.u1_hat);
        report.objective_at_min += s.objective;
        report.grid_points_evaluated += s.evaluated;
        fused += s.u1_hat;
    }
    report.u1_hat = fused / num_steps;
    report.cost_multiplications =
        per_search_multiplications(EstimatorKind::lcsl_tbs, num_steps,
                                   table.knowledge().num_bs()) *
        table.num_nodes();
    return report;
}

EstimateReport estimate_baseline(const RssMatrix& rss,
                                 const MeanRssTable& table,
                                 const EstimateOptions& options) {
    const auto rvec = flat_rss(rss);
    const auto wvec = flat_weights(table.knowledge().sigma_db);
    const auto s = search(table, rvec, wvec, Slice::per_time(0),
                          options.refine);
    EstimateReport report;
    report.u1_hat = s.u1_hat;
    report.objective_at_min = s.objective;
    report.alpha_hat_dbm = s.alpha;
    report.grid_points_evaluated = s.evaluated;
    report.cost_multiplications =
        per_search_multiplications(EstimatorKind::baseline,
                                   table.knowledge().num_steps(),
                                   table.knowledge().num_bs()) *
        table.num_nodes();
    return report;
}

EstimateReport estimate(EstimatorKind kind, const RssMatrix& rss,
                        const MeanRssTable& table,
                        const EstimateOptions& options) {
    switch (kind) {
        case EstimatorKind::joint: return estimate_joint(rss, table, options);
        case EstimatorKind::lcsl_bst:
            return estimate_lcsl_bst(rss, table, options);
        case EstimatorKind::lcsl_tbs:
            return estimate_lcsl_tbs(rss, table, options);
        case EstimatorKind::baseline:
            return estimate_baseline(rss, table, options);
    }
    throw std::invalid_argument("unknown estimator");
}

EstimateReport estimate(EstimatorKind kind, const RssMatrix& rss,
                        const ScenarioKnowledge& knowledge,
                        const SearchGrid& grid,
                        const EstimateOptions& options) {
    return estimate(kind, rss, MeanRssTable(grid, knowledge), options);
}

}  // namespace uavloc
