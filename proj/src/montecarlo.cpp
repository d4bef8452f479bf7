#include "uavloc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "uavloc/rng.hpp"

namespace uavloc {

double BatchResult::mean() const {
    if (miss_m.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double v : miss_m) s += v;
    return s / miss_m.size();
}

double BatchResult::stderr_of_mean() const {
    const std::size_t n = miss_m.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean();
    double ss = 0.0;
    for (double v : miss_m) ss += (v - m) * (v - m);
    return std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
}

double BatchResult::rms() const {
    if (miss_m.empty()) return std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (double v : miss_m) ss += v * v;
    return std::sqrt(ss / miss_m.size());
}

double BatchResult::stderr_of_rms() const {
    const std::size_t n = miss_m.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double s2 = 0.0;
    for (double v : miss_m) s2 += v * v;
    const double mean_sq = s2 / n;
    double var_sq = 0.0;
    for (double v : miss_m) {
        const double d = v * v - mean_sq;
        var_sq += d * d;
    }
    var_sq /= (n - 1);
    const double r = std::sqrt(mean_sq);
    return std::sqrt(var_sq / n) / (2.0 * r);
}

BatchResult run_batch(const TrialBatch& batch) {
    if (batch.n_trials < 1) {
        throw std::invalid_argument("run_batch: n_trials must be >= 1");
    }
    batch.scenario.validate();
    const MeanRssTable table(batch.grid, batch.scenario.knowledge());
    std::vector<double> miss(batch.n_trials,
                             std::numeric_limits<double>::quiet_NaN());

    auto run_range = [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const RssMatrix rss =
                synthesize(batch.scenario, child_seed(batch.master_seed, t));
            try {
                const EstimateReport report = estimate(
                    batch.estimator, rss, table, batch.estimate_options);
                miss[t] = (report.u1_hat - batch.scenario.true_u1).norm();
            } catch (const DegenerateGeometryError&) {
                // failed trial, stays NaN
            }
        }
    };

    const int threads = std::max(1, batch.threads);
    if (threads == 1 || batch.n_trials == 1) {
        run_range(0, batch.n_trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (batch.n_trials + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int begin = w * chunk;
            const int end = std::min(batch.n_trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    BatchResult result;
    result.miss_m.reserve(miss.size());
    for (double v : miss) {
        if (std::isnan(v)) {
            ++result.n_failed;
        } else {
            result.miss_m.push_back(v);
        }
    }
    return result;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw std::invalid_argument("percentile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

const SweepRow& SweepResult::row(double axis_value,
                                 EstimatorKind estimator) const {
    for (const SweepRow& r : rows) {
        if (r.estimator == estimator &&
            std::abs(r.axis_value - axis_value) < 1e-12) {
            return r;
        }
    }
    throw std::out_of_range("sweep row not found");
}

namespace {

CrlbMode crlb_mode_for(const SearchGrid& grid) {
    return grid.mode == GridMode::planar ? CrlbMode::planar
                                         : CrlbMode::volumetric;
}

SweepResult sweep_axis(const Scenario& scenario, const std::string& axis_name,
                       const std::vector<double>& axis_values,
                       const std::vector<EstimatorKind>& estimators,
                       const SearchGrid& grid, int n_trials,
                       std::uint64_t seed, int threads) {
    SweepResult result;
    result.axis_name = axis_name;
    for (double value : axis_values) {
        Scenario point = scenario;
        double sigma;
        if (axis_name == "sigma_db") {
            sigma = value;
            point.noise = NoiseModel::homogeneous(point.num_steps(),
                                                  point.num_bs(), value);
        } else {
            point.path_loss.gamma = value;
            sigma = point.noise.sigma_db(0, 0);
        }
        const double bound =
            crlb_report(point.true_u1, point.knowledge(), sigma,
                        crlb_mode_for(grid))
                .miss_distance_bound_m;
        for (EstimatorKind estimator : estimators) {
            TrialBatch batch{point, estimator, grid, n_trials, seed, threads};
            const BatchResult br = run_batch(batch);
            SweepRow row;
            row.axis_value = value;
            row.estimator = estimator;
            row.mean_miss_m = br.rms();
            row.stderr_m = br.stderr_of_rms();
            row.crlb_m = bound;
            row.n_ok = static_cast<int>(br.miss_m.size());
            row.n_failed = br.n_failed;
            result.rows.push_back(row);
        }
    }
    return result;
}

}  // namespace

SweepResult sweep_sigma(const Scenario& scenario,
                        const std::vector<double>& sigma_values_db,
                        const std::vector<EstimatorKind>& estimators,
                        const SearchGrid& grid, int n_trials,
                        std::uint64_t seed, int threads) {
    for (double s : sigma_values_db) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("sweep_sigma: sigma must be positive");
        }
    }
    return sweep_axis(scenario, "sigma_db", sigma_values_db, estimators, grid,
                      n_trials, seed, threads);
}

SweepResult sweep_gamma(const Scenario& scenario,
                        const std::vector<double>& gamma_values,
                        const std::vector<EstimatorKind>& estimators,
                        const SearchGrid& grid, int n_trials,
                        std::uint64_t seed, int threads) {
    for (double g : gamma_values) {
        if (g < 2.0 || g > 5.0) {
            throw std::invalid_argument("sweep_gamma: gamma outside [2, 5]");
        }
    }
    return sweep_axis(scenario, "gamma", gamma_values, estimators, grid,
                      n_trials, seed, threads);
}

const CepCell& CepMap::cell(int sigma_index, int gamma_index) const {
    return cells.at(static_cast<std::size_t>(sigma_index) *
                        gamma_values.size() +
                    gamma_index);
}

CepMap cep_map(const Scenario& scenario,
               const std::vector<double>& sigma_values_db,
               const std::vector<double>& gamma_values, double threshold_m,
               const SearchGrid& grid, int n_trials, std::uint64_t seed,
               int threads) {
    if (sigma_values_db.empty() || gamma_values.empty()) {
        throw std::invalid_argument("cep_map: empty axis range");
    }
    if (!(threshold_m > 0.0)) {
        throw std::invalid_argument("cep_map: threshold must be positive");
    }
    CepMap map;
    map.sigma_values_db = sigma_values_db;
    map.gamma_values = gamma_values;
    map.threshold_m = threshold_m;
    for (double sigma : sigma_values_db) {
        for (double gamma : gamma_values) {
            Scenario point = scenario;
            point.noise = NoiseModel::homogeneous(point.num_steps(),
                                                  point.num_bs(), sigma);
            point.path_loss.gamma = gamma;
            TrialBatch batch{point, EstimatorKind::joint, grid, n_trials, seed,
                             threads};
            const BatchResult br = run_batch(batch);
            CepCell cell;
            cell.sigma_db = sigma;
            cell.gamma = gamma;
            cell.cep_m = br.miss_m.empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : percentile(br.miss_m, 50.0);
            cell.below_threshold = cell.cep_m < threshold_m;
            cell.n_ok = static_cast<int>(br.miss_m.size());
            cell.n_failed = br.n_failed;
            map.cells.push_back(cell);
        }
    }
    return map;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;  // FNV-1a prime
    }
}

void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof v); }

void hash_vec3(std::uint64_t& h, const Vec3& v) {
    hash_double(h, v.x());
    hash_double(h, v.y());
    hash_double(h, v.z());
}

}  // namespace

std::uint64_t scenario_hash(const Scenario& scenario) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
    for (const Vec3& bs : scenario.base_stations) hash_vec3(h, bs);
    for (const Vec3& v : scenario.trajectory.velocities()) hash_vec3(h, v);
    for (double dt : scenario.trajectory.intervals_s()) hash_double(h, dt);
    hash_double(h, scenario.path_loss.gamma);
    hash_double(h, scenario.path_loss.d0_m);
    hash_double(h, scenario.path_loss.alpha_dbm);
    for (int k = 0; k < scenario.noise.sigma_db.rows(); ++k) {
        for (int n = 0; n < scenario.noise.sigma_db.cols(); ++n) {
            hash_double(h, scenario.noise.sigma_db(k, n));
        }
    }
    hash_vec3(h, scenario.true_u1);
    hash_double(h, scenario.d_min_m);
    return h;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << result.axis_name
        << ",estimator,mean_miss_m,stderr_m,crlb_m,n_ok,n_failed\n";
    for (const SweepRow& row : result.rows) {
        out << format_double(row.axis_value) << ','
            << estimator_name(row.estimator) << ','
            << format_double(row.mean_miss_m) << ','
            << format_double(row.stderr_m) << ',' << format_double(row.crlb_m)
            << ',' << row.n_ok << ',' << row.n_failed << '\n';
    }
}

void write_cep_csv(std::ostream& out, const CepMap& map) {
    out << "sigma_db,gamma,cep_m,below_threshold,n_ok,n_failed\n";
    for (const CepCell& cell : map.cells) {
        out << format_double(cell.sigma_db) << ',' << format_double(cell.gamma)
            << ',' << format_double(cell.cep_m) << ','
            << (cell.below_threshold ? 1 : 0) << ',' << cell.n_ok << ','
            << cell.n_failed << '\n';
    }
}

}  // namespace uavloc
