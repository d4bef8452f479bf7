#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "uavloc/crlb.hpp"
#include "uavloc/estimators.hpp"
#include "uavloc/model.hpp"

namespace uavloc {

struct TrialBatch {
    Scenario scenario;
    EstimatorKind estimator = EstimatorKind::joint;
    SearchGrid grid;
    int n_trials = 1000;
    std::uint64_t master_seed = 0;
    int threads = 1;
    EstimateOptions estimate_options;
};

struct BatchResult {
    std::vector<double> miss_m;  ///< one entry per successful trial
    int n_failed = 0;

    double mean() const;
    double stderr_of_mean() const;  ///< sample std / sqrt(n)

    /// Average miss distance in the RMS sense, sqrt(mean of squared miss):
    /// the delta statistic the CRLB bounds.
    double rms() const;
    double stderr_of_rms() const;  ///< delta method: std(d^2)/(2 rms sqrt(n))
};

/// Runs n_trials synthesize -> estimate rounds. Trial t is seeded with
/// child_seed(master_seed, t), so results are independent of the thread
/// count and of execution order. Failed trials are excluded and counted.
BatchResult run_batch(const TrialBatch& batch);

/// p-th percentile (0..100) with linear interpolation between closest
/// ranks; `values` need not be sorted.
double percentile(std::vector<double> values, double p);

struct SweepRow {
    double axis_value = 0.0;
    EstimatorKind estimator = EstimatorKind::joint;
    double mean_miss_m = 0.0;  ///< RMS average miss distance
    double stderr_m = 0.0;     ///< standard error of the RMS
    double crlb_m = 0.0;
    int n_ok = 0;
    int n_failed = 0;
};

struct SweepResult {
    std::string axis_name;  // "sigma_db" or "gamma"
    std::vector<SweepRow> rows;

    const SweepRow& row(double axis_value, EstimatorKind estimator) const;
};

/// Average miss distance of each estimator versus the shadowing standard
/// deviation, with the joint bound attached per axis point.
SweepResult sweep_sigma(const Scenario& scenario,
                        const std::vector<double>& sigma_values_db,
                        const std::vector<EstimatorKind>& estimators,
                        const SearchGrid& grid, int n_trials,
                        std::uint64_t seed, int threads = 1);

/// Same sweep over the path loss exponent at fixed sigma.
SweepResult sweep_gamma(const Scenario& scenario,
                        const std::vector<double>& gamma_values,
                        const std::vector<EstimatorKind>& estimators,
                        const SearchGrid& grid, int n_trials,
                        std::uint64_t seed, int threads = 1);

struct CepCell {
    double sigma_db = 0.0;
    double gamma = 0.0;
    double cep_m = 0.0;  ///< empirical 50th-percentile miss radius
    bool below_threshold = false;
    int n_ok = 0;
    int n_failed = 0;
};

struct CepMap {
    std::vector<double> sigma_values_db;
    std::vector<double> gamma_values;
    double threshold_m = 100.0;
    std::vector<CepCell> cells;  // sigma-major order

    const CepCell& cell(int sigma_index, int gamma_index) const;
};

/// Empirical CEP of the joint estimator over a (sigma, gamma) grid.
CepMap cep_map(const Scenario& scenario,
               const std::vector<double>& sigma_values_db,
               const std::vector<double>& gamma_values, double threshold_m,
               const SearchGrid& grid, int n_trials, std::uint64_t seed,
               int threads = 1);

/// FNV-1a hash of the canonical scenario serialization; recorded in result
/// metadata so outputs are traceable to their inputs.
std::uint64_t scenario_hash(const Scenario& scenario);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_cep_csv(std::ostream& out, const CepMap& map);

}  // namespace uavloc
