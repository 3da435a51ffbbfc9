#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpmix/config.hpp"
#include "dpmix/f0_check.hpp"
#include "dpmix/sampler.hpp"

namespace dpmix {

// Full experiment description: data-generating density, prior/model, MCMC
// budget, the n-grid with per-n replicate count, and the epsilon ball for the
// posterior-mass statistic.  model.H == 0 requests the per-n default
// truncation; mcmc.seed is ignored, per-job seeds derive from `seed`.
struct ExperimentConfig {
  F0Spec f0;
  std::vector<long> n_grid;  // ascending
  long replicates = 1;
  DPMixtureModel model;
  MCMCConfig mcmc;
  double epsilon_ball = 0.3;
  std::uint64_t seed = 0;
  long distance_budget = 10000;
  long f0_check_budget = 20000;
  std::string metric = "hellinger";  // or "l1"
};

// One (n, replicate) outcome row.  hellinger_mean is the mean of the
// per-snapshot posterior distance trace; exceedance_frac is the fraction of
// snapshots whose distance exceeds epsilon_ball.
struct ResultRow {
  long n = 0;
  long replicate = 0;
  double hellinger_mean = 0.0;
  double exceedance_frac = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  F0Report f0_report;
};

// Per-n aggregate: median and interquartile range of the per-replicate mean
// distances, plus the median exceedance fraction.
struct SummaryRow {
  long n = 0;
  double median_distance = 0.0;
  double iqr = 0.0;
  double median_exceedance = 0.0;
};

// Section layout: [f0] (d, mean, cov_scale, file, eta, delta, m_bound),
// [prior] (prior/location keys as documented with parse_base_measure),
// [mcmc] (iterations, burn_in, thin, standardize), [experiment] (n_grid,
// replicates, epsilon, seed, alpha, trunc, distance_budget, f0_check_budget,
// metric).  Unknown keys are errors.
ExperimentConfig parse_experiment_config(const Config& cfg);

// Checks f0 first (throws if any check fails), then fans the (n, replicate)
// jobs out to `workers` threads.  Row order is deterministic and independent
// of the worker count.
ExperimentResult run(const ExperimentConfig& config, int workers = 1);

std::vector<SummaryRow> summarize(const ExperimentResult& result);

// CSV of finite reals with a constant column count; `header` skips line 1.
// Malformed input raises errors naming the offending line.
Eigen::MatrixXd ingest_data(const std::string& path, bool header);

void write_results_csv(const ExperimentResult& result, const std::string& path);
ExperimentResult read_results_csv(const std::string& path);

// JSON manifest embedding the full config (provenance) and the f0 check
// results.
void write_manifest(const ExperimentConfig& config, const ExperimentResult& result,
                    const std::string& path);

}  // namespace dpmix
