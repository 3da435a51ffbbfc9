#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpmix/core.hpp"
#include "dpmix/priors.hpp"

namespace dpmix {

// Truncated DP mixture model: alpha is the DP mass, base the atom
// distribution, H the stick-breaking truncation level.
struct DPMixtureModel {
  double alpha = 1.0;
  BaseMeasureSpec base;
  long H = 1;
};

// ceil(5 alpha log n), capped at 200
long default_truncation(double alpha, long n);

struct MCMCConfig {
  long iterations = 1000;
  long burn_in = 200;
  long thin = 1;
  std::uint64_t seed = 0;
  bool standardize = false;  // fit on per-column standardized data, map back
};

// Posterior snapshots from the blocked Gibbs sampler.  Each snapshot has
// H + 1 components: the H truncated sticks plus one overflow component drawn
// from the base measure carrying the leftover stick mass, so weights sum to
// one and eval_mixture sees the full predictive mass.
struct PosteriorDraws {
  std::vector<MixtureDensity> snapshots;
  std::vector<long> occupied_counts;  // clusters with >= 1 observation, per snapshot
  std::map<std::string, double> acceptance_rates;  // per Metropolis block
  long n_data = 0;
};

PosteriorDraws fit(const Eigen::MatrixXd& data, const DPMixtureModel& model,
                   const MCMCConfig& cfg);

// Posterior-mean predictive density: average of eval_mixture over snapshots.
double predictive_density(const PosteriorDraws& draws, const Eigen::VectorXd& x);

// Per-snapshot distance to f0 (Monte Carlo, `budget` draws each).  Metric is
// "hellinger" (default) or "l1".
std::vector<double> posterior_distance_trace(const PosteriorDraws& draws,
                                             const MixtureDensity& f0, long budget,
                                             RngStream& rng,
                                             const std::string& metric = "hellinger");

// --- Geweke joint-distribution test utilities ------------------------------
//
// Both samplers report the same statistic vector
//   (pi_1, lambda_1(Sigma_1), theta_1[0], and their squares)
// so the marginal-conditional (exact prior draws) and successive-conditional
// (Gibbs transition with data regeneration) runs can be compared by z-score.

struct GewekeStats {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> se;
  long rounds = 0;
};

GewekeStats geweke_marginal_conditional(const DPMixtureModel& model, long rounds,
                                        std::uint64_t seed);
GewekeStats geweke_successive_conditional(const DPMixtureModel& model, long n_data,
                                          long rounds, std::uint64_t seed);
std::vector<double> geweke_z_scores(const GewekeStats& a, const GewekeStats& b);

}  // namespace dpmix
