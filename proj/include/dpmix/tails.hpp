#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpmix/priors.hpp"

namespace dpmix {

// Thresholds of the four polynomial/exponential tail requirements on the
// base measure: location norm exponent 2(r+1), inverse-eigenvalue decay
// constants c1..c3, and the condition-number exponent kappa.
struct TailRequirements {
  double r = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double kappa = 0.0;
  int d = 0;

  double r_threshold() const { return (d - 1) / 2.0; }
  double kappa_threshold() const { return static_cast<double>(d) * (d - 1); }
};

enum class TailStatistic {
  norm_theta,                 // ||theta||
  lambda_max_inv,             // lambda_1(Sigma^{-1}) = 1/lambda_d(Sigma)
  lambda_min_inv_reciprocal,  // 1/lambda_d(Sigma^{-1}) = lambda_1(Sigma)
  condition_number            // lambda_1/lambda_d (same for Sigma and Sigma^{-1})
};

std::string tail_statistic_name(TailStatistic s);
TailStatistic tail_statistic_from_name(const std::string& name);

struct TailEstimate {
  std::string statistic;
  std::vector<double> grid;      // ascending
  std::vector<double> survival;  // empirical P(stat > x), non-increasing
  std::vector<double> stderrs;   // binomial standard errors
  long n_samples = 0;
  double fitted_slope = 0.0;     // over the default window
  double slope_stderr = 0.0;
};

// half-open index window [lo, hi) into the grid
struct FitWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Monte Carlo survival curve of one base-measure statistic.  Sampling is
// split over a fixed number of internal blocks, one RNG stream per block, so
// the result depends on the seed only, never on the worker count.
TailEstimate estimate_survival(const BaseMeasureSpec& spec, TailStatistic stat,
                               const std::vector<double>& grid, long n_samples,
                               std::uint64_t seed, int workers = 0);

// raw draws of the statistic (same stream layout as estimate_survival)
std::vector<double> sample_statistic(const BaseMeasureSpec& spec, TailStatistic stat,
                                     long n_samples, std::uint64_t seed, int workers = 0);

// log-spaced grid construction helpers
std::vector<double> make_log_grid(double lo, double hi, int points);
// grid spanning the empirical quantile range [0.8, 1 - 2e-6] of the draws
std::vector<double> quantile_log_grid(std::vector<double> draws, int points = 50);

// default fitting window: the grid sub-range where survival lies in
// [10/n_samples, 0.1]
FitWindow default_window(const TailEstimate& t);

// Least-squares fit of log survival against {1, log x, log(1+1/x)} over the
// window, weighted by the inverse binomial variance of log survival.  The
// reported slope is the log x coefficient — the asymptotic log-log slope —
// and the third regressor, which vanishes as x grows, absorbs the leading
// pre-asymptotic curvature both condition-number laws exhibit.  Exact power
// laws are reproduced exactly.  Points with survival 0 or 1 carry no usable
// information for the weighted fit and are excluded.
std::pair<double, double> fit_tail_exponent(const TailEstimate& t, const FitWindow& w);

// IW -> (nu - d + 1)/2; spectral -> a; factor/MGP -> none (moment existence
// only, no sharp exponent)
std::optional<double> analytic_condition_number_exponent(const CovariancePrior& p);

struct TailVerdict {
  std::string condition;
  bool pass = false;
  std::string note;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  bool exponential_flag = false;
};

struct TailReport {
  std::vector<TailVerdict> verdicts;
  bool r_threshold_ok = false;
  bool kappa_threshold_ok = false;
  bool all_pass = false;
};

// Diagnostic for super-polynomial decay: refit over a shallow window
// (survival in [0.01, 0.1]) and a deep window (survival in [10/n, 0.01));
// flag when the deep slope is steeper by more than max(1.5, 4 * combined
// standard error).  Power-law tails keep both fits near the common
// asymptote; exponential-type tails steepen without bound.
bool exponential_tail_flag(const TailEstimate& t);

TailReport verify_tail_conditions(const BaseMeasureSpec& spec, const TailRequirements& req,
                                  long n_samples, std::uint64_t seed, int workers = 0);

void write_tail_csv(const std::string& path, const TailEstimate& t,
                    std::optional<double> analytic_exponent);

}  // namespace dpmix
