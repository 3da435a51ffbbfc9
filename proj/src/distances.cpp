#include "dpmix/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dpmix {

namespace {

void require_same_dim(const MixtureDensity& f, const MixtureDensity& g) {
  if (f.dim() != g.dim())
    throw std::invalid_argument("distance: mixture dimensions differ");
  if (f.components.empty() || g.components.empty())
    throw std::invalid_argument("distance: empty mixture");
}

void require_budget(long budget) {
  if (budget < 10000) throw std::invalid_argument("distance: budget must be >= 10^4");
}

double log_eval_mixture(const Eigen::VectorXd& x, const MixtureDensity& f) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(f.components.size());
  for (std::size_t h = 0; h < f.components.size(); ++h) {
    const double w = f.weights[h];
    if (w <= 0.0) {
      terms.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const double t = std::log(w) + log_eval_gaussian(x, f.components[h]);
    terms.push_back(t);
    best = std::max(best, t);
  }
  if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

// Deterministic total order on mixtures; used to canonicalize argument order
// so the symmetric estimators return bit-identical values under a swap.
bool mixture_canonical_less(const MixtureDensity& a, const MixtureDensity& b) {
  if (a.components.size() != b.components.size())
    return a.components.size() < b.components.size();
  for (std::size_t h = 0; h < a.components.size(); ++h) {
    if (a.weights[h] != b.weights[h]) return a.weights[h] < b.weights[h];
    const auto& ca = a.components[h];
    const auto& cb = b.components[h];
    for (int i = 0; i < ca.dim(); ++i)
      if (ca.mean(i) != cb.mean(i)) return ca.mean(i) < cb.mean(i);
    for (int r = 0; r < ca.dim(); ++r)
      for (int c = 0; c < ca.dim(); ++c)
        if (ca.cov.matrix()(r, c) != cb.cov.matrix()(r, c))
          return ca.cov.matrix()(r, c) < cb.cov.matrix()(r, c);
  }
  return false;
}

struct StratumStats {
  double mean = 0.0;
  double var_of_mean = 0.0;
};

// Stratified importance sampling from m = (f+g)/2: half the budget drawn from
// each mixture, integrand phi evaluated against m.  The estimate is
// (mean over f-draws + mean over g-draws)/2 with the matching variance.
template <typename Phi>
DistanceEstimate stratified_estimate(const MixtureDensity& f, const MixtureDensity& g,
                                     long budget, RngStream& rng, Phi phi) {
  const long nf = budget / 2;
  const long ng = budget - nf;
  StratumStats strata[2];
  const MixtureDensity* sources[2] = {&f, &g};
  const long counts[2] = {nf, ng};
  for (int s = 0; s < 2; ++s) {
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < counts[s]; ++i) {
      const Eigen::VectorXd x = sample_mixture(*sources[s], rng);
      const double lf = log_eval_mixture(x, f);
      const double lg = log_eval_mixture(x, g);
      const double v = phi(lf, lg);
      sum += v;
      sumsq += v * v;
    }
    const double n = static_cast<double>(counts[s]);
    strata[s].mean = sum / n;
    const double var = std::max(0.0, sumsq / n - strata[s].mean * strata[s].mean);
    strata[s].var_of_mean = var / n;
  }
  DistanceEstimate e;
  e.value = 0.5 * (strata[0].mean + strata[1].mean);
  e.stderr_ = 0.5 * std::sqrt(strata[0].var_of_mean + strata[1].var_of_mean);
  e.method = DistanceMethod::mc_importance;
  e.n_evals = budget;
  return e;
}

// |f-g|/m with m = (f+g)/2, computed from log densities; bounded by 2
double l1_integrand(double lf, double lg) {
  if (!std::isfinite(lf) && !std::isfinite(lg)) return 0.0;
  const double hi = std::max(lf, lg);
  const double lo = std::min(lf, lg);
  const double r = std::exp(lo - hi);  // in [0,1]
  return 2.0 * (1.0 - r) / (1.0 + r);
}

// sqrt(f g)/m, bounded by 1
double bc_integrand(double lf, double lg) {
  if (!std::isfinite(lf) || !std::isfinite(lg)) return 0.0;
  const double hi = std::max(lf, lg);
  const double lo = std::min(lf, lg);
  const double r = std::exp(lo - hi);
  return 2.0 * std::sqrt(r) / (1.0 + r);
}

}  // namespace

std::string distance_method_name(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::mc_importance: return "mc_importance";
    case DistanceMethod::grid_quadrature: return "grid_quadrature";
  }
  throw std::logic_error("unreachable");
}

DistanceEstimate hellinger(const MixtureDensity& f, const MixtureDensity& g, long budget,
                           RngStream& rng) {
  require_same_dim(f, g);
  require_budget(budget);
  const bool swap = mixture_canonical_less(g, f);
  const MixtureDensity& a = swap ? g : f;
  const MixtureDensity& b = swap ? f : g;
  DistanceEstimate bc = stratified_estimate(a, b, budget, rng,
                                            [](double lf, double lg) { return bc_integrand(lf, lg); });
  const double d2 = std::max(0.0, 2.0 - 2.0 * bc.value);
  const double se_d2 = 2.0 * bc.stderr_;
  DistanceEstimate e;
  e.value = std::sqrt(d2);
  // delta method se(d) = se(d^2)/(2 d); near zero fall back to sqrt scale
  e.stderr_ = e.value > std::sqrt(se_d2) ? se_d2 / (2.0 * e.value) : std::sqrt(se_d2);
  e.method = DistanceMethod::mc_importance;
  e.n_evals = budget;
  return e;
}

DistanceEstimate l1_distance(const MixtureDensity& f, const MixtureDensity& g, long budget,
                             RngStream& rng) {
  require_same_dim(f, g);
  require_budget(budget);
  const bool swap = mixture_canonical_less(g, f);
  const MixtureDensity& a = swap ? g : f;
  const MixtureDensity& b = swap ? f : g;
  return stratified_estimate(a, b, budget, rng,
                             [](double lf, double lg) { return l1_integrand(lf, lg); });
}

DistanceEstimate kl_mc(const MixtureDensity& f, const MixtureDensity& g, long budget,
                       RngStream& rng) {
  require_same_dim(f, g);
  require_budget(budget);
  constexpr double kClip = 700.0;
  double sum = 0.0, sumsq = 0.0;
  long clipped = 0;
  for (long i = 0; i < budget; ++i) {
    const Eigen::VectorXd x = sample_mixture(f, rng);
    double r = log_eval_mixture(x, f) - log_eval_mixture(x, g);
    if (!std::isfinite(r) || std::abs(r) > kClip) {
      ++clipped;
      r = std::clamp(std::isfinite(r) ? r : (r > 0 ? kClip : -kClip), -kClip, kClip);
    }
    sum += r;
    sumsq += r * r;
  }
  if (static_cast<double>(clipped) > 1e-4 * static_cast<double>(budget))
    throw std::runtime_error("kl_mc: more than 0.01% of log ratios clipped; estimate unreliable");
  const double n = static_cast<double>(budget);
  DistanceEstimate e;
  e.value = sum / n;
  const double var = std::max(0.0, sumsq / n - e.value * e.value);
  e.stderr_ = std::sqrt(var / n);
  e.method = DistanceMethod::mc_importance;
  e.n_evals = budget;
  return e;
}

double gaussian_bhattacharyya(const GaussianComponent& a, const GaussianComponent& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("gaussian_bhattacharyya: dimension mismatch");
  const Eigen::MatrixXd bar = 0.5 * (a.cov.matrix() + b.cov.matrix());
  const SPDMatrix sbar(bar);
  const Eigen::VectorXd dm = a.mean - b.mean;
  const double quad = dm.dot(sbar.solve(dm));
  const double logbc =
      0.25 * a.cov.log_det() + 0.25 * b.cov.log_det() - 0.5 * sbar.log_det() - 0.125 * quad;
  return std::exp(logbc);
}

double hellinger_gaussian(const GaussianComponent& a, const GaussianComponent& b) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * gaussian_bhattacharyya(a, b)));
}

double l1_mixture_upper_bound(const MixtureDensity& f, const MixtureDensity& g,
                              const std::vector<std::size_t>& pairing, std::size_t H) {
  require_same_dim(f, g);
  if (H > f.components.size())
    throw std::invalid_argument("l1_mixture_upper_bound: H exceeds component count of f");
  if (pairing.size() < H)
    throw std::invalid_argument("l1_mixture_upper_bound: pairing shorter than H");
  std::vector<bool> used(g.components.size(), false);
  const int d = f.dim();
  double bound = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t k = pairing[h];
    if (k >= g.components.size())
      throw std::invalid_argument("l1_mixture_upper_bound: pairing index out of range");
    if (used[k])
      throw std::invalid_argument("l1_mixture_upper_bound: pairing maps two components to one");
    used[k] = true;

    const GaussianComponent& cf = f.components[h];
    const GaussianComponent& cg = g.components[k];
    const double location =
        std::sqrt(2.0 / std::numbers::pi) * (cf.mean - cg.mean).norm() /
        std::sqrt(cg.cov.lambda_min());
    double eig = 0.0;
    for (int i = 0; i < d; ++i) {
      const double x = cf.cov.eigenvalues()(i) / cg.cov.eigenvalues()(i);
      eig += x - std::log(x) - 1.0;
    }
    const Eigen::MatrixXd diff = cf.cov.eigenvectors() - cg.cov.eigenvectors();
    const double onorm = diff.jacobiSvd().singularValues()(0);
    const double rot = 2.0 * d * onorm * cf.cov.condition_number();
    bound += f.weights[h] * (location + std::sqrt(eig) + std::sqrt(rot));
    bound += std::abs(f.weights[h] - g.weights[k]);
  }
  for (std::size_t h = H; h < f.components.size(); ++h) bound += f.weights[h];
  bound += f.remainder();
  for (std::size_t k = 0; k < g.components.size(); ++k)
    if (!used[k]) bound += g.weights[k];
  bound += g.remainder();
  return bound;
}

CsiszarResult csiszar_check(const MixtureDensity& f, const MixtureDensity& g, long budget,
                            RngStream& rng) {
  const DistanceEstimate l1 = l1_distance(f, g, budget, rng);
  const DistanceEstimate kl = kl_mc(f, g, budget, rng);
  CsiszarResult r;
  r.lhs = l1.value * l1.value;
  r.rhs = 2.0 * kl.value;
  r.lhs_stderr = 2.0 * l1.value * l1.stderr_;
  r.rhs_stderr = 2.0 * kl.stderr_;
  const double tol = 3.0 * std::hypot(r.lhs_stderr, r.rhs_stderr);
  r.holds = r.lhs <= r.rhs + tol;
  return r;
}

DistanceEstimate distance_quadrature(const MixtureDensity& f, const MixtureDensity& g,
                                     const std::string& metric, int points_per_axis) {
  require_same_dim(f, g);
  const int d = f.dim();
  if (d > 2)
    throw std::invalid_argument("distance_quadrature: only d <= 2 supported");
  if (points_per_axis < 3)
    throw std::invalid_argument("distance_quadrature: need at least 3 points per axis");

  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const MixtureDensity* mix : {&f, &g}) {
    for (const auto& c : mix->components) {
      for (int k = 0; k < d; ++k) {
        const double sd = std::sqrt(c.cov.matrix()(k, k));
        lo(k) = std::min(lo(k), c.mean(k) - 10.0 * sd);
        hi(k) = std::max(hi(k), c.mean(k) + 10.0 * sd);
      }
    }
  }

  auto integrand = [&](const Eigen::VectorXd& x) {
    const double lf = log_eval_mixture(x, f);
    const double lg = log_eval_mixture(x, g);
    if (metric == "l1") {
      const double m = 0.5 * (std::exp(lf) + std::exp(lg));
      return m * l1_integrand(lf, lg);
    }
    if (metric == "hellinger") {
      const double sf = std::exp(0.5 * lf);
      const double sg = std::exp(0.5 * lg);
      return (sf - sg) * (sf - sg);
    }
    if (metric == "kl") {
      const double fv = std::exp(lf);
      return fv > 0.0 ? fv * (lf - lg) : 0.0;
    }
    throw std::invalid_argument("distance_quadrature: unknown metric '" + metric + "'");
  };

  const int n = points_per_axis;
  double total = 0.0;
  long evals = 0;
  if (d == 1) {
    const double hstep = (hi(0) - lo(0)) / (n - 1);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(1);
      x(0) = lo(0) + i * hstep;
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      total += w * integrand(x);
      ++evals;
    }
    total *= hstep;
  } else {
    const double h0 = (hi(0) - lo(0)) / (n - 1);
    const double h1 = (hi(1) - lo(1)) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd x(2);
        x(0) = lo(0) + i * h0;
        x(1) = lo(1) + j * h1;
        const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        row += wj * integrand(x);
        ++evals;
      }
      total += wi * row;
    }
    total *= h0 * h1;
  }

  DistanceEstimate e;
  e.value = metric == "hellinger" ? std::sqrt(std::max(0.0, total)) : total;
  e.stderr_ = 0.0;
  e.method = DistanceMethod::grid_quadrature;
  e.n_evals = evals;
  return e;
}

}  // namespace dpmix
