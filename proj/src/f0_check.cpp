#include "dpmix/f0_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpmix {

namespace {

void require_valid(const F0Spec& spec) {
  if (spec.density.components.empty())
    throw std::invalid_argument("f0 check: empty density");
  if (!(spec.eta > 0.0) || !(spec.delta > 0.0))
    throw std::invalid_argument("f0 check: eta and delta must be positive");
}

// coordinate pattern search maximizing f from x0
double pattern_search_max(const MixtureDensity& f, Eigen::VectorXd x, double step) {
  double best = eval_mixture(x, f);
  int guard = 400;
  while (step > 1e-8 && guard-- > 0) {
    bool moved = false;
    for (int k = 0; k < x.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y(k) += sgn * step;
        const double v = eval_mixture(y, f);
        if (v > best) {
          best = v;
          x = std::move(y);
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

// pattern search minimizing f over the closed delta-ball around x
double ball_min(const MixtureDensity& f, const Eigen::VectorXd& x, double delta) {
  const int d = static_cast<int>(x.size());
  double best = eval_mixture(x, f);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d);  // offset from x
  // 2d stencil at the ball boundary picks the refinement start
  for (int k = 0; k < d; ++k) {
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      v(k) = sgn * delta;
      const double val = eval_mixture(x + v, f);
      if (val < best) {
        best = val;
        u = v;
      }
    }
  }
  double step = 0.5 * delta;
  int guard = 400;
  while (step > 1e-8 * delta && guard-- > 0) {
    bool moved = false;
    for (int k = 0; k < d; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd v = u;
        v(k) += sgn * step;
        const double norm = v.norm();
        if (norm > delta) v *= delta / norm;  // project back onto the ball
        const double val = eval_mixture(x + v, f);
        if (val < best) {
          best = val;
          u = std::move(v);
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

template <typename G>
MeanSe mc_mean(long budget, G&& g) {
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < budget; ++i) {
    const double v = g();
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(budget);
  MeanSe r;
  r.mean = sum / n;
  r.se = std::sqrt(std::max(0.0, sumsq / n - r.mean * r.mean) / n);
  return r;
}

void require_budget(long budget) {
  if (budget < 1000) throw std::invalid_argument("f0 check: budget must be >= 1000");
}

}  // namespace

CheckResult check_bounded(const F0Spec& spec) {
  require_valid(spec);
  const MixtureDensity& f = spec.density;
  double sup = 0.0;
  for (const auto& c : f.components) {
    const double step = std::sqrt(c.cov.lambda_max());
    sup = std::max(sup, pattern_search_max(f, c.mean, step));
  }
  CheckResult r;
  r.estimate = sup;
  r.stderr_ = 0.0;
  r.pass = sup <= spec.M;
  return r;
}

CheckResult check_entropy(const F0Spec& spec, long budget, RngStream& rng) {
  require_valid(spec);
  require_budget(budget);
  constexpr double kClip = 700.0;
  long clipped = 0;
  const MeanSe m = mc_mean(budget, [&]() {
    const Eigen::VectorXd x = sample_mixture(spec.density, rng);
    double lf = std::log(eval_mixture(x, spec.density));
    if (!std::isfinite(lf) || std::abs(lf) > kClip) {
      ++clipped;
      lf = std::clamp(std::isfinite(lf) ? lf : -kClip, -kClip, kClip);
    }
    return lf;
  });
  CheckResult r;
  r.estimate = m.mean;
  r.stderr_ = m.se;
  r.pass = std::isfinite(m.mean) && std::isfinite(m.se) &&
           static_cast<double>(clipped) <= 1e-4 * static_cast<double>(budget);
  return r;
}

CheckResult check_local_log_ratio(const F0Spec& spec, long budget, RngStream& rng) {
  require_valid(spec);
  require_budget(budget);
  constexpr double kClip = 700.0;
  long clipped = 0;
  const MeanSe m = mc_mean(budget, [&]() {
    const Eigen::VectorXd x = sample_mixture(spec.density, rng);
    const double fx = eval_mixture(x, spec.density);
    const double inf = ball_min(spec.density, x, spec.delta);
    double lr = std::log(fx) - std::log(inf);
    if (!std::isfinite(lr) || lr > kClip) {
      ++clipped;
      lr = kClip;
    }
    return std::max(0.0, lr);
  });
  CheckResult r;
  r.estimate = m.mean;
  r.stderr_ = m.se;
  r.pass = std::isfinite(m.mean) && std::isfinite(m.se) &&
           static_cast<double>(clipped) <= 1e-4 * static_cast<double>(budget);
  return r;
}

CheckResult check_moment(const F0Spec& spec, long budget, RngStream& rng) {
  require_valid(spec);
  require_budget(budget);
  const double p = 2.0 * (1.0 + spec.eta);
  const MeanSe m = mc_mean(budget, [&]() {
    const Eigen::VectorXd x = sample_mixture(spec.density, rng);
    return std::pow(x.norm(), p);
  });
  CheckResult r;
  r.estimate = m.mean;
  r.stderr_ = m.se;
  r.pass = std::isfinite(m.mean) && std::isfinite(m.se);
  return r;
}

F0Report check_all(const F0Spec& spec, long budget, RngStream& rng) {
  F0Report rep;
  rep.bounded = check_bounded(spec);
  rep.entropy = check_entropy(spec, budget, rng);
  rep.local_log_ratio = check_local_log_ratio(spec, budget, rng);
  rep.moment = check_moment(spec, budget, rng);
  rep.all_pass = rep.bounded.pass && rep.entropy.pass && rep.local_log_ratio.pass &&
                 rep.moment.pass;
  return rep;
}

}  // namespace dpmix
