#include "dpmix/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dpmix {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("sieve: ") + what + " must be > 0");
}

double binomial_double(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

SieveParams sieve_scaling(double n, double C, double epsilon, double alpha, double c1,
                          double c2, double c3, int d) {
  require_positive(n, "n");
  require_positive(C, "C");
  require_positive(epsilon, "epsilon");
  require_positive(c2, "c2");
  if (d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  SieveParams p;
  p.epsilon = epsilon;
  p.alpha = alpha;
  p.c1 = c1;
  p.c2 = c2;
  p.c3 = c3;
  p.C = C;
  p.n = n;
  p.d = d;
  p.M = static_cast<long>(std::llround(n));
  p.sigma = std::pow(n, -1.0 / (2.0 * c2));
  p.H = std::max(1L, static_cast<long>(std::floor(C * n * epsilon * epsilon / std::log(n))));
  return p;
}

double entropy_bound(const EntropyParams& p) {
  require_positive(p.epsilon, "epsilon");
  require_positive(p.sigma, "sigma");
  if (p.H < 1 || p.M < 1) throw std::invalid_argument("sieve: H and M must be >= 1");
  if (p.d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  const std::size_t H = static_cast<std::size_t>(p.H);
  if (p.a_bar.size() != H || p.a_under.size() != H || p.u.size() != H)
    throw std::invalid_argument("sieve: a_bar/a_under/u must each have H entries");
  require_positive(p.C1, "C1");

  double a = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    if (!(p.a_bar[h] > p.a_under[h]) || p.a_under[h] < 0.0)
      throw std::invalid_argument("sieve: need 0 <= a_under < a_bar per component");
    if (p.u[h] < 1.0) throw std::invalid_argument("sieve: condition caps u must be >= 1");
    a = std::max(a, p.a_bar[h]);
  }

  double total = p.d * static_cast<double>(p.H) *
                     (std::log(a / (p.sigma * p.epsilon)) + std::log(static_cast<double>(p.M))) +
                 static_cast<double>(p.H) * std::log(p.C1 / p.epsilon);
  for (std::size_t h = 0; h < H; ++h) {
    total += std::log(shell_net_size_bound(p.a_bar[h], p.a_under[h], p.sigma, p.epsilon, p.d));
    total += 0.5 * p.d * (p.d - 1) * std::log(2.0 * p.d * p.u[h] / (p.epsilon * p.epsilon));
  }
  return total;
}

std::vector<std::vector<double>> simplex_net(long H, double epsilon) {
  if (H < 1) throw std::invalid_argument("sieve: H must be >= 1");
  require_positive(epsilon, "epsilon");
  const long m = static_cast<long>(std::ceil(static_cast<double>(H) / (2.0 * epsilon)));
  std::vector<std::vector<double>> net;
  std::vector<long> k(static_cast<std::size_t>(H), 0);
  // enumerate compositions of m into H nonnegative parts
  long level = 0;
  long remaining = m;
  for (;;) {
    if (level == H - 1) {
      k[static_cast<std::size_t>(level)] = remaining;
      std::vector<double> w(static_cast<std::size_t>(H));
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = static_cast<double>(k[i]) / static_cast<double>(m);
      net.push_back(std::move(w));
      // backtrack to the last level with a positive remainder to decrement
      long lvl = level - 1;
      while (lvl >= 0 && k[static_cast<std::size_t>(lvl)] == 0) --lvl;
      if (lvl < 0) break;
      --k[static_cast<std::size_t>(lvl)];
      remaining = m;
      for (long i = 0; i <= lvl; ++i) remaining -= k[static_cast<std::size_t>(i)];
      level = lvl + 1;
      for (long i = level; i < H - 1; ++i) k[static_cast<std::size_t>(i)] = 0;
    } else {
      k[static_cast<std::size_t>(level)] = remaining;
      remaining = 0;
      ++level;
    }
  }
  return net;
}

double simplex_net_size(long H, double epsilon) {
  if (H < 1) throw std::invalid_argument("sieve: H must be >= 1");
  require_positive(epsilon, "epsilon");
  const long m = static_cast<long>(std::ceil(static_cast<double>(H) / (2.0 * epsilon)));
  return binomial_double(m + H - 1, H - 1);
}

double orthogonal_net_size_bound(int d, double delta) {
  if (d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  require_positive(delta, "delta");
  return std::pow(delta, -0.5 * d * (d - 1));
}

double shell_net_size_bound(double a_bar, double a_under, double sigma, double epsilon,
                            int d) {
  if (!(a_bar > a_under) || a_under < 0.0)
    throw std::invalid_argument("sieve: need 0 <= a_under < a_bar");
  require_positive(sigma, "sigma");
  require_positive(epsilon, "epsilon");
  if (d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  const double s = sigma * epsilon / 2.0;
  return std::pow(a_bar / s + 1.0, d) - std::pow(a_under / s - 1.0, d);
}

ComplementBound prior_complement_bound(const SieveParams& p) {
  require_positive(p.epsilon, "epsilon");
  require_positive(p.sigma, "sigma");
  require_positive(p.alpha, "alpha");
  if (p.H < 1 || p.M < 1) throw std::invalid_argument("sieve: H and M must be >= 1");
  if (p.d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  if (!(p.epsilon < 1.0))
    throw std::invalid_argument("sieve: complement bound needs epsilon < 1");
  const double H = static_cast<double>(p.H);
  ComplementBound b;
  const double base = std::numbers::e * p.alpha * std::log(1.0 / p.epsilon) / H;
  b.first_term = std::pow(base, H);
  const double minv = std::pow(p.sigma, -2.0 * p.c2);
  const double tail_small = std::exp(-p.c1 * minv);
  const double tail_large = std::pow(p.sigma, -2.0 * p.c3) *
                            std::pow(1.0 + p.epsilon / std::sqrt(static_cast<double>(p.d)),
                                     -p.c3 * static_cast<double>(p.M));
  b.second_term = H * (tail_small + tail_large);
  b.total = b.first_term + b.second_term;
  return b;
}

double log_cell_prior_mass_bound(const SieveCell& cell, const TailRequirements& req,
                                 double n) {
  require_positive(n, "n");
  if (cell.j.size() != cell.l.size())
    throw std::invalid_argument("sieve: cell j and l must have equal length");
  double logmass = 0.0;
  for (std::size_t h = 0; h < cell.j.size(); ++h) {
    const long jh = cell.j[h];
    const long lh = cell.l[h];
    if (jh < 1 || lh < 0) throw std::invalid_argument("sieve: need j >= 1 and l >= 0");
    if (jh >= 2)
      logmass += -2.0 * (req.r + 1.0) * std::log(std::sqrt(n) * static_cast<double>(jh - 1));
    if (lh >= 1)
      logmass += -std::pow(2.0, static_cast<double>(lh - 1)) * req.kappa * std::log(n);
  }
  return logmass;
}

double cell_prior_mass_bound(const SieveCell& cell, const TailRequirements& req, double n) {
  return std::exp(log_cell_prior_mass_bound(cell, req, n));
}

SummabilityResult summability_series(const SieveParams& p, const TailRequirements& req,
                                     double c, long j_max, long l_max) {
  if (j_max < 1 || l_max < 1) throw std::invalid_argument("sieve: truncation must be >= 1");
  require_positive(p.n, "n");
  require_positive(p.epsilon, "epsilon");
  require_positive(p.c2, "c2");
  if (p.d != req.d) throw std::invalid_argument("sieve: dimension mismatch with requirements");
  const int d = p.d;
  const double n = p.n;
  const double logn = std::log(n);

  SummabilityResult res;
  res.c4 = 0.5 + 1.0 / (2.0 * p.c2);
  res.H = p.H;
  res.diverges_r = !(req.r > req.r_threshold());
  res.diverges_kappa = !(req.kappa > req.kappa_threshold());

  // location-shell sum over j: term 1 is capped at 1, then
  // j^{(d-1)/2}(j-1)^{-(r+1)} for j >= 2, closed with an integral tail bound
  const double q = 0.5 * (d - 1) - (req.r + 1.0);
  double s_j = 1.0;
  for (long j = 2; j <= j_max; ++j)
    s_j += std::pow(static_cast<double>(j), 0.5 * (d - 1)) *
           std::pow(static_cast<double>(j - 1), -(req.r + 1.0));
  if (!res.diverges_r) {
    const double J = static_cast<double>(j_max);
    const double c0 = std::pow((J + 1.0) / J, 0.5 * (d - 1));
    s_j += c0 * (std::pow(J, q) + std::pow(J, q + 1.0) / (-(q + 1.0)));
  }
  res.K_partial = s_j;

  // condition-number band sum over l; for l >= 1 the exponent is
  // (d(d-1)/4) 2^l - 2^{l-1} kappa/2, geometric tail via 2^{l-1} >= l
  const double dd = static_cast<double>(d) * (d - 1);
  double s_l = std::pow(n, 0.25 * dd);
  for (long l = 1; l <= l_max; ++l) {
    const double pw = std::pow(2.0, static_cast<double>(l));
    s_l += std::exp((0.25 * dd * pw - 0.25 * pw * req.kappa) * logn);
  }
  if (!res.diverges_kappa && dd > 0.0) {
    const double a = 0.5 * dd * logn * (req.kappa / dd - 1.0);
    s_l += std::exp(-a * static_cast<double>(l_max + 1)) / (1.0 - std::exp(-a));
  }

  if (res.diverges_r || res.diverges_kappa) {
    res.log_value = std::numeric_limits<double>::infinity();
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }

  const double ne2 = n * p.epsilon * p.epsilon;
  const double H = static_cast<double>(p.H);
  res.log_value = 0.5 * (d + res.c4 * d - (req.r + 1.0)) * p.C * ne2 - (4.0 - c) * ne2 +
                  H * std::log(s_j) + H * std::log(s_l);
  res.value = std::exp(res.log_value);
  return res;
}

double sieve_constant_limit(double c, double c2, int d) {
  require_positive(c2, "c2");
  if (d < 1) throw std::invalid_argument("sieve: d must be >= 1");
  if (!(c > 0.0) || !(c < 4.0))
    throw std::invalid_argument("sieve: need 0 < c < 4");
  const double c4 = 0.5 + 1.0 / (2.0 * c2);
  return 2.0 * (4.0 - c) / (c4 * d + 0.5 * (d - 1.0) * (d + 1.0));
}

}  // namespace dpmix
