#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace dpmix {

// Seeded random stream with a counter-based splitting rule.
//
// RngStream(master, k) derives stream k of a family deterministically from
// the master seed; streams with distinct k are independent for practical
// purposes and the mapping does not depend on how many streams exist or on
// which thread consumes them.  This is the reproducibility contract used by
// every parallel sampler in the library: results depend on (master, k), never
// on the worker count.
//
// All variate generators construct a fresh distribution object per call so
// no hidden distribution state survives between calls; sequences are
// bit-identical for a fixed platform/standard-library combination.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

  RngStream(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master & 0xffffffffu),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    gen_.seed(seq);
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(gen_);
  }

  // shape/scale parameterization; mean = shape*scale
  double gamma(double shape, double scale = 1.0) {
    if (shape <= 0.0 || scale <= 0.0)
      throw std::invalid_argument("gamma: shape and scale must be positive");
    return std::gamma_distribution<double>(shape, scale)(gen_);
  }

  double chi_squared(double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi_squared: dof must be positive");
    return gamma(dof / 2.0, 2.0);
  }

  // beta(1, alpha) via inverse CDF: V = 1 - U^{1/alpha}
  double beta1(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("beta1: alpha must be positive");
    double u = uniform();
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    return 1.0 - std::pow(u, 1.0 / alpha);
  }

  double beta(double a, double b) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    return x / (x + y);
  }

  // index sampled proportionally to probs (need not be normalized)
  int categorical(const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += p;
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: zero total weight");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dpmix
