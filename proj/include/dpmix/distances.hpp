#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpmix/core.hpp"

namespace dpmix {

enum class DistanceMethod { mc_importance, grid_quadrature };

std::string distance_method_name(DistanceMethod m);

struct DistanceEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  DistanceMethod method = DistanceMethod::mc_importance;
  long n_evals = 0;
};

// Hellinger distance d(f,g) = {int (sqrt f - sqrt g)^2}^{1/2}, range [0, sqrt 2].
// Estimated through d^2 = 2 - 2 int sqrt(f g), with importance samples from the
// defensive mixture (f+g)/2 so the integrand is bounded by 1.  The argument
// pair is put in a canonical order first, which makes the estimate exactly
// symmetric in (f, g).
DistanceEstimate hellinger(const MixtureDensity& f, const MixtureDensity& g, long budget,
                           RngStream& rng);

// L1 distance int |f-g|, range [0,2]; same sampling scheme (integrand bounded
// by 2) and the same exact-symmetry guarantee.
DistanceEstimate l1_distance(const MixtureDensity& f, const MixtureDensity& g, long budget,
                             RngStream& rng);

// KL divergence int f log(f/g), Monte Carlo average under samples from f.
// Log ratios are clipped at +-700; more than 0.01% clipped samples raises
// std::runtime_error (the estimate would be unreliable).
DistanceEstimate kl_mc(const MixtureDensity& f, const MixtureDensity& g, long budget,
                       RngStream& rng);

// Closed-form Bhattacharyya coefficient int sqrt(phi_a phi_b) for Gaussians.
double gaussian_bhattacharyya(const GaussianComponent& a, const GaussianComponent& b);

// sqrt(2 - 2 BC): closed-form Hellinger distance between Gaussians.
double hellinger_gaussian(const GaussianComponent& a, const GaussianComponent& b);

// Upper bound on ||f-g||_1 from the mixture decomposition: components of f
// with index h < H are paired with g's component pairing[h], contributing
//   pi_h(f) * [ sqrt(2/pi)          |theta_f - theta_g| / sqrt(lambda_d(Sigma_g))
//             + { sum_i (lambda_i(Sigma_f)/lambda_i(Sigma_g)
//                        - log lambda_i(Sigma_f)/lambda_i(Sigma_g) - 1) }^{1/2}
//             + { 2 d ||O_f - O_g||_2 lambda_1(Sigma_f)/lambda_d(Sigma_f) }^{1/2} ],
// plus sum_{h<H} |pi_h(f) - pi_{pairing[h]}(g)| and the total unpaired mass of
// both mixtures (leftover components and stick-breaking remainders).
// Eigenvalues are matched by rank (both descending); O is the eigenvector
// matrix under the fixed ordering and sign convention of SPDMatrix.
double l1_mixture_upper_bound(const MixtureDensity& f, const MixtureDensity& g,
                              const std::vector<std::size_t>& pairing, std::size_t H);

struct CsiszarResult {
  double lhs = 0.0;  // ||f-g||_1^2 (MC)
  double rhs = 0.0;  // 2 KL(f||g)   (MC)
  double lhs_stderr = 0.0;
  double rhs_stderr = 0.0;
  bool holds = false;  // lhs <= rhs within 3 combined stderr
};

// Checks ||f-g||_1^2 <= 2 int f log(f/g).
CsiszarResult csiszar_check(const MixtureDensity& f, const MixtureDensity& g, long budget,
                            RngStream& rng);

// Deterministic tensor-grid quadrature (trapezoid rule) for d <= 2; metric is
// one of "hellinger", "l1", "kl".  Grid spans +-10 standard deviations around
// every component of both mixtures.  Reference-grade values for small cases.
DistanceEstimate distance_quadrature(const MixtureDensity& f, const MixtureDensity& g,
                                     const std::string& metric, int points_per_axis = 2001);

}  // namespace dpmix
