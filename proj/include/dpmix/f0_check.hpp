#pragma once

#include "dpmix/core.hpp"

namespace dpmix {

// Candidate true density f0 (a Gaussian mixture, the family every regularity
// condition is provably satisfiable for) with the check parameters: moment
// exponent eta, localization radius delta, claimed sup bound M.
struct F0Spec {
  MixtureDensity density;
  double eta = 1.0;
  double delta = 0.5;
  double M = 1.0;
};

struct CheckResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
};

// sup f0 over component modes plus pattern-search refinement; pass iff <= M
CheckResult check_bounded(const F0Spec& spec);

// MC estimate of int f0 log f0; pass iff finite with finite standard error
CheckResult check_entropy(const F0Spec& spec, long budget, RngStream& rng);

// MC estimate of int f0 log(f0/phi_delta), phi_delta(x) = inf over the
// delta-ball around x, evaluated by a 2d+1 stencil plus constrained
// pattern-search refinement; pass iff finite
CheckResult check_local_log_ratio(const F0Spec& spec, long budget, RngStream& rng);

// MC estimate of E ||X||^{2(1+eta)}; pass iff finite
CheckResult check_moment(const F0Spec& spec, long budget, RngStream& rng);

struct F0Report {
  CheckResult bounded;
  CheckResult entropy;
  CheckResult local_log_ratio;
  CheckResult moment;
  bool all_pass = false;
};

F0Report check_all(const F0Spec& spec, long budget, RngStream& rng);

}  // namespace dpmix
