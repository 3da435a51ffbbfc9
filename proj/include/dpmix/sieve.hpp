#pragma once

#include <vector>

#include "dpmix/tails.hpp"

namespace dpmix {

// Parameters of the sieve construction at sample size n.  The scaling helper
// ties M = n, sigma = n^{-1/(2 c2)} and H = floor(C n eps^2 / log n).
struct SieveParams {
  double epsilon = 0.1;
  long H = 1;
  long M = 1;
  double sigma = 1.0;
  double alpha = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double C = 1.0;
  double n = 100.0;
  int d = 1;
};

SieveParams sieve_scaling(double n, double C, double epsilon, double alpha, double c1,
                          double c2, double c3, int d);

// Inputs of the mixture-class entropy bound: H kept components, eigenvalue
// ladder length M, scale floor sigma, resolution epsilon, and per-component
// location shells (a_under, a_bar] with condition-number caps u.
struct EntropyParams {
  long H = 1;
  long M = 1;
  double sigma = 1.0;
  double epsilon = 1.0;
  int d = 1;
  std::vector<double> a_bar;    // outer shell radii, one per component
  std::vector<double> a_under;  // inner shell radii
  std::vector<double> u;        // condition-number caps, >= 1
  double C1 = 1.0;
};

// Log covering-number bound
//   d H (log(a/(sigma eps)) + log M) + H log(C1/eps)
//   + sum_h log[(a_bar_h/(sigma eps/2)+1)^d - (a_under_h/(sigma eps/2)-1)^d]
//   + sum_h (d(d-1)/2) log(2 d u_h / eps^2)
// with a = max_h a_bar_h.
double entropy_bound(const EntropyParams& p);

// Constructive eps-net of the H-simplex in l1: the lattice {k/m : sum k = m}
// with m = ceil(H/(2 eps)).  Covering radius is at most eps.
std::vector<std::vector<double>> simplex_net(long H, double epsilon);
// Cardinality of that lattice, binomial(m+H-1, H-1), as a double (the count
// overflows 64-bit integers already at moderate H/eps).
double simplex_net_size(long H, double epsilon);

// Analytic bound delta^{-d(d-1)/2} on the covering number of the d x d
// orthogonal group at spectral-norm resolution delta.
double orthogonal_net_size_bound(int d, double delta);

// Size bound (a_bar/(sigma eps/2)+1)^d - (a_under/(sigma eps/2)-1)^d for the
// location-shell net.
double shell_net_size_bound(double a_bar, double a_under, double sigma, double epsilon,
                            int d);

struct ComplementBound {
  double first_term = 0.0;   // stick-breaking tail: {e alpha log(1/eps)/H}^H
  double second_term = 0.0;  // H [ exp(-c1 sigma^{-2c2}) + sigma^{-2c3}(1+eps/sqrt d)^{-c3 M} ]
  double total = 0.0;
};

ComplementBound prior_complement_bound(const SieveParams& p);

// Partition cell: per-component location shell index j_h >= 1 and
// condition-number band index l_h >= 0.
struct SieveCell {
  std::vector<long> j;
  std::vector<long> l;
};

// log prod_h [sqrt(n)(j_h-1)]^{-2(r+1)} n^{-1(l_h>=1) 2^{l_h-1} kappa};
// cells with j_h = 1 contribute location factor 1.
double log_cell_prior_mass_bound(const SieveCell& cell, const TailRequirements& req,
                                 double n);
double cell_prior_mass_bound(const SieveCell& cell, const TailRequirements& req, double n);

struct SummabilityResult {
  double log_value = 0.0;  // log of the bounding series (+inf when divergent)
  double value = 0.0;
  bool diverges_r = false;      // r <= (d-1)/2: location series diverges
  bool diverges_kappa = false;  // kappa <= d(d-1): condition-number series diverges
  double K_partial = 0.0;       // truncated sum_j j^{(d-1)/2}(j-1)^{-(r+1)} (j=1 capped at 1)
  double c4 = 0.0;              // 1/2 + 1/(2 c2)
  long H = 0;                   // components kept at this n
};

// Value of the bounding series
//   exp{ (d + c4 d - (r+1))/2 C n eps^2 } S_j^H S_l^H exp{ -(4-c) n eps^2 }
// with S_j the location-shell sum (j = 1 term capped at 1) and S_l the
// condition-number band sum n^{d(d-1)/4} + sum_{l>=1} n^{(d(d-1)/4)2^l - 2^{l-1} kappa/2}.
// Both sums are truncated at (j_max, l_max) and closed with analytic tail
// bounds: an integral bound for the polynomially decaying j-terms and a
// geometric bound (via 2^{l-1} >= l) for the l-terms.
SummabilityResult summability_series(const SieveParams& p, const TailRequirements& req,
                                     double c, long j_max = 50, long l_max = 10);

// Largest admissible sieve constant 2(4-c)/(c4 d + (d-1)(d+1)/2).
double sieve_constant_limit(double c, double c2, int d);

}  // namespace dpmix
