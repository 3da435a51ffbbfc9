#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dpmix/rng.hpp"

namespace dpmix {

// Symmetric positive-definite matrix with cached ordered eigendecomposition.
//
// Construction enforces symmetry: inputs asymmetric by more than 1e-12
// relative tolerance are rejected, smaller asymmetry is averaged away.
// Eigenvalues are stored in decreasing order; eigenvector columns follow the
// same order with the sign fixed so the first entry of magnitude > 1e-12 in
// each column is positive.  All members of a constructed instance are
// immutable, so concurrent reads are safe.
class SPDMatrix {
 public:
  explicit SPDMatrix(const Eigen::MatrixXd& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  // descending
  const Eigen::VectorXd& eigenvalues() const { return eigvals_; }
  // columns ordered to match eigenvalues(), sign convention applied
  const Eigen::MatrixXd& eigenvectors() const { return eigvecs_; }

  double lambda_max() const { return eigvals_(0); }
  double lambda_min() const { return eigvals_(dim() - 1); }
  double condition_number() const { return lambda_max() / lambda_min(); }
  double log_det() const { return log_det_; }

  // solve m * x = b through the Cholesky factor (no explicit inverse)
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

 private:
  Eigen::MatrixXd m_;
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXd eigvecs_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

struct GaussianComponent {
  Eigen::VectorXd mean;
  SPDMatrix cov;

  GaussianComponent(Eigen::VectorXd m, SPDMatrix c);
  int dim() const { return static_cast<int>(mean.size()); }
};

// Truncated stick-breaking mixture.  Weights may sum to less than one; the
// deficit is the remainder mass, carried explicitly (sieve membership checks
// need it) and ignored by eval_mixture.
struct MixtureDensity {
  std::vector<double> weights;
  std::vector<GaussianComponent> components;

  MixtureDensity() = default;
  MixtureDensity(std::vector<double> w, std::vector<GaussianComponent> comps);

  int dim() const { return components.empty() ? 0 : components[0].dim(); }
  double weight_sum() const;
  double remainder() const { return std::max(0.0, 1.0 - weight_sum()); }
};

struct StickBreaking {
  std::vector<double> sticks;  // V_h in (0,1)
  double alpha = 1.0;

  // pi_h = V_h * prod_{k<h} (1 - V_k)
  std::vector<double> weights() const;
  double remainder() const;  // prod_h (1 - V_h)
};

double log_eval_gaussian(const Eigen::VectorXd& x, const GaussianComponent& c);
double eval_gaussian(const Eigen::VectorXd& x, const GaussianComponent& c);
double eval_mixture(const Eigen::VectorXd& x, const MixtureDensity& f);

// ordered (descending) eigenvalues; thin wrapper kept for call-site clarity
Eigen::VectorXd ordered_eigvals(const SPDMatrix& m);
double condition_number(const SPDMatrix& m);

// 0.5 * (tr(s1^{-1} s2) - log det(s1^{-1} s2) - d); zero iff s1 == s2
double kl_zero_mean(const SPDMatrix& s1, const SPDMatrix& s2);

// draw from the mixture with weights normalized to total mass one
Eigen::VectorXd sample_mixture(const MixtureDensity& f, RngStream& rng);

}  // namespace dpmix
