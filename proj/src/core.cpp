#include "dpmix/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpmix {

namespace {

constexpr double kSymTol = 1e-12;

}  // namespace

SPDMatrix::SPDMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("SPDMatrix: matrix must be square and non-empty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * scale)
    throw std::invalid_argument("SPDMatrix: input exceeds symmetry tolerance");
  m_ = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (m_.rows() <= 3)
    es.computeDirect(m_);
  else
    es.compute(m_);
  if (es.info() != Eigen::Success)
    throw std::domain_error("SPDMatrix: eigendecomposition failed");

  const int d = static_cast<int>(m_.rows());
  // Eigen returns ascending; store descending.
  eigvals_.resize(d);
  eigvecs_.resize(d, d);
  for (int i = 0; i < d; ++i) {
    eigvals_(i) = es.eigenvalues()(d - 1 - i);
    eigvecs_.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  if (eigvals_(d - 1) <= 0.0)
    throw std::domain_error("SPDMatrix: matrix is not positive definite");

  // sign convention: first entry of magnitude > 1e-12 in each column positive
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      if (std::abs(eigvecs_(i, j)) > 1e-12) {
        if (eigvecs_(i, j) < 0.0) eigvecs_.col(j) = -eigvecs_.col(j);
        break;
      }
    }
  }

  llt_.compute(m_);
  if (llt_.info() != Eigen::Success)
    throw std::domain_error("SPDMatrix: Cholesky factorization failed");
  log_det_ = 0.0;
  for (int i = 0; i < d; ++i) log_det_ += 2.0 * std::log(llt_.matrixL()(i, i));
}

GaussianComponent::GaussianComponent(Eigen::VectorXd m, SPDMatrix c)
    : mean(std::move(m)), cov(std::move(c)) {
  if (mean.size() != cov.dim())
    throw std::invalid_argument("GaussianComponent: mean/covariance dimension mismatch");
}

MixtureDensity::MixtureDensity(std::vector<double> w, std::vector<GaussianComponent> comps)
    : weights(std::move(w)), components(std::move(comps)) {
  if (weights.size() != components.size())
    throw std::invalid_argument("MixtureDensity: weight/component count mismatch");
  double total = 0.0;
  for (double wi : weights) {
    if (wi < 0.0) throw std::invalid_argument("MixtureDensity: negative weight");
    total += wi;
  }
  if (total > 1.0 + 1e-12)
    throw std::invalid_argument("MixtureDensity: weights sum beyond one");
  for (const auto& c : components)
    if (c.dim() != components[0].dim())
      throw std::invalid_argument("MixtureDensity: component dimension mismatch");
}

double MixtureDensity::weight_sum() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

std::vector<double> StickBreaking::weights() const {
  std::vector<double> out(sticks.size());
  double carry = 1.0;
  for (std::size_t h = 0; h < sticks.size(); ++h) {
    out[h] = sticks[h] * carry;
    carry *= 1.0 - sticks[h];
  }
  return out;
}

double StickBreaking::remainder() const {
  double carry = 1.0;
  for (double v : sticks) carry *= 1.0 - v;
  return carry;
}

double log_eval_gaussian(const Eigen::VectorXd& x, const GaussianComponent& c) {
  if (x.size() != c.mean.size())
    throw std::invalid_argument("eval_gaussian: dimension mismatch");
  const int d = c.dim();
  const Eigen::VectorXd diff = x - c.mean;
  const double quad = diff.dot(c.cov.solve(diff));
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + c.cov.log_det() + quad);
}

double eval_gaussian(const Eigen::VectorXd& x, const GaussianComponent& c) {
  return std::exp(log_eval_gaussian(x, c));
}

double eval_mixture(const Eigen::VectorXd& x, const MixtureDensity& f) {
  double total = 0.0;
  for (std::size_t h = 0; h < f.components.size(); ++h)
    total += f.weights[h] * eval_gaussian(x, f.components[h]);
  return total;
}

Eigen::VectorXd ordered_eigvals(const SPDMatrix& m) { return m.eigenvalues(); }

double condition_number(const SPDMatrix& m) { return m.condition_number(); }

double kl_zero_mean(const SPDMatrix& s1, const SPDMatrix& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("kl_zero_mean: dimension mismatch");
  const double tr = s1.solve(s2.matrix()).trace();
  const double logdet = s2.log_det() - s1.log_det();
  const double v = 0.5 * (tr - logdet - s1.dim());
  return std::max(0.0, v);
}

Eigen::VectorXd sample_mixture(const MixtureDensity& f, RngStream& rng) {
  if (f.components.empty())
    throw std::invalid_argument("sample_mixture: empty mixture");
  const int h = rng.categorical(f.weights);
  const GaussianComponent& c = f.components[h];
  Eigen::VectorXd z(c.dim());
  for (int i = 0; i < c.dim(); ++i) z(i) = rng.normal();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(c.cov.matrix()).matrixL();
  return c.mean + L * z;
}

}  // namespace dpmix
