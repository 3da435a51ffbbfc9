#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpmix/config.hpp"
#include "dpmix/core.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

// Location prior: theta ~ N(m, B) with either a fixed B or the hierarchical
// form B ~ IW(B0, nu_B), under which the theta marginal is multivariate
// Student-t (heavy-tailed, the case the polynomial tail condition targets).
struct LocationPriorSpec {
  Eigen::VectorXd m;
  bool hierarchical = true;
  Eigen::MatrixXd scale;  // B0 when hierarchical, B when fixed
  double nu_B = 0.0;      // used only when hierarchical

  int d() const { return static_cast<int>(m.size()); }
};

struct IWParams {
  Eigen::MatrixXd Sigma0;
  double nu = 0.0;

  int d() const { return static_cast<int>(Sigma0.rows()); }
};

struct FactorParams {
  int dim = 0;
  int rank = 0;   // number of factors, strictly below dim
  double a = 0.0; // shape of the Ga(a,b) prior on residual precisions
  double b = 0.0; // rate

  int d() const { return dim; }
};

struct MGPParams {
  int dim = 0;
  int rank = 0;
  double a1 = 0.0;  // shape for delta_1
  double a2 = 0.0;  // shape for delta_l, l >= 2
  double a = 0.0;   // residual precision shape
  double b = 0.0;   // residual precision rate
  // local scale phi_{jh} ~ Ga(3/2, rate 3/2), fixed

  int d() const { return dim; }
};

struct SpectralParams {
  int dim = 0;
  double a = 0.0;  // eigenvalue precision shape: lambda_i^{-1} ~ Ga(a,b)
  double b = 0.0;  // rate
  double beta_pi2 = 0.0;   // atom at pi/2
  double beta0 = 0.0;      // atom at 0 (conditional on not pi/2)
  double kappa_rot = 0.0;  // concentration of the continuous angle part

  int d() const { return dim; }
};

using CovariancePrior = std::variant<IWParams, FactorParams, MGPParams, SpectralParams>;

struct BaseMeasureSpec {
  LocationPriorSpec location;
  CovariancePrior covariance;

  int d() const { return location.d(); }
};

int covariance_dim(const CovariancePrior& p);
std::string covariance_family_name(const CovariancePrior& p);

// --- samplers -------------------------------------------------------------

SPDMatrix sample_iw(const IWParams& p, RngStream& rng);

// factor draw along with the pieces the per-draw inequalities refer to
struct FactorDraw {
  SPDMatrix sigma;
  Eigen::MatrixXd gamma;      // d x rank loadings
  Eigen::VectorXd omega_diag; // residual variances
};
FactorDraw sample_factor_draw(const FactorParams& p, RngStream& rng);
SPDMatrix sample_factor(const FactorParams& p, RngStream& rng);
FactorDraw sample_mgp_draw(const MGPParams& p, RngStream& rng);
SPDMatrix sample_mgp(const MGPParams& p, RngStream& rng);

double sample_rotator_angle(const SpectralParams& p, RngStream& rng);

struct SpectralDraw {
  SPDMatrix sigma;
  Eigen::MatrixXd O;
  Eigen::VectorXd lambda;  // as sampled, unsorted
};
SpectralDraw sample_spectral_draw(const SpectralParams& p, RngStream& rng);
SPDMatrix sample_spectral(const SpectralParams& p, RngStream& rng);

SPDMatrix sample_covariance(const CovariancePrior& p, RngStream& rng);
Eigen::VectorXd sample_location(const LocationPriorSpec& p, RngStream& rng);
std::pair<Eigen::VectorXd, SPDMatrix> sample_base(const BaseMeasureSpec& spec, RngStream& rng);

// truncated stick-breaking prior draw: H components plus explicit remainder
MixtureDensity sample_prior_mixture(double alpha, const BaseMeasureSpec& spec, long H,
                                    RngStream& rng);

// --- hyperparameter consistency constraints -------------------------------

struct ConstraintCheck {
  std::string name;
  double required;  // threshold the actual value must strictly exceed
  double actual;
  bool pass;
  double margin;  // actual - required
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool overall = true;
};

ConstraintReport check_consistency_constraints(const BaseMeasureSpec& spec);

// --- config (de)serialization ---------------------------------------------
//
// Exact key schema (unknown or inapplicable keys are errors):
//   prior.family        iw | factor | mgp | spectral
//   prior.d             dimension
//   prior.nu            [iw] degrees of freedom
//   prior.sigma0_scale  [iw] Sigma0 = scale * I, default 1
//   prior.a, prior.b    [factor|mgp|spectral] gamma shape/rate
//   prior.rank          [factor|mgp] number of factors
//   prior.a1, prior.a2  [mgp] shrinkage gamma shapes
//   prior.beta_pi2, prior.beta_0, prior.kappa_rot  [spectral] angle prior
//   location.type       fixed | hierarchical (default hierarchical)
//   location.mean       comma list of d reals, or one real broadcast (default 0)
//   location.scale      B (fixed) or B0 (hierarchical) = scale * I, default 1
//   location.nu_b       [hierarchical] degrees of freedom
BaseMeasureSpec parse_base_measure(const Config& cfg);
BaseMeasureSpec parse_base_measure_file(const std::string& path);
std::string serialize_base_measure(const BaseMeasureSpec& spec);

}  // namespace dpmix
