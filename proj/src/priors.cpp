#include "dpmix/priors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace dpmix {

namespace {

// lower-triangular Bartlett factor A of a Wishart(nu, I) draw:
// A_ii = sqrt(chi^2_{nu-i+1}), A_ij ~ N(0,1) below the diagonal
Eigen::MatrixXd bartlett_factor(int d, double nu, RngStream& rng) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(nu - i));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  return A;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

int covariance_dim(const CovariancePrior& p) {
  return std::visit([](const auto& q) { return q.d(); }, p);
}

std::string covariance_family_name(const CovariancePrior& p) {
  struct V {
    std::string operator()(const IWParams&) const { return "iw"; }
    std::string operator()(const FactorParams&) const { return "factor"; }
    std::string operator()(const MGPParams&) const { return "mgp"; }
    std::string operator()(const SpectralParams&) const { return "spectral"; }
  };
  return std::visit(V{}, p);
}

SPDMatrix sample_iw(const IWParams& p, RngStream& rng) {
  const int d = p.d();
  if (!(p.nu > d - 1))
    throw std::invalid_argument("sample_iw: need nu > d - 1");
  // Sigma ~ IW(Sigma0, nu)  <=>  Sigma^{-1} ~ Wishart(nu, Sigma0^{-1}).
  // With Sigma0^{-1} = L0 L0^T and Bartlett A: Sigma^{-1} = (L0 A)(L0 A)^T,
  // so Sigma = T^{-T} T^{-1} with T = L0 A, obtained by triangular solves.
  const SPDMatrix s0(p.Sigma0);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd s0_inv = s0.solve(eye);
  const Eigen::MatrixXd L0 =
      Eigen::LLT<Eigen::MatrixXd>(0.5 * (s0_inv + s0_inv.transpose())).matrixL();
  const Eigen::MatrixXd T = L0 * bartlett_factor(d, p.nu, rng);
  const Eigen::MatrixXd Tinv =
      T.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd sigma = Tinv.transpose() * Tinv;
  return SPDMatrix(0.5 * (sigma + sigma.transpose()));
}

FactorDraw sample_factor_draw(const FactorParams& p, RngStream& rng) {
  if (p.dim < 1 || p.rank < 1 || p.rank >= p.dim)
    throw std::invalid_argument("sample_factor: need 1 <= rank < dim");
  require_positive(p.a, "factor shape a");
  require_positive(p.b, "factor rate b");
  Eigen::MatrixXd gamma(p.dim, p.rank);
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.rank; ++j) gamma(i, j) = rng.normal();
  Eigen::VectorXd omega(p.dim);
  for (int i = 0; i < p.dim; ++i) omega(i) = 1.0 / rng.gamma(p.a, 1.0 / p.b);
  Eigen::MatrixXd sigma = gamma * gamma.transpose();
  sigma.diagonal() += omega;
  return FactorDraw{SPDMatrix(0.5 * (sigma + sigma.transpose())), gamma, omega};
}

SPDMatrix sample_factor(const FactorParams& p, RngStream& rng) {
  return sample_factor_draw(p, rng).sigma;
}

FactorDraw sample_mgp_draw(const MGPParams& p, RngStream& rng) {
  if (p.dim < 1 || p.rank < 1 || p.rank >= p.dim)
    throw std::invalid_argument("sample_mgp: need 1 <= rank < dim");
  require_positive(p.a1, "mgp shape a1");
  require_positive(p.a2, "mgp shape a2");
  require_positive(p.a, "mgp residual shape a");
  require_positive(p.b, "mgp residual rate b");
  // column precisions tau_h = prod_{l<=h} delta_l
  Eigen::VectorXd tau(p.rank);
  double acc = 1.0;
  for (int h = 0; h < p.rank; ++h) {
    const double shape = (h == 0) ? p.a1 : p.a2;
    acc *= rng.gamma(shape, 1.0);
    tau(h) = acc;
  }
  Eigen::MatrixXd gamma(p.dim, p.rank);
  for (int j = 0; j < p.dim; ++j)
    for (int h = 0; h < p.rank; ++h) {
      const double phi = rng.gamma(1.5, 1.0 / 1.5);
      gamma(j, h) = rng.normal() / std::sqrt(phi * tau(h));
    }
  Eigen::VectorXd omega(p.dim);
  for (int i = 0; i < p.dim; ++i) omega(i) = 1.0 / rng.gamma(p.a, 1.0 / p.b);
  Eigen::MatrixXd sigma = gamma * gamma.transpose();
  sigma.diagonal() += omega;
  return FactorDraw{SPDMatrix(0.5 * (sigma + sigma.transpose())), gamma, omega};
}

SPDMatrix sample_mgp(const MGPParams& p, RngStream& rng) {
  return sample_mgp_draw(p, rng).sigma;
}

double sample_rotator_angle(const SpectralParams& p, RngStream& rng) {
  if (p.beta_pi2 < 0.0 || p.beta_pi2 >= 1.0 + 1e-15 || p.beta0 < 0.0 ||
      p.beta0 >= 1.0 + 1e-15 || p.kappa_rot < 0.0)
    throw std::invalid_argument("sample_rotator_angle: invalid angle-prior parameters");
  const double half_pi = 0.5 * std::numbers::pi;
  // degenerate atom weights take a branch, never a rejection loop
  if (p.beta_pi2 >= 1.0) return half_pi;
  if (p.beta_pi2 > 0.0 && rng.uniform() < p.beta_pi2) return half_pi;
  if (p.beta0 >= 1.0) return 0.0;
  if (p.beta0 > 0.0 && rng.uniform() < p.beta0) return 0.0;

  const double kappa = p.kappa_rot;
  if (kappa <= 20.0) {
    // uniform proposal, acceptance exp{kappa (cos^2 w - 1)}
    for (;;) {
      const double w = rng.uniform(-half_pi, half_pi);
      const double c = std::cos(w);
      if (std::log(rng.uniform()) <= kappa * (c * c - 1.0)) return w;
    }
  }
  // Gaussian proposal N(0, s^2) with 1/(2 s^2) = (4/pi^2) kappa; the bound
  // sin^2 w >= (4/pi^2) w^2 on [-pi/2, pi/2] makes the ratio <= 1
  const double s = std::sqrt(std::numbers::pi * std::numbers::pi / (8.0 * kappa));
  for (;;) {
    const double w = rng.normal(0.0, s);
    if (w <= -half_pi || w >= half_pi) continue;
    const double sw = std::sin(w);
    const double log_acc = kappa * ((4.0 / (std::numbers::pi * std::numbers::pi)) * w * w -
                                    sw * sw);
    if (std::log(rng.uniform()) <= log_acc) return w;
  }
}

SpectralDraw sample_spectral_draw(const SpectralParams& p, RngStream& rng) {
  if (p.dim < 1) throw std::invalid_argument("sample_spectral: dim must be >= 1");
  require_positive(p.a, "spectral shape a");
  require_positive(p.b, "spectral rate b");
  Eigen::VectorXd lambda(p.dim);
  for (int i = 0; i < p.dim; ++i) lambda(i) = 1.0 / rng.gamma(p.a, 1.0 / p.b);
  // O = product of Givens rotations over pairs (i,j), i<j, in lexicographic
  // order, applied left to right
  Eigen::MatrixXd O = Eigen::MatrixXd::Identity(p.dim, p.dim);
  for (int i = 0; i < p.dim; ++i)
    for (int j = i + 1; j < p.dim; ++j) {
      const double w = sample_rotator_angle(p, rng);
      const double c = std::cos(w), s = std::sin(w);
      Eigen::MatrixXd G = Eigen::MatrixXd::Identity(p.dim, p.dim);
      G(i, i) = c;
      G(j, j) = c;
      G(i, j) = -s;
      G(j, i) = s;
      O = O * G;
    }
  Eigen::MatrixXd sigma = O * lambda.asDiagonal() * O.transpose();
  return SpectralDraw{SPDMatrix(0.5 * (sigma + sigma.transpose())), O, lambda};
}

SPDMatrix sample_spectral(const SpectralParams& p, RngStream& rng) {
  return sample_spectral_draw(p, rng).sigma;
}

SPDMatrix sample_covariance(const CovariancePrior& p, RngStream& rng) {
  struct V {
    RngStream& rng;
    SPDMatrix operator()(const IWParams& q) const { return sample_iw(q, rng); }
    SPDMatrix operator()(const FactorParams& q) const { return sample_factor(q, rng); }
    SPDMatrix operator()(const MGPParams& q) const { return sample_mgp(q, rng); }
    SPDMatrix operator()(const SpectralParams& q) const { return sample_spectral(q, rng); }
  };
  return std::visit(V{rng}, p);
}

Eigen::VectorXd sample_location(const LocationPriorSpec& p, RngStream& rng) {
  const int d = p.d();
  if (d < 1) throw std::invalid_argument("sample_location: empty mean");
  Eigen::MatrixXd B;
  if (p.hierarchical) {
    if (!(p.nu_B > d - 1))
      throw std::invalid_argument("sample_location: hierarchical needs nu_B > d - 1");
    B = sample_iw(IWParams{p.scale, p.nu_B}, rng).matrix();
  } else {
    B = p.scale;
  }
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(B).matrixL();
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  return p.m + L * z;
}

std::pair<Eigen::VectorXd, SPDMatrix> sample_base(const BaseMeasureSpec& spec,
                                                  RngStream& rng) {
  if (spec.location.d() != covariance_dim(spec.covariance))
    throw std::invalid_argument("sample_base: location/covariance dimension mismatch");
  Eigen::VectorXd theta = sample_location(spec.location, rng);
  SPDMatrix sigma = sample_covariance(spec.covariance, rng);
  return {std::move(theta), std::move(sigma)};
}

MixtureDensity sample_prior_mixture(double alpha, const BaseMeasureSpec& spec, long H,
                                    RngStream& rng) {
  if (H < 1) throw std::invalid_argument("sample_prior_mixture: H must be >= 1");
  require_positive(alpha, "alpha");
  StickBreaking sb;
  sb.alpha = alpha;
  sb.sticks.resize(H);
  for (long h = 0; h < H; ++h) sb.sticks[h] = rng.beta1(alpha);
  std::vector<double> w = sb.weights();
  std::vector<GaussianComponent> comps;
  comps.reserve(H);
  for (long h = 0; h < H; ++h) {
    auto [theta, sigma] = sample_base(spec, rng);
    comps.emplace_back(std::move(theta), std::move(sigma));
  }
  return MixtureDensity(std::move(w), std::move(comps));
}

ConstraintReport check_consistency_constraints(const BaseMeasureSpec& spec) {
  ConstraintReport rep;
  const int d = spec.d();
  auto add = [&](const std::string& name, double required, double actual) {
    ConstraintCheck c{name, required, actual, actual > required, actual - required};
    rep.overall = rep.overall && c.pass;
    rep.checks.push_back(std::move(c));
  };

  if (spec.location.hierarchical) {
    // heavy-tailed Student-t marginal: flag requires nu_B > d
    add("location nu_B > d", static_cast<double>(d), spec.location.nu_B);
  } else {
    // Gaussian location tails beat every polynomial rate
    add("location fixed-B (Gaussian tails)", 0.0, 1.0);
  }

  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, IWParams>)
          add("iw nu > 2d(d-1)+d-1", 2.0 * d * (d - 1) + d - 1.0, q.nu);
        else if constexpr (std::is_same_v<T, FactorParams>)
          add("factor a > d(d-1)", static_cast<double>(d) * (d - 1), q.a);
        else if constexpr (std::is_same_v<T, MGPParams>)
          add("mgp a > d(d-1)", static_cast<double>(d) * (d - 1), q.a);
        else
          add("spectral a > d(d-1)", static_cast<double>(d) * (d - 1), q.a);
      },
      spec.covariance);
  return rep;
}

namespace {

const std::set<std::string> kCommonKeys = {
    "prior.family", "prior.d", "location.type", "location.mean", "location.scale",
    "location.nu_b"};

std::set<std::string> with(std::initializer_list<std::string> extra) {
  std::set<std::string> s = kCommonKeys;
  for (const auto& e : extra) s.insert(e);
  return s;
}

}  // namespace

BaseMeasureSpec parse_base_measure(const Config& cfg) {
  const std::string family = cfg.get_string("prior.family");
  const long d = cfg.get_long("prior.d");
  if (d < 1) throw std::invalid_argument("prior.d must be >= 1");

  if (family == "iw")
    cfg.validate_keys(with({"prior.nu", "prior.sigma0_scale"}));
  else if (family == "factor")
    cfg.validate_keys(with({"prior.a", "prior.b", "prior.rank"}));
  else if (family == "mgp")
    cfg.validate_keys(with({"prior.a", "prior.b", "prior.rank", "prior.a1", "prior.a2"}));
  else if (family == "spectral")
    cfg.validate_keys(with({"prior.a", "prior.b", "prior.beta_pi2", "prior.beta_0",
                            "prior.kappa_rot"}));
  else
    throw std::invalid_argument("prior.family must be iw|factor|mgp|spectral, got '" +
                                family + "'");

  BaseMeasureSpec spec;
  const std::string loc_type = cfg.get_string_or("location.type", "hierarchical");
  if (loc_type != "fixed" && loc_type != "hierarchical")
    throw std::invalid_argument("location.type must be fixed|hierarchical");
  spec.location.hierarchical = (loc_type == "hierarchical");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  if (cfg.has("location.mean")) {
    const std::vector<double> mv = cfg.get_double_list("location.mean");
    if (mv.size() == 1)
      mean.setConstant(mv[0]);
    else if (static_cast<long>(mv.size()) == d)
      for (long i = 0; i < d; ++i) mean(i) = mv[i];
    else
      throw std::invalid_argument("location.mean must have 1 or prior.d entries");
  }
  spec.location.m = mean;
  const double loc_scale = cfg.get_double_or("location.scale", 1.0);
  require_positive(loc_scale, "location.scale");
  spec.location.scale = loc_scale * Eigen::MatrixXd::Identity(d, d);
  if (spec.location.hierarchical) {
    spec.location.nu_B = cfg.get_double("location.nu_b");
    if (!(spec.location.nu_B > d - 1))
      throw std::invalid_argument("location.nu_b must exceed d - 1");
  } else if (cfg.has("location.nu_b")) {
    throw std::invalid_argument("location.nu_b requires location.type = hierarchical");
  }

  if (family == "iw") {
    IWParams p;
    p.nu = cfg.get_double("prior.nu");
    const double s = cfg.get_double_or("prior.sigma0_scale", 1.0);
    require_positive(s, "prior.sigma0_scale");
    p.Sigma0 = s * Eigen::MatrixXd::Identity(d, d);
    if (!(p.nu > d - 1)) throw std::invalid_argument("prior.nu must exceed d - 1");
    spec.covariance = p;
  } else if (family == "factor" || family == "mgp") {
    const long rank = cfg.get_long("prior.rank");
    if (rank < 1 || rank >= d)
      throw std::invalid_argument("prior.rank must satisfy 1 <= rank < prior.d");
    const double a = cfg.get_double("prior.a"), b = cfg.get_double("prior.b");
    require_positive(a, "prior.a");
    require_positive(b, "prior.b");
    if (family == "factor") {
      spec.covariance = FactorParams{static_cast<int>(d), static_cast<int>(rank), a, b};
    } else {
      MGPParams p;
      p.dim = static_cast<int>(d);
      p.rank = static_cast<int>(rank);
      p.a1 = cfg.get_double("prior.a1");
      p.a2 = cfg.get_double("prior.a2");
      require_positive(p.a1, "prior.a1");
      require_positive(p.a2, "prior.a2");
      p.a = a;
      p.b = b;
      spec.covariance = p;
    }
  } else {
    SpectralParams p;
    p.dim = static_cast<int>(d);
    p.a = cfg.get_double("prior.a");
    p.b = cfg.get_double("prior.b");
    require_positive(p.a, "prior.a");
    require_positive(p.b, "prior.b");
    p.beta_pi2 = cfg.get_double_or("prior.beta_pi2", 0.0);
    p.beta0 = cfg.get_double_or("prior.beta_0", 0.0);
    p.kappa_rot = cfg.get_double_or("prior.kappa_rot", 0.0);
    if (p.beta_pi2 < 0.0 || p.beta_pi2 > 1.0 || p.beta0 < 0.0 || p.beta0 > 1.0 ||
        p.kappa_rot < 0.0)
      throw std::invalid_argument("spectral angle-prior parameters out of range");
    spec.covariance = p;
  }
  return spec;
}

BaseMeasureSpec parse_base_measure_file(const std::string& path) {
  return parse_base_measure(Config::parse_file(path));
}

std::string serialize_base_measure(const BaseMeasureSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  const int d = spec.d();
  out << "prior.family = " << covariance_family_name(spec.covariance) << "\n";
  out << "prior.d = " << d << "\n";
  struct V {
    std::ostringstream& out;
    void operator()(const IWParams& q) const {
      out << "prior.nu = " << q.nu << "\n";
      out << "prior.sigma0_scale = " << q.Sigma0(0, 0) << "\n";
    }
    void operator()(const FactorParams& q) const {
      out << "prior.rank = " << q.rank << "\n";
      out << "prior.a = " << q.a << "\n";
      out << "prior.b = " << q.b << "\n";
    }
    void operator()(const MGPParams& q) const {
      out << "prior.rank = " << q.rank << "\n";
      out << "prior.a = " << q.a << "\n";
      out << "prior.b = " << q.b << "\n";
      out << "prior.a1 = " << q.a1 << "\n";
      out << "prior.a2 = " << q.a2 << "\n";
    }
    void operator()(const SpectralParams& q) const {
      out << "prior.a = " << q.a << "\n";
      out << "prior.b = " << q.b << "\n";
      out << "prior.beta_pi2 = " << q.beta_pi2 << "\n";
      out << "prior.beta_0 = " << q.beta0 << "\n";
      out << "prior.kappa_rot = " << q.kappa_rot << "\n";
    }
  };
  std::visit(V{out}, spec.covariance);
  out << "location.type = " << (spec.location.hierarchical ? "hierarchical" : "fixed")
      << "\n";
  out << "location.mean = ";
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << spec.location.m(i);
  out << "\n";
  out << "location.scale = " << spec.location.scale(0, 0) << "\n";
  if (spec.location.hierarchical) out << "location.nu_b = " << spec.location.nu_B << "\n";
  return out.str();
}

}  // namespace dpmix
