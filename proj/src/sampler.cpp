#include "dpmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "dpmix/distances.hpp"

namespace dpmix {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

// ---------------------------------------------------------------------------
// chain state

struct Atom {
  Eigen::VectorXd theta;
  SPDMatrix sigma;
  Eigen::MatrixXd B;  // location covariance: latent draw when hierarchical

  // family-specific covariance parameters (only the active family's are used)
  Eigen::MatrixXd gamma;           // factor / mgp loadings
  Eigen::VectorXd log_omega_inv;   // factor / mgp residual log-precisions
  Eigen::VectorXd log_delta;       // mgp column shrinkage increments
  std::vector<double> angles;      // spectral rotation angles
  Eigen::VectorXd log_lambda_inv;  // spectral eigenvalue log-precisions

  Atom(Eigen::VectorXd t, SPDMatrix s, Eigen::MatrixXd b)
      : theta(std::move(t)), sigma(std::move(s)), B(std::move(b)) {}
};

struct MetropolisBlock {
  double step = 0.25;
  long accepted = 0;   // post burn-in tallies
  long proposed = 0;
  long win_accepted = 0;  // tuning window tallies
  long win_proposed = 0;
};

struct ChainState {
  std::vector<double> sticks;  // V_1..V_H
  std::vector<Atom> atoms;     // H + 1 entries; the last is the overflow atom
  std::vector<int> z;          // allocations in 0..H
  std::map<std::string, MetropolisBlock> blocks;
};

// ---------------------------------------------------------------------------
// family parameter helpers

Eigen::MatrixXd givens_product(const std::vector<double>& angles, int d) {
  Eigen::MatrixXd O = Eigen::MatrixXd::Identity(d, d);
  std::size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double c = std::cos(angles[k]), s = std::sin(angles[k]);
      ++k;
      Eigen::MatrixXd G = Eigen::MatrixXd::Identity(d, d);
      G(i, i) = c;
      G(j, j) = c;
      G(i, j) = -s;
      G(j, i) = s;
      O = O * G;
    }
  return O;
}

SPDMatrix build_factor_sigma(const Eigen::MatrixXd& gamma,
                             const Eigen::VectorXd& log_omega_inv) {
  Eigen::MatrixXd sigma = gamma * gamma.transpose();
  for (int i = 0; i < sigma.rows(); ++i) sigma(i, i) += std::exp(-log_omega_inv(i));
  return SPDMatrix(0.5 * (sigma + sigma.transpose()));
}

SPDMatrix build_spectral_sigma(const std::vector<double>& angles,
                               const Eigen::VectorXd& log_lambda_inv) {
  const int d = static_cast<int>(log_lambda_inv.size());
  const Eigen::MatrixXd O = givens_product(angles, d);
  Eigen::VectorXd lambda(d);
  for (int i = 0; i < d; ++i) lambda(i) = std::exp(-log_lambda_inv(i));
  Eigen::MatrixXd sigma = O * lambda.asDiagonal() * O.transpose();
  return SPDMatrix(0.5 * (sigma + sigma.transpose()));
}

// log Ga(e^u; shape, rate) plus the log-scale Jacobian, constants dropped
double log_gamma_on_log_scale(double u, double shape, double rate) {
  return shape * u - rate * std::exp(u);
}

// log density of the standard Student t with 3 degrees of freedom, constants
// dropped
double log_t3(double x) { return -2.0 * std::log1p(x * x / 3.0); }

double factor_log_prior(const Atom& a, const FactorParams& p) {
  double lp = -0.5 * a.gamma.squaredNorm();
  for (int i = 0; i < p.dim; ++i)
    lp += log_gamma_on_log_scale(a.log_omega_inv(i), p.a, p.b);
  return lp;
}

Eigen::VectorXd mgp_tau(const Atom& a) {
  Eigen::VectorXd tau(a.log_delta.size());
  double acc = 0.0;
  for (int h = 0; h < tau.size(); ++h) {
    acc += a.log_delta(h);
    tau(h) = std::exp(acc);
  }
  return tau;
}

double mgp_log_prior(const Atom& a, const MGPParams& p) {
  double lp = 0.0;
  for (int h = 0; h < p.rank; ++h)
    lp += log_gamma_on_log_scale(a.log_delta(h), h == 0 ? p.a1 : p.a2, 1.0);
  const Eigen::VectorXd tau = mgp_tau(a);
  for (int h = 0; h < p.rank; ++h) {
    const double root = std::sqrt(tau(h));
    for (int j = 0; j < p.dim; ++j)
      lp += log_t3(a.gamma(j, h) * root) + 0.5 * std::log(tau(h));
  }
  for (int i = 0; i < p.dim; ++i)
    lp += log_gamma_on_log_scale(a.log_omega_inv(i), p.a, p.b);
  return lp;
}

double spectral_log_precision_prior(const Atom& a, const SpectralParams& p) {
  double lp = 0.0;
  for (int i = 0; i < p.dim; ++i)
    lp += log_gamma_on_log_scale(a.log_lambda_inv(i), p.a, p.b);
  return lp;
}

// ---------------------------------------------------------------------------
// the sampler

class BlockedGibbs {
 public:
  BlockedGibbs(const DPMixtureModel& model, RngStream& rng)
      : model_(model), rng_(rng), d_(model.base.d()) {
    if (!(model.alpha > 0.0)) throw std::invalid_argument("fit: alpha must be positive");
    if (model.H < 1) throw std::invalid_argument("fit: truncation H must be >= 1");
    const long H = model.H;
    state_.sticks.resize(H);
    for (long h = 0; h < H; ++h) state_.sticks[h] = rng_.beta1(model.alpha);
    for (long h = 0; h <= H; ++h) state_.atoms.push_back(draw_atom());
    if (std::holds_alternative<FactorParams>(model.base.covariance)) {
      state_.blocks["factor_loadings"];
      state_.blocks["factor_residual"];
    } else if (std::holds_alternative<MGPParams>(model.base.covariance)) {
      state_.blocks["mgp_loadings"];
      state_.blocks["mgp_delta"];
      state_.blocks["mgp_residual"];
    } else if (std::holds_alternative<SpectralParams>(model.base.covariance)) {
      state_.blocks["spectral_angles"];
      state_.blocks["spectral_precisions"];
    }
  }

  ChainState& state() { return state_; }

  // stick weights plus the overflow remainder, H + 1 entries summing to one
  std::vector<double> weights() const {
    std::vector<double> w(state_.atoms.size());
    double left = 1.0;
    for (std::size_t h = 0; h + 1 < w.size(); ++h) {
      w[h] = state_.sticks[h] * left;
      left *= 1.0 - state_.sticks[h];
    }
    w.back() = left;
    return w;
  }

  void init_allocations(long n) {
    const std::vector<double> w = weights();
    state_.z.resize(static_cast<std::size_t>(n));
    for (auto& zi : state_.z) zi = rng_.categorical(w);
  }

  void regenerate_data(Eigen::MatrixXd& data) {
    for (long i = 0; i < data.rows(); ++i) {
      const Atom& a = state_.atoms[static_cast<std::size_t>(state_.z[i])];
      const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(a.sigma.matrix()).matrixL();
      Eigen::VectorXd zv(d_);
      for (int k = 0; k < d_; ++k) zv(k) = rng_.normal();
      data.row(i) = (a.theta + L * zv).transpose();
    }
  }

  void sweep(const Eigen::MatrixXd& data, bool tune) {
    update_allocations(data);
    update_sticks();
    update_atoms(data, tune);
  }

  MixtureDensity snapshot() const {
    std::vector<double> w = weights();
    std::vector<GaussianComponent> comps;
    comps.reserve(state_.atoms.size());
    for (const Atom& a : state_.atoms) comps.emplace_back(a.theta, a.sigma);
    return MixtureDensity(std::move(w), std::move(comps));
  }

  long occupied() const {
    std::vector<long> counts(state_.atoms.size(), 0);
    for (int zi : state_.z) ++counts[static_cast<std::size_t>(zi)];
    long occ = 0;
    for (long c : counts) occ += c > 0 ? 1 : 0;
    return occ;
  }

  std::map<std::string, double> acceptance_rates() const {
    std::map<std::string, double> rates;
    for (const auto& [name, b] : state_.blocks)
      rates[name] = b.proposed > 0
                        ? static_cast<double>(b.accepted) / static_cast<double>(b.proposed)
                        : 0.0;
    return rates;
  }

 private:
  Atom draw_atom() {
    Eigen::MatrixXd B;
    if (model_.base.location.hierarchical)
      B = sample_iw(IWParams{model_.base.location.scale, model_.base.location.nu_B}, rng_)
              .matrix();
    else
      B = model_.base.location.scale;
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(B).matrixL();
    Eigen::VectorXd zv(d_);
    for (int k = 0; k < d_; ++k) zv(k) = rng_.normal();
    Eigen::VectorXd theta = model_.base.location.m + L * zv;

    if (const auto* iw = std::get_if<IWParams>(&model_.base.covariance)) {
      return Atom(std::move(theta), sample_iw(*iw, rng_), std::move(B));
    }
    if (const auto* fp = std::get_if<FactorParams>(&model_.base.covariance)) {
      FactorDraw fd = sample_factor_draw(*fp, rng_);
      Atom a(std::move(theta), fd.sigma, std::move(B));
      a.gamma = fd.gamma;
      a.log_omega_inv = (-fd.omega_diag.array().log()).matrix();
      return a;
    }
    if (const auto* mp = std::get_if<MGPParams>(&model_.base.covariance)) {
      // draw on the marginal parameterization the Metropolis updates use:
      // delta increments, then loadings from their t3 conditional
      Eigen::VectorXd log_delta(mp->rank);
      for (int h = 0; h < mp->rank; ++h)
        log_delta(h) = std::log(rng_.gamma(h == 0 ? mp->a1 : mp->a2, 1.0));
      Eigen::VectorXd tau(mp->rank);
      double acc = 0.0;
      for (int h = 0; h < mp->rank; ++h) {
        acc += log_delta(h);
        tau(h) = std::exp(acc);
      }
      Eigen::MatrixXd gamma(mp->dim, mp->rank);
      for (int j = 0; j < mp->dim; ++j)
        for (int h = 0; h < mp->rank; ++h) {
          const double phi = rng_.gamma(1.5, 1.0 / 1.5);
          gamma(j, h) = rng_.normal() / std::sqrt(phi * tau(h));
        }
      Eigen::VectorXd log_omega_inv(mp->dim);
      for (int i = 0; i < mp->dim; ++i)
        log_omega_inv(i) = std::log(rng_.gamma(mp->a, 1.0 / mp->b));
      Atom a(std::move(theta), build_factor_sigma(gamma, log_omega_inv), std::move(B));
      a.gamma = std::move(gamma);
      a.log_omega_inv = std::move(log_omega_inv);
      a.log_delta = std::move(log_delta);
      return a;
    }
    const auto& sp = std::get<SpectralParams>(model_.base.covariance);
    std::vector<double> angles;
    for (int i = 0; i < d_; ++i)
      for (int j = i + 1; j < d_; ++j) angles.push_back(sample_rotator_angle(sp, rng_));
    Eigen::VectorXd log_lambda_inv(d_);
    for (int i = 0; i < d_; ++i) log_lambda_inv(i) = std::log(rng_.gamma(sp.a, 1.0 / sp.b));
    Atom a(std::move(theta), build_spectral_sigma(angles, log_lambda_inv), std::move(B));
    a.angles = std::move(angles);
    a.log_lambda_inv = std::move(log_lambda_inv);
    return a;
  }

  double log_gaussian(const Eigen::VectorXd& x, const Atom& a) const {
    const Eigen::VectorXd r = x - a.theta;
    return -0.5 * r.dot(a.sigma.solve(r)) - 0.5 * a.sigma.log_det() - d_ * kHalfLog2Pi;
  }

  void update_allocations(const Eigen::MatrixXd& data) {
    const std::vector<double> w = weights();
    const std::size_t K = w.size();
    std::vector<double> logw(K);
    for (std::size_t h = 0; h < K; ++h)
      logw[h] = w[h] > 0.0 ? std::log(w[h]) : -std::numeric_limits<double>::infinity();
    std::vector<double> logp(K), probs(K);
    for (long i = 0; i < data.rows(); ++i) {
      const Eigen::VectorXd x = data.row(i).transpose();
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < K; ++h) {
        logp[h] = logw[h] + log_gaussian(x, state_.atoms[h]);
        best = std::max(best, logp[h]);
      }
      for (std::size_t h = 0; h < K; ++h) probs[h] = std::exp(logp[h] - best);
      state_.z[static_cast<std::size_t>(i)] = rng_.categorical(probs);
    }
  }

  std::vector<long> counts() const {
    std::vector<long> c(state_.atoms.size(), 0);
    for (int zi : state_.z) ++c[static_cast<std::size_t>(zi)];
    return c;
  }

  void update_sticks() {
    const std::vector<long> c = counts();
    long tail = 0;
    for (std::size_t h = state_.sticks.size(); h-- > 0;) {
      tail += c[h + 1];  // counts strictly beyond stick h, incl. the overflow atom
      state_.sticks[h] = rng_.beta(1.0 + static_cast<double>(c[h]),
                                   model_.alpha + static_cast<double>(tail));
    }
  }

  void update_atoms(const Eigen::MatrixXd& data, bool tune) {
    const std::vector<long> c = counts();
    std::vector<std::vector<long>> members(state_.atoms.size());
    for (long i = 0; i < static_cast<long>(state_.z.size()); ++i)
      members[static_cast<std::size_t>(state_.z[static_cast<std::size_t>(i)])].push_back(i);
    for (std::size_t h = 0; h < state_.atoms.size(); ++h) {
      if (c[h] == 0) {
        state_.atoms[h] = draw_atom();
        continue;
      }
      update_covariance(state_.atoms[h], data, members[h], tune);
      update_theta(state_.atoms[h], data, members[h]);
      update_location_latent(state_.atoms[h]);
    }
  }

  void update_theta(Atom& a, const Eigen::MatrixXd& data, const std::vector<long>& mem) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d_, d_);
    const Eigen::MatrixXd Binv = Eigen::LLT<Eigen::MatrixXd>(a.B).solve(I);
    const Eigen::MatrixXd Sinv = a.sigma.solve(I);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d_);
    for (long i : mem) sum += data.row(i).transpose();
    const Eigen::MatrixXd prec = Binv + static_cast<double>(mem.size()) * Sinv;
    const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (prec + prec.transpose()));
    const Eigen::VectorXd mean =
        llt.solve(Binv * model_.base.location.m + Sinv * sum);
    Eigen::VectorXd zv(d_);
    for (int k = 0; k < d_; ++k) zv(k) = rng_.normal();
    // covariance = prec^{-1} = L^{-T} L^{-1}: sample mean + L^{-T} z
    a.theta = mean + llt.matrixU().solve(zv);
  }

  void update_location_latent(Atom& a) {
    if (!model_.base.location.hierarchical) return;
    const Eigen::VectorXd r = a.theta - model_.base.location.m;
    const Eigen::MatrixXd scale = model_.base.location.scale + r * r.transpose();
    a.B = sample_iw(IWParams{0.5 * (scale + scale.transpose()),
                             model_.base.location.nu_B + 1.0},
                    rng_)
              .matrix();
  }

  double log_lik(const Atom& a, const SPDMatrix& sigma, const Eigen::MatrixXd& data,
                 const std::vector<long>& mem) const {
    double ll = 0.0;
    for (long i : mem) {
      const Eigen::VectorXd r = data.row(i).transpose() - a.theta;
      ll += -0.5 * r.dot(sigma.solve(r));
    }
    ll += -0.5 * static_cast<double>(mem.size()) * sigma.log_det();
    return ll;
  }

  bool metropolis_accept(const std::string& block, double log_ratio, bool tune) {
    MetropolisBlock& b = state_.blocks.at(block);
    ++b.win_proposed;
    if (!tune) ++b.proposed;
    const bool ok = std::log(rng_.uniform()) <= log_ratio;
    if (ok) {
      ++b.win_accepted;
      if (!tune) ++b.accepted;
    }
    if (tune && b.win_proposed >= 50) {
      const double rate =
          static_cast<double>(b.win_accepted) / static_cast<double>(b.win_proposed);
      if (rate > 0.35)
        b.step *= 1.25;
      else if (rate < 0.25)
        b.step /= 1.25;
      b.win_proposed = 0;
      b.win_accepted = 0;
    }
    return ok;
  }

  void update_covariance(Atom& a, const Eigen::MatrixXd& data,
                         const std::vector<long>& mem, bool tune) {
    if (const auto* iw = std::get_if<IWParams>(&model_.base.covariance)) {
      Eigen::MatrixXd ss = iw->Sigma0;
      for (long i : mem) {
        const Eigen::VectorXd r = data.row(i).transpose() - a.theta;
        ss += r * r.transpose();
      }
      a.sigma = sample_iw(
          IWParams{0.5 * (ss + ss.transpose()), iw->nu + static_cast<double>(mem.size())},
          rng_);
      return;
    }
    if (const auto* fp = std::get_if<FactorParams>(&model_.base.covariance)) {
      {
        Atom cand = a;
        const double step = state_.blocks.at("factor_loadings").step;
        for (int j = 0; j < cand.gamma.rows(); ++j)
          for (int k = 0; k < cand.gamma.cols(); ++k)
            cand.gamma(j, k) += step * rng_.normal();
        const SPDMatrix sig = build_factor_sigma(cand.gamma, cand.log_omega_inv);
        const double lr = factor_log_prior(cand, *fp) - factor_log_prior(a, *fp) +
                          log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
        if (metropolis_accept("factor_loadings", lr, tune)) {
          a.gamma = cand.gamma;
          a.sigma = sig;
        }
      }
      {
        Atom cand = a;
        const double step = state_.blocks.at("factor_residual").step;
        for (int i = 0; i < cand.log_omega_inv.size(); ++i)
          cand.log_omega_inv(i) += step * rng_.normal();
        const SPDMatrix sig = build_factor_sigma(cand.gamma, cand.log_omega_inv);
        const double lr = factor_log_prior(cand, *fp) - factor_log_prior(a, *fp) +
                          log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
        if (metropolis_accept("factor_residual", lr, tune)) {
          a.log_omega_inv = cand.log_omega_inv;
          a.sigma = sig;
        }
      }
      return;
    }
    if (const auto* mp = std::get_if<MGPParams>(&model_.base.covariance)) {
      {
        Atom cand = a;
        const double step = state_.blocks.at("mgp_loadings").step;
        for (int j = 0; j < cand.gamma.rows(); ++j)
          for (int k = 0; k < cand.gamma.cols(); ++k)
            cand.gamma(j, k) += step * rng_.normal();
        const SPDMatrix sig = build_factor_sigma(cand.gamma, cand.log_omega_inv);
        const double lr = mgp_log_prior(cand, *mp) - mgp_log_prior(a, *mp) +
                          log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
        if (metropolis_accept("mgp_loadings", lr, tune)) {
          a.gamma = cand.gamma;
          a.sigma = sig;
        }
      }
      {
        Atom cand = a;
        const double step = state_.blocks.at("mgp_delta").step;
        for (int h = 0; h < cand.log_delta.size(); ++h)
          cand.log_delta(h) += step * rng_.normal();
        // covariance unchanged: delta only enters the loadings prior
        const double lr = mgp_log_prior(cand, *mp) - mgp_log_prior(a, *mp);
        if (metropolis_accept("mgp_delta", lr, tune)) a.log_delta = cand.log_delta;
      }
      {
        Atom cand = a;
        const double step = state_.blocks.at("mgp_residual").step;
        for (int i = 0; i < cand.log_omega_inv.size(); ++i)
          cand.log_omega_inv(i) += step * rng_.normal();
        const SPDMatrix sig = build_factor_sigma(cand.gamma, cand.log_omega_inv);
        const double lr = mgp_log_prior(cand, *mp) - mgp_log_prior(a, *mp) +
                          log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
        if (metropolis_accept("mgp_residual", lr, tune)) {
          a.log_omega_inv = cand.log_omega_inv;
          a.sigma = sig;
        }
      }
      return;
    }
    const auto& sp = std::get<SpectralParams>(model_.base.covariance);
    for (std::size_t k = 0; k < a.angles.size(); ++k) {
      // independence proposal from the angle prior: the prior cancels and the
      // ratio is the likelihood alone
      Atom cand = a;
      cand.angles[k] = sample_rotator_angle(sp, rng_);
      const SPDMatrix sig = build_spectral_sigma(cand.angles, cand.log_lambda_inv);
      const double lr = log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
      if (metropolis_accept("spectral_angles", lr, tune)) {
        a.angles = cand.angles;
        a.sigma = sig;
      }
    }
    {
      Atom cand = a;
      const double step = state_.blocks.at("spectral_precisions").step;
      for (int i = 0; i < cand.log_lambda_inv.size(); ++i)
        cand.log_lambda_inv(i) += step * rng_.normal();
      const SPDMatrix sig = build_spectral_sigma(cand.angles, cand.log_lambda_inv);
      const double lr = spectral_log_precision_prior(cand, sp) -
                        spectral_log_precision_prior(a, sp) +
                        log_lik(a, sig, data, mem) - log_lik(a, a.sigma, data, mem);
      if (metropolis_accept("spectral_precisions", lr, tune)) {
        a.log_lambda_inv = cand.log_lambda_inv;
        a.sigma = sig;
      }
    }
  }

  const DPMixtureModel& model_;
  RngStream& rng_;
  int d_;
  ChainState state_;
};

MixtureDensity destandardize(const MixtureDensity& f, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& sd) {
  std::vector<GaussianComponent> comps;
  comps.reserve(f.components.size());
  const Eigen::MatrixXd D = sd.asDiagonal();
  for (const auto& c : f.components) {
    Eigen::MatrixXd cov = D * c.cov.matrix() * D;
    comps.emplace_back(mu + (sd.array() * c.mean.array()).matrix(),
                       SPDMatrix(0.5 * (cov + cov.transpose())));
  }
  return MixtureDensity(f.weights, std::move(comps));
}

}  // namespace

long default_truncation(double alpha, long n) {
  if (!(alpha > 0.0) || n < 1)
    throw std::invalid_argument("default_truncation: need alpha > 0 and n >= 1");
  const double h = std::ceil(5.0 * alpha * std::log(static_cast<double>(n)));
  return std::max(1L, std::min(200L, static_cast<long>(h)));
}

PosteriorDraws fit(const Eigen::MatrixXd& data, const DPMixtureModel& model,
                   const MCMCConfig& cfg) {
  if (data.rows() < 1) throw std::invalid_argument("fit: empty data");
  if (static_cast<int>(data.cols()) != model.base.d())
    throw std::invalid_argument("fit: data dimension does not match model");
  if (!data.allFinite()) throw std::invalid_argument("fit: data contains non-finite values");
  if (cfg.burn_in < 0 || cfg.iterations <= cfg.burn_in || cfg.thin < 1)
    throw std::invalid_argument("fit: need iterations > burn_in >= 0 and thin >= 1");

  Eigen::MatrixXd x = data;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(data.cols());
  Eigen::VectorXd sd = Eigen::VectorXd::Ones(data.cols());
  if (cfg.standardize) {
    for (int k = 0; k < data.cols(); ++k) {
      mu(k) = data.col(k).mean();
      const double var =
          (data.col(k).array() - mu(k)).square().sum() / std::max(1.0, data.rows() - 1.0);
      sd(k) = var > 0.0 ? std::sqrt(var) : 1.0;
      x.col(k) = (data.col(k).array() - mu(k)) / sd(k);
    }
  }

  RngStream rng(cfg.seed);
  BlockedGibbs gibbs(model, rng);
  gibbs.init_allocations(data.rows());

  PosteriorDraws draws;
  draws.n_data = data.rows();
  for (long it = 0; it < cfg.iterations; ++it) {
    const bool tune = it < cfg.burn_in;
    gibbs.sweep(x, tune);
    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      MixtureDensity snap = gibbs.snapshot();
      draws.snapshots.push_back(cfg.standardize ? destandardize(snap, mu, sd)
                                                : std::move(snap));
      draws.occupied_counts.push_back(gibbs.occupied());
    }
  }
  draws.acceptance_rates = gibbs.acceptance_rates();
  return draws;
}

double predictive_density(const PosteriorDraws& draws, const Eigen::VectorXd& x) {
  if (draws.snapshots.empty())
    throw std::invalid_argument("predictive_density: no snapshots");
  if (static_cast<int>(x.size()) != draws.snapshots[0].dim())
    throw std::invalid_argument("predictive_density: dimension mismatch");
  double acc = 0.0;
  for (const auto& f : draws.snapshots) acc += eval_mixture(x, f);
  return acc / static_cast<double>(draws.snapshots.size());
}

std::vector<double> posterior_distance_trace(const PosteriorDraws& draws,
                                             const MixtureDensity& f0, long budget,
                                             RngStream& rng, const std::string& metric) {
  if (draws.snapshots.empty())
    throw std::invalid_argument("posterior_distance_trace: no snapshots");
  if (metric != "hellinger" && metric != "l1")
    throw std::invalid_argument("posterior_distance_trace: metric must be hellinger or l1");
  const bool use_l1 = metric == "l1";
  std::vector<double> trace;
  trace.reserve(draws.snapshots.size());
  for (const auto& f : draws.snapshots)
    trace.push_back(use_l1 ? l1_distance(f, f0, budget, rng).value
                           : hellinger(f, f0, budget, rng).value);
  return trace;
}

// ---------------------------------------------------------------------------
// Geweke utilities

namespace {

constexpr int kGewekeStats = 6;

std::vector<std::string> geweke_names() {
  return {"pi1",        "lambda1_sigma1",    "theta1_first",
          "pi1_sq",     "lambda1_sigma1_sq", "theta1_first_sq"};
}

Eigen::VectorXd geweke_stat_vector(const std::vector<double>& sticks,
                                   const Atom& first_atom) {
  Eigen::VectorXd g(kGewekeStats);
  g(0) = sticks[0];
  g(1) = first_atom.sigma.lambda_max();
  g(2) = first_atom.theta(0);
  g(3) = g(0) * g(0);
  g(4) = g(1) * g(1);
  g(5) = g(2) * g(2);
  return g;
}

GewekeStats finalize_iid(const std::vector<Eigen::VectorXd>& rows) {
  const long n = static_cast<long>(rows.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kGewekeStats);
  for (const auto& r : rows) mean += r;
  mean /= static_cast<double>(n);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(kGewekeStats);
  for (const auto& r : rows) var += (r - mean).cwiseProduct(r - mean);
  var /= static_cast<double>(n - 1);
  GewekeStats s;
  s.names = geweke_names();
  s.rounds = n;
  for (int k = 0; k < kGewekeStats; ++k) {
    s.mean.push_back(mean(k));
    s.se.push_back(std::sqrt(var(k) / static_cast<double>(n)));
  }
  return s;
}

GewekeStats finalize_batch_means(const std::vector<Eigen::VectorXd>& rows) {
  const long n = static_cast<long>(rows.size());
  const long nb = std::max(2L, static_cast<long>(std::floor(std::sqrt(n))));
  const long bs = n / nb;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kGewekeStats);
  for (long i = 0; i < nb * bs; ++i) mean += rows[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(nb * bs);
  Eigen::MatrixXd batch(nb, kGewekeStats);
  for (long b = 0; b < nb; ++b) {
    Eigen::VectorXd bm = Eigen::VectorXd::Zero(kGewekeStats);
    for (long i = b * bs; i < (b + 1) * bs; ++i) bm += rows[static_cast<std::size_t>(i)];
    batch.row(b) = (bm / static_cast<double>(bs)).transpose();
  }
  GewekeStats s;
  s.names = geweke_names();
  s.rounds = n;
  for (int k = 0; k < kGewekeStats; ++k) {
    const double m = mean(k);
    double v = 0.0;
    for (long b = 0; b < nb; ++b) {
      const double dlt = batch(b, k) - m;
      v += dlt * dlt;
    }
    v /= static_cast<double>(nb - 1);
    s.mean.push_back(m);
    s.se.push_back(std::sqrt(v / static_cast<double>(nb)));
  }
  return s;
}

}  // namespace

GewekeStats geweke_marginal_conditional(const DPMixtureModel& model, long rounds,
                                        std::uint64_t seed) {
  if (rounds < 10) throw std::invalid_argument("geweke: need at least 10 rounds");
  RngStream rng(seed);
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(static_cast<std::size_t>(rounds));
  for (long t = 0; t < rounds; ++t) {
    BlockedGibbs gibbs(model, rng);  // fresh prior draw of sticks and atoms
    rows.push_back(geweke_stat_vector(gibbs.state().sticks, gibbs.state().atoms[0]));
  }
  return finalize_iid(rows);
}

GewekeStats geweke_successive_conditional(const DPMixtureModel& model, long n_data,
                                          long rounds, std::uint64_t seed) {
  if (rounds < 10) throw std::invalid_argument("geweke: need at least 10 rounds");
  if (n_data < 1) throw std::invalid_argument("geweke: need n_data >= 1");
  RngStream rng(seed);
  BlockedGibbs gibbs(model, rng);
  gibbs.init_allocations(n_data);
  Eigen::MatrixXd data(n_data, model.base.d());
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(static_cast<std::size_t>(rounds));
  for (long t = 0; t < rounds; ++t) {
    gibbs.regenerate_data(data);
    gibbs.sweep(data, /*tune=*/false);
    rows.push_back(geweke_stat_vector(gibbs.state().sticks, gibbs.state().atoms[0]));
  }
  return finalize_batch_means(rows);
}

std::vector<double> geweke_z_scores(const GewekeStats& a, const GewekeStats& b) {
  if (a.mean.size() != b.mean.size())
    throw std::invalid_argument("geweke_z_scores: incompatible stat vectors");
  std::vector<double> z(a.mean.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    z[k] = (a.mean[k] - b.mean[k]) / std::hypot(a.se[k], b.se[k]);
  return z;
}

}  // namespace dpmix
