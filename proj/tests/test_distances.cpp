#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dpmix/core.hpp"
#include "dpmix/distances.hpp"
#include "dpmix/rng.hpp"

using namespace dpmix;

namespace {

MixtureDensity gauss1(double mean, double var) {
  GaussianComponent c(Eigen::VectorXd::Constant(1, mean),
                      SPDMatrix(Eigen::MatrixXd::Constant(1, 1, var)));
  return MixtureDensity({1.0}, {c});
}

MixtureDensity gauss_d(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  GaussianComponent c(mean, SPDMatrix(cov));
  return MixtureDensity({1.0}, {c});
}

// Random mixture with k components in dimension d; covariances are
// well-conditioned (A A^T + 0.3 I) so the MC estimators behave.
MixtureDensity random_mixture(std::mt19937_64& eng, int d, int k) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  std::vector<double> weights;
  std::vector<GaussianComponent> comps;
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd mean =
        Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return 1.5 * gauss(eng); });
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
        d, d, [&](Eigen::Index, Eigen::Index) { return 0.6 * gauss(eng); });
    Eigen::MatrixXd cov = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
    double w = unif(eng);
    weights.push_back(w);
    comps.emplace_back(mean, SPDMatrix(cov));
    total += w;
  }
  for (double& w : weights) w /= total;
  return MixtureDensity(std::move(weights), std::move(comps));
}

}  // namespace

TEST_CASE("identical arguments give zero for all three metrics") {
  RngStream rng(41, 0);
  const MixtureDensity f = gauss1(0.0, 1.0);
  const DistanceEstimate h = hellinger(f, f, 20000, rng);
  const DistanceEstimate l = l1_distance(f, f, 20000, rng);
  const DistanceEstimate k = kl_mc(f, f, 20000, rng);
  CHECK(std::abs(h.value) <= 1e-9);
  CHECK(std::abs(l.value) <= 1e-9);
  CHECK(std::abs(k.value) <= 1e-9);
  CHECK(h.n_evals == 20000);
  CHECK(distance_method_name(h.method) == "mc_importance");
}

TEST_CASE("unit-shift standard normals match the closed forms") {
  // N(0,1) vs N(1,1): BC = exp(-1/8), Hellinger = sqrt(2 - 2 BC),
  // L1 = 2(2 Phi(1/2) - 1), KL = 1/2.
  const double hell_true = 0.4847743751796387;
  const double l1_true = 0.7658498450960525;
  const MixtureDensity f = gauss1(0.0, 1.0);
  const MixtureDensity g = gauss1(1.0, 1.0);

  RngStream rng(7, 0);
  const DistanceEstimate h = hellinger(f, g, 200000, rng);
  const DistanceEstimate l = l1_distance(f, g, 200000, rng);
  const DistanceEstimate k = kl_mc(f, g, 200000, rng);
  CHECK(std::abs(h.value - hell_true) <= 3.0 * h.stderr_ + 1e-12);
  CHECK(std::abs(l.value - l1_true) <= 3.0 * l.stderr_);
  CHECK(std::abs(k.value - 0.5) <= 3.0 * k.stderr_);
  CHECK(h.stderr_ > 0.0);
  CHECK(l.stderr_ > 0.0);
  CHECK(k.stderr_ > 0.0);

  // Closed-form helpers agree exactly.
  CHECK(gaussian_bhattacharyya(f.components[0], g.components[0]) ==
        doctest::Approx(std::exp(-0.125)).epsilon(1e-12));
  CHECK(hellinger_gaussian(f.components[0], g.components[0]) ==
        doctest::Approx(hell_true).epsilon(1e-12));
}

TEST_CASE("scale-mismatch Gaussians in d=2: closed-form Hellinger") {
  // N(0, I) vs N(0, 4I) in d=2: BC = 2^d det(I*4I)^... works out to 0.8,
  // Hellinger = sqrt(2 - 1.6) = sqrt(0.4).
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const MixtureDensity f = gauss_d(zero, eye);
  const MixtureDensity g = gauss_d(zero, 4.0 * eye);
  CHECK(gaussian_bhattacharyya(f.components[0], g.components[0]) ==
        doctest::Approx(0.8).epsilon(1e-12));
  const double hell_true = 0.6324555320336758;  // sqrt(0.4)
  CHECK(hellinger_gaussian(f.components[0], g.components[0]) ==
        doctest::Approx(hell_true).epsilon(1e-12));
  RngStream rng(9, 0);
  const DistanceEstimate h = hellinger(f, g, 100000, rng);
  CHECK(std::abs(h.value - hell_true) <= 3.0 * h.stderr_);
}

TEST_CASE("kl_mc agrees with kl_zero_mean on zero-mean pairs") {
  RngStream rng(23, 0);
  std::mt19937_64 eng(55);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
        2, 2, [&](Eigen::Index, Eigen::Index) { return 0.5 * gauss(eng); });
    Eigen::MatrixXd s1 = a * a.transpose() + 0.4 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(
        2, 2, [&](Eigen::Index, Eigen::Index) { return 0.5 * gauss(eng); });
    Eigen::MatrixXd s2 = b * b.transpose() + 0.4 * Eigen::MatrixXd::Identity(2, 2);
    // kl_zero_mean(a, b) evaluates 0.5(tr(a^{-1}b) - log det(a^{-1}b) - d),
    // the divergence of N(0,b) from N(0,a); kl_mc's first argument is the
    // sampling density, so the covariances swap places.
    const double exact = kl_zero_mean(SPDMatrix(s2), SPDMatrix(s1));
    const DistanceEstimate est = kl_mc(gauss_d(zero, s1), gauss_d(zero, s2), 40000, rng);
    CHECK(std::abs(est.value - exact) <= 4.0 * est.stderr_ + 1e-10);
  }
  // The fixed example: I vs diag(2, 1/2) has KL = 1/4.
  Eigen::MatrixXd diag = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  const DistanceEstimate est =
      kl_mc(gauss_d(zero, Eigen::MatrixXd::Identity(2, 2)), gauss_d(zero, diag), 100000, rng);
  CHECK(std::abs(est.value - 0.25) <= 3.0 * est.stderr_);
}

TEST_CASE("mixture L1 upper bound: identical mixtures and the small-shift example") {
  RngStream rng(3, 0);
  std::mt19937_64 eng(77);
  const MixtureDensity f = random_mixture(eng, 2, 3);
  // Identical representation, identity pairing: every term vanishes.
  const double same_bound = l1_mixture_upper_bound(f, f, {0, 1, 2}, 3);
  CHECK(std::abs(same_bound) <= 1e-12);

  // d=1 single components N(0,1) vs N(0.1,1): bound sqrt(2/pi)*0.1 just above
  // the true L1 distance 2(2 Phi(0.05) - 1).
  const MixtureDensity a = gauss1(0.0, 1.0);
  const MixtureDensity b = gauss1(0.1, 1.0);
  const double bound = l1_mixture_upper_bound(a, b, {0}, 1);
  CHECK(bound == doctest::Approx(0.07978845608028655).epsilon(1e-12));
  const double l1_true = 0.07975522335348995;
  CHECK(bound >= l1_true);
  const DistanceEstimate est = l1_distance(a, b, 100000, rng);
  CHECK(bound >= est.value - 3.0 * est.stderr_);
}

TEST_CASE("mixture L1 upper bound dominates the MC distance on random pairs") {
  RngStream rng(12, 0);
  std::mt19937_64 eng(991);
  int dominated = 0;
  const int n_pairs = 40;
  for (int rep = 0; rep < n_pairs; ++rep) {
    const MixtureDensity f = random_mixture(eng, 2, 2);
    MixtureDensity g = random_mixture(eng, 2, 2);
    const double bound = l1_mixture_upper_bound(f, g, {0, 1}, 2);
    const DistanceEstimate est = l1_distance(f, g, 20000, rng);
    if (bound >= est.value - 3.0 * est.stderr_) ++dominated;
    CHECK(bound >= 0.0);
  }
  CHECK(dominated == n_pairs);
}

TEST_CASE("mixture L1 upper bound counts unpaired mass") {
  // Pair nothing: the bound collapses to total mass of f plus total mass of g.
  const MixtureDensity a = gauss1(0.0, 1.0);
  const MixtureDensity b = gauss1(5.0, 2.0);
  const double bound = l1_mixture_upper_bound(a, b, {}, 0);
  CHECK(bound == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("l1_mixture_upper_bound validates the pairing") {
  const MixtureDensity a = gauss1(0.0, 1.0);
  std::mt19937_64 eng(5);
  const MixtureDensity f = random_mixture(eng, 1, 2);
  CHECK_THROWS_AS(l1_mixture_upper_bound(a, a, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(l1_mixture_upper_bound(a, a, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(l1_mixture_upper_bound(a, a, {3}, 1), std::invalid_argument);
  CHECK_THROWS_AS(l1_mixture_upper_bound(f, f, {0, 0}, 2), std::invalid_argument);
}

TEST_CASE("csiszar inequality: fixed example and random pairs") {
  RngStream rng(31, 0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd diag = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  const MixtureDensity f = gauss_d(zero, Eigen::MatrixXd::Identity(2, 2));
  const MixtureDensity g = gauss_d(zero, diag);

  const CsiszarResult fixed = csiszar_check(f, g, 100000, rng);
  CHECK(fixed.holds);
  CHECK(std::abs(fixed.rhs - 0.5) <= 3.0 * fixed.rhs_stderr);  // 2 KL = 1/2
  CHECK(fixed.lhs <= fixed.rhs + 3.0 * std::hypot(fixed.lhs_stderr, fixed.rhs_stderr));

  const CsiszarResult same = csiszar_check(f, f, 20000, rng);
  CHECK(same.holds);
  CHECK(std::abs(same.lhs) <= 1e-9);
  CHECK(std::abs(same.rhs) <= 1e-9);

  std::mt19937_64 eng(404);
  for (int rep = 0; rep < 30; ++rep) {
    const MixtureDensity p = random_mixture(eng, 2, 2);
    const MixtureDensity q = random_mixture(eng, 2, 2);
    const CsiszarResult r = csiszar_check(p, q, 20000, rng);
    CHECK(r.holds);
  }
}

TEST_CASE("Hellinger/L1 sandwich holds on random pairs") {
  // d^2 <= ||f-g||_1 <= 2 d, tested with MC slack.
  RngStream rng(61, 0);
  std::mt19937_64 eng(62);
  for (int rep = 0; rep < 30; ++rep) {
    const MixtureDensity f = random_mixture(eng, 2, 3);
    const MixtureDensity g = random_mixture(eng, 2, 3);
    const DistanceEstimate h = hellinger(f, g, 20000, rng);
    const DistanceEstimate l = l1_distance(f, g, 20000, rng);
    const double slack = 3.0 * std::hypot(2.0 * h.value * h.stderr_, l.stderr_);
    CHECK(h.value * h.value <= l.value + slack);
    CHECK(l.value <= 2.0 * h.value + 3.0 * std::hypot(l.stderr_, 2.0 * h.stderr_));
  }
}

TEST_CASE("estimates are exactly symmetric in their arguments") {
  std::mt19937_64 eng(88);
  for (int rep = 0; rep < 5; ++rep) {
    const MixtureDensity f = random_mixture(eng, 2, 2);
    const MixtureDensity g = random_mixture(eng, 2, 3);
    RngStream r1(100 + rep, 4);
    RngStream r2(100 + rep, 4);
    const DistanceEstimate fg = hellinger(f, g, 20000, r1);
    const DistanceEstimate gf = hellinger(g, f, 20000, r2);
    CHECK(fg.value == gf.value);
    CHECK(fg.stderr_ == gf.stderr_);
    RngStream r3(200 + rep, 4);
    RngStream r4(200 + rep, 4);
    const DistanceEstimate lfg = l1_distance(f, g, 20000, r3);
    const DistanceEstimate lgf = l1_distance(g, f, 20000, r4);
    CHECK(lfg.value == lgf.value);
  }
}

TEST_CASE("Hellinger triangle inequality on random triples") {
  RngStream rng(71, 0);
  std::mt19937_64 eng(72);
  for (int rep = 0; rep < 25; ++rep) {
    const MixtureDensity f = random_mixture(eng, 2, 2);
    const MixtureDensity g = random_mixture(eng, 2, 2);
    const MixtureDensity h = random_mixture(eng, 2, 2);
    const DistanceEstimate fg = hellinger(f, g, 20000, rng);
    const DistanceEstimate gh = hellinger(g, h, 20000, rng);
    const DistanceEstimate fh = hellinger(f, h, 20000, rng);
    const double slack = 3.0 * std::hypot(std::hypot(fg.stderr_, gh.stderr_), fh.stderr_);
    CHECK(fh.value <= fg.value + gh.value + slack);
  }
}

TEST_CASE("far-apart densities approach the metric ceilings without crossing them") {
  RngStream rng(81, 0);
  const MixtureDensity f = gauss1(0.0, 1.0);
  const MixtureDensity g = gauss1(100.0, 1.0);
  const DistanceEstimate h = hellinger(f, g, 50000, rng);
  const DistanceEstimate l = l1_distance(f, g, 50000, rng);
  CHECK(h.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(h.value <= std::sqrt(2.0) + 1e-12);
  CHECK(l.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(l.value <= 2.0 + 1e-12);
}

TEST_CASE("quadrature reference agrees with closed forms in d=1 and d=2") {
  const MixtureDensity f = gauss1(0.0, 1.0);
  const MixtureDensity g = gauss1(1.0, 1.0);
  const DistanceEstimate h = distance_quadrature(f, g, "hellinger");
  const DistanceEstimate l = distance_quadrature(f, g, "l1");
  const DistanceEstimate k = distance_quadrature(f, g, "kl");
  CHECK(h.value == doctest::Approx(0.4847743751796387).epsilon(1e-6));
  // |f - g| has a kink where the densities cross, so the trapezoid error is
  // larger for L1 than for the smooth Hellinger/KL integrands.
  CHECK(l.value == doctest::Approx(0.7658498450960525).epsilon(1e-4));
  CHECK(k.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(h.stderr_ == 0.0);
  CHECK(distance_method_name(h.method) == "grid_quadrature");

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const MixtureDensity p = gauss_d(zero, eye);
  const MixtureDensity q = gauss_d(zero, 4.0 * eye);
  const DistanceEstimate h2 = distance_quadrature(p, q, "hellinger", 401);
  CHECK(h2.value == doctest::Approx(0.6324555320336758).epsilon(1e-4));

  // MC estimator cross-check against quadrature on a 2-component target.
  std::mt19937_64 eng(19);
  const MixtureDensity m1 = random_mixture(eng, 1, 2);
  const MixtureDensity m2 = random_mixture(eng, 1, 2);
  const DistanceEstimate ref = distance_quadrature(m1, m2, "hellinger");
  RngStream rng(19, 0);
  const DistanceEstimate mc = hellinger(m1, m2, 200000, rng);
  CHECK(std::abs(mc.value - ref.value) <= 4.0 * mc.stderr_ + 1e-6);
}

TEST_CASE("quadrature rejects d > 2, bad metric names, and tiny grids") {
  const Eigen::VectorXd zero3 = Eigen::VectorXd::Zero(3);
  const MixtureDensity f3 = gauss_d(zero3, Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(distance_quadrature(f3, f3, "hellinger"), std::invalid_argument);
  const MixtureDensity f = gauss1(0.0, 1.0);
  CHECK_THROWS_AS(distance_quadrature(f, f, "tv"), std::invalid_argument);
  CHECK_THROWS_AS(distance_quadrature(f, f, "l1", 2), std::invalid_argument);
}

TEST_CASE("input validation: budget floor and dimension mismatch") {
  RngStream rng(1, 0);
  const MixtureDensity f = gauss1(0.0, 1.0);
  const MixtureDensity g2 =
      gauss_d(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(hellinger(f, f, 9999, rng), std::invalid_argument);
  CHECK_THROWS_AS(l1_distance(f, f, 9999, rng), std::invalid_argument);
  CHECK_THROWS_AS(kl_mc(f, f, 9999, rng), std::invalid_argument);
  CHECK_THROWS_AS(hellinger(f, g2, 20000, rng), std::invalid_argument);
  CHECK_THROWS_AS(kl_mc(f, g2, 20000, rng), std::invalid_argument);
  MixtureDensity empty;
  CHECK_THROWS_AS(hellinger(empty, empty, 20000, rng), std::invalid_argument);
}

TEST_CASE("kl_mc raises when the log ratio is persistently clipped") {
  // Supports are effectively disjoint: N(0, 0.01) vs N(60, 0.01) pushes the
  // log ratio far past the clip threshold for essentially every draw.
  RngStream rng(2, 0);
  const MixtureDensity f = gauss1(0.0, 0.01);
  const MixtureDensity g = gauss1(60.0, 0.01);
  CHECK_THROWS_AS(kl_mc(f, g, 20000, rng), std::runtime_error);
}
