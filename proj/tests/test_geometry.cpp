#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "core/geometry.hpp"
#include "core/rng.hpp"
#include "helpers.hpp"

using namespace rmp;

namespace {

// Random invertible matrix with entries in [-1, 1] and |det| bounded away
// from zero; rejection keeps the draw simple.
Eigen::MatrixXd random_invertible(SplitMix64& rng, int d) {
  for (;;) {
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = 2.0 * rng.uniform() - 1.0;
    if (std::abs(g.determinant()) > 1e-3) return g;
  }
}

// Random allowable positive matrix: strictly positive entries in (0.1, 1.1).
Eigen::MatrixXd random_positive(SplitMix64& rng, int d) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = 0.1 + rng.uniform();
  return g;
}

Eigen::VectorXd random_vector(SplitMix64& rng, int d, bool positive) {
  Eigen::VectorXd v(d);
  for (;;) {
    for (int i = 0; i < d; ++i)
      v(i) = positive ? 0.05 + rng.uniform() : 2.0 * rng.uniform() - 1.0;
    if (v.norm() > 1e-6) return v;
  }
}

}  // namespace

TEST_CASE("projection canonicalizes sign and rejects degenerate input") {
  Ensemble inv = testutil::conformal_half();
  Eigen::VectorXd v(2);
  v << 0, -3;
  Direction x = project(v, inv);
  CHECK(x.v(0) == doctest::Approx(0.0));
  CHECK(x.v(1) == doctest::Approx(1.0));

  Ensemble pos = testutil::positive_pair();
  Eigen::VectorXd w(2);
  w << 3, 4;
  Direction y = project(w, pos);
  CHECK(y.v(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(y.v(1) == doctest::Approx(0.8).epsilon(1e-14));

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(project(zero, inv), Error);

  Eigen::VectorXd neg(2);
  neg << 1, -1;
  CHECK_THROWS_AS(project(neg, pos), Error);
}

TEST_CASE("action on simple matrices") {
  Ensemble inv = testutil::conformal_half();
  Eigen::VectorXd v(2);
  v << 1, 1;
  Direction x = project(v, inv);

  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 1;
  ActResult r = act(d, x, inv);
  CHECK(r.x.v(0) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(r.x.v(1) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(r.logGain == doctest::Approx(std::log(std::sqrt(5.0 / 2.0))).epsilon(1e-14));

  ActResult ident = act(Eigen::MatrixXd::Identity(2, 2), x, inv);
  CHECK(ident.logGain == doctest::Approx(0.0));
  CHECK((ident.x.v - x.v).norm() == doctest::Approx(0.0));

  ActResult twice = act(2.0 * Eigen::MatrixXd::Identity(2, 2), x, inv);
  CHECK(twice.logGain == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK((twice.x.v - x.v).norm() == doctest::Approx(0.0));
}

TEST_CASE("projective metric basics") {
  Ensemble inv = testutil::conformal_half();
  Eigen::VectorXd e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(distance(project(e1, inv), project(e2, inv)) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd v(2);
  v << 0.3, -0.9;
  CHECK(distance(project(v, inv), project(Eigen::VectorXd(-v), inv)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("cross-ratio metric on the positive sphere") {
  Ensemble pos = rmp::build_ensemble(
      2, MatrixClass::Positive, NormKind::L1,
      {{Eigen::MatrixXd::Identity(2, 2) + Eigen::MatrixXd::Ones(2, 2), 1.0}});
  Eigen::VectorXd a(2), b(2);
  a << 0.6, 0.4;
  b << 0.4, 0.6;
  Direction x = project(a, pos);
  Direction y = project(b, pos);
  // m(x,y) = m(y,x) = 2/3, d = (1 - 4/9)/(1 + 4/9) = 5/13.
  CHECK(distance(x, y) == doctest::Approx(5.0 / 13.0).epsilon(1e-14));
}

TEST_CASE("metric range, symmetry, identity over random pairs") {
  Ensemble inv = testutil::conformal_half();
  Ensemble pos = testutil::positive_pair();
  SplitMix64 rng{424242};
  for (int k = 0; k < 10000; ++k) {
    bool positive = (k % 2) == 0;
    const Ensemble& ens = positive ? pos : inv;
    Direction x = project(random_vector(rng, 2, positive), ens);
    Direction y = project(random_vector(rng, 2, positive), ens);
    double dxy = distance(x, y);
    double dyx = distance(y, x);
    CHECK(dxy >= 0.0);
    CHECK(dxy <= 1.0);
    CHECK(std::abs(dxy - dyx) <= 1e-12);
    CHECK(distance(x, x) <= 1e-12);
  }
}

TEST_CASE("positive matrices never expand the cross-ratio metric") {
  Ensemble pos = testutil::positive_pair();
  SplitMix64 rng{777};
  for (int k = 0; k < 10000; ++k) {
    Eigen::MatrixXd g = random_positive(rng, 2);
    Direction x = project(random_vector(rng, 2, true), pos);
    Direction y = project(random_vector(rng, 2, true), pos);
    double before = distance(x, y);
    double after = distance(act(g, x, pos).x, act(g, y, pos).x);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("log gains add along products") {
  Ensemble inv = testutil::conformal_half();
  SplitMix64 rng{31337};
  for (int k = 0; k < 10000; ++k) {
    Eigen::MatrixXd g1 = random_invertible(rng, 2);
    Eigen::MatrixXd g2 = random_invertible(rng, 2);
    Direction x = project(random_vector(rng, 2, false), inv);
    ActResult step1 = act(g1, x, inv);
    ActResult step2 = act(g2, step1.x, inv);
    double direct = std::log((g2 * g1 * x.v).norm());
    CHECK(std::abs(step1.logGain + step2.logGain - direct) <= 1e-10);
  }
}

TEST_CASE("norm distance is dominated by a multiple of the metric") {
  // Empirical bound for |x - y| <= C d(x, y); the ratio must stay bounded and
  // stable across seeds.
  Ensemble inv = testutil::conformal_half();
  auto max_ratio = [&inv](uint64_t seed) {
    SplitMix64 rng{seed};
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
      Direction x = project(random_vector(rng, 2, false), inv);
      Direction y = project(random_vector(rng, 2, false), inv);
      double d = distance(x, y);
      if (d < 1e-9) continue;
      double ratio = signclass_distance(x.v, y.v, NormKind::Euclidean) / d;
      worst = std::max(worst, ratio);
    }
    return worst;
  };
  double r1 = max_ratio(1);
  double r2 = max_ratio(2);
  CHECK(std::isfinite(r1));
  CHECK(std::isfinite(r2));
  CHECK(r1 > 0.0);
  // Same bounded constant for independent samples.
  CHECK(std::abs(r1 - r2) <= 0.5 * std::max(r1, r2));
}

TEST_CASE("angle chart round-trips") {
  Ensemble inv = testutil::conformal_half();
  Ensemble pos = testutil::positive_pair();
  SplitMix64 rng{5150};
  for (int k = 0; k < 1000; ++k) {
    double thetaInv = rng.uniform() * M_PI;
    Direction x = direction_from_angle(thetaInv, inv);
    CHECK(std::abs(angle_of(x) - thetaInv) <= 1e-12);
    double thetaPos = rng.uniform() * M_PI / 2.0;
    Direction y = direction_from_angle(thetaPos, pos);
    CHECK(std::abs(angle_of(y) - thetaPos) <= 1e-12);
  }
}
