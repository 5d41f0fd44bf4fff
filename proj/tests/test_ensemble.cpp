#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "core/ensemble.hpp"
#include "helpers.hpp"

using namespace rmp;

namespace {

Ensemble make(int dim, MatrixClass cls, NormKind norm, std::vector<Atom> atoms) {
  return build_ensemble(dim, cls, norm, std::move(atoms));
}

}  // namespace

TEST_CASE("probabilities renormalize to sum one") {
  Ensemble e = make(2, MatrixClass::Invertible, NormKind::Euclidean,
                    {{2.0 * Eigen::MatrixXd::Identity(2, 2), 2.0},
                     {3.0 * Eigen::MatrixXd::Identity(2, 2), 6.0}});
  CHECK(e.atoms[0].p == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(e.atoms[1].p == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(e.atoms[0].p + e.atoms[1].p == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("construction rejects malformed input") {
  Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);

  CHECK_THROWS_AS(make(2, MatrixClass::Invertible, NormKind::Euclidean,
                       {{Eigen::MatrixXd::Identity(3, 3), 1.0}}),
                  Error);
  CHECK_THROWS_AS(make(2, MatrixClass::Invertible, NormKind::Euclidean,
                       {{Eigen::MatrixXd::Ones(2, 3), 1.0}}),
                  Error);
  CHECK_THROWS_AS(make(2, MatrixClass::Invertible, NormKind::Euclidean,
                       {{id2, 1.0}, {id2, 0.0}}),
                  Error);
  try {
    make(2, MatrixClass::Invertible, NormKind::Euclidean, {{id2, 1.0}, {id2, 0.0}});
  } catch (const Error& err) {
    CHECK(err.code() == Err::ZeroProbability);
  }

  Eigen::MatrixXd singular(2, 2);
  singular << 1, 2, 2, 4;
  try {
    make(2, MatrixClass::Invertible, NormKind::Euclidean, {{singular, 1.0}});
    FAIL("singular matrix accepted under the invertible class");
  } catch (const Error& err) {
    CHECK(err.code() == Err::NotInvertible);
  }

  Eigen::MatrixXd zeroRow(2, 2);
  zeroRow << 1, 1, 0, 0;
  try {
    make(2, MatrixClass::Positive, NormKind::Euclidean, {{zeroRow, 1.0}});
    FAIL("matrix with a zero row accepted under the positive class");
  } catch (const Error& err) {
    CHECK(err.code() == Err::NotAllowable);
  }
}

TEST_CASE("vector and operator norms") {
  Eigen::VectorXd v(2);
  v << 3, 4;
  CHECK(vec_norm(v, NormKind::Euclidean) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(vec_norm(v, NormKind::L1) == doctest::Approx(7.0).epsilon(1e-15));

  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 1;
  CHECK(matrix_norm(d, NormKind::Euclidean) == doctest::Approx(2.0).epsilon(1e-12));

  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 1;
  // Largest singular value of [[2,1],[1,1]] is (3+sqrt(5))/2.
  CHECK(matrix_norm(a, NormKind::Euclidean) ==
        doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  // L1 operator norm = max column sum.
  CHECK(matrix_norm(a, NormKind::L1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("allowability is a row and column condition") {
  Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(allowable(id2));
  Eigen::MatrixXd zeroCol(2, 2);
  zeroCol << 1, 0, 1, 0;
  CHECK_FALSE(allowable(zeroCol));
  Eigen::MatrixXd full(2, 2);
  full << 2, 1, 1, 1;
  CHECK(allowable(full));
}

TEST_CASE("matrix gauges on a conformal atom") {
  MatrixGauges g = matrix_gauges(2.0 * Eigen::MatrixXd::Identity(2, 2),
                                 MatrixClass::Invertible, NormKind::Euclidean);
  CHECK(g.normG == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.iota == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(g.bigN == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("matrix gauges on the positive pair") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 1;
  MatrixGauges g = matrix_gauges(a, MatrixClass::Positive, NormKind::Euclidean);
  CHECK(g.normG == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(g.iota > 0.0);
  // iota can never exceed the gain at any single point of the sphere.
  Eigen::VectorXd e2(2);
  e2 << 0, 1;
  CHECK(g.iota <= vec_norm(a * e2, NormKind::Euclidean) + 1e-12);
  CHECK(g.bigN >= g.normG - 1e-12);
}

TEST_CASE("condition report on the positive pair") {
  ConditionReport rep = check_conditions(testutil::positive_pair(), 6, 200, 12345);
  CHECK(rep.allowableAll);
  CHECK(rep.strictlyPositiveProductFound);
  CHECK(rep.witnessLength == 1);  // both atoms are already strictly positive
  CHECK(rep.proximalityGapStat < 0.9);
  CHECK(rep.irreducibilityFlag == Heuristic::LikelyHolds);
  CHECK(rep.arithmeticityFlag == ArithFlag::LikelyNonArithmetic);
  CHECK(rep.momentExponentProbe >= 1.0);
}

TEST_CASE("condition report on a point mass") {
  ConditionReport rep = check_conditions(testutil::point_mass_two(), 6, 50, 7);
  // A scalar multiple of the identity never contracts directions.
  CHECK(rep.proximalityGapStat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.irreducibilityFlag == Heuristic::LikelyFails);
  // No strictly positive entries off the diagonal, so the probe has no data.
  CHECK(rep.arithmeticityFlag == ArithFlag::Unknown);
  CHECK(rep.momentExponentProbe == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("condition report is deterministic in the seed") {
  ConditionReport a = check_conditions(testutil::positive_pair(), 6, 100, 99);
  ConditionReport b = check_conditions(testutil::positive_pair(), 6, 100, 99);
  CHECK(a.proximalityGapStat == b.proximalityGapStat);
  CHECK(a.witnessLength == b.witnessLength);
}
