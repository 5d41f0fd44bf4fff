#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/spectral.hpp"
#include "helpers.hpp"

using namespace rmp;

namespace {

// log kappa of a two-point conformal law {2,3} with weight p on 2.
double twopoint_lambda(double p, double s) {
  return std::log(p * std::pow(2.0, s) + (1.0 - p) * std::pow(3.0, s));
}

double twopoint_lambda_deriv(double p, double s) {
  double a = p * std::pow(2.0, s), b = (1.0 - p) * std::pow(3.0, s);
  return (a * std::log(2.0) + b * std::log(3.0)) / (a + b);
}

CumulantSet fit_cumulants(const SpectralSolver& solver, double window, int nodes) {
  return cumulants(lambda_curve(solver, chebyshev_nodes(window, nodes)));
}

}  // namespace

TEST_CASE("assembled operator has conformal row sums and scalar action") {
  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  double s = 0.37;
  Eigen::MatrixXd A = assemble(ens, s, grid);
  double expected = 0.5 * (std::pow(2.0, s) + std::pow(3.0, s));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
  Eigen::VectorXd out = A * ones;
  for (int j = 0; j < grid.size(); ++j) {
    CHECK(A.row(j).sum() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(out(j) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("assembled operator is stochastic at zero tilt") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 128);
  Eigen::MatrixXd A = assemble(ens, 0.0, grid);
  for (int j = 0; j < grid.size(); ++j) {
    CHECK(A.row(j).sum() == doctest::Approx(1.0).epsilon(1e-13));
    for (int k = 0; k < grid.size(); ++k) CHECK(A(j, k) >= 0.0);
  }
}

TEST_CASE("assembled row equals the defining sum at a node") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 513);  // odd count puts pi/4 exactly on node 256
  REQUIRE(grid.angle(256) == doctest::Approx(M_PI / 4).epsilon(1e-15));
  Eigen::MatrixXd A = assemble(ens, 1.0, grid);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
  double direct = 0.0;
  for (const Atom& a : ens.atoms) {
    direct += a.p * (a.g * grid.node(256).v).norm();
  }
  CHECK(direct == doctest::Approx(std::sqrt(6.5)).epsilon(1e-14));
  CHECK((A * ones)(256) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("dominant triple matches the scalar closed form") {
  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  SpectralSolution sol = solver.solve(0.1);
  double expected = 0.5 * (std::pow(2.0, 0.1) + std::pow(3.0, 0.1));
  CHECK(sol.kappa == doctest::Approx(expected).epsilon(1e-12));
  for (double r : sol.rValues) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
  double nuSum = 0.0;
  for (double w : sol.nuWeights) {
    CHECK(w >= 0.0);
    nuSum += w;
  }
  CHECK(nuSum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero tilt solves to the stationary triple") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 256);
  SpectralSolver solver(ens, grid);
  const SpectralSolution& sol = solver.base();
  CHECK(std::abs(sol.kappa - 1.0) <= 1e-10);
  for (double r : sol.rValues) CHECK(std::abs(r - 1.0) <= 1e-8);
  CHECK(sol.residual <= 1e-10);
  CHECK(sol.nuResidual <= 1e-10);
}

TEST_CASE("solution normalizations and residual gates on the pair") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 512);
  SpectralSolver solver(ens, grid);
  for (double s : {-0.2, -0.1, 0.1, 0.2}) {
    SpectralSolution sol = solver.solve(s);
    CHECK(sol.residual <= 1e-8);
    CHECK(sol.nuResidual <= 1e-8);
    CHECK_FALSE(sol.gapCollapse);
    double nuSum = 0.0;
    for (double w : sol.nuWeights) nuSum += w;
    CHECK(nuSum == doctest::Approx(1.0).epsilon(1e-12));
    // r is normalized against the zero-tilt stationary weights.
    double nu0r = 0.0;
    for (int j = 0; j < grid.size(); ++j)
      nu0r += solver.base().nuWeights[static_cast<size_t>(j)] * sol.rValues[static_cast<size_t>(j)];
    CHECK(nu0r == doctest::Approx(1.0).epsilon(1e-10));
    for (double r : sol.rValues) CHECK(r > 0.0);
  }
}

TEST_CASE("kappa is stable under grid refinement on the pair") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid g1(ens, 512), g2(ens, 1024);
  SpectralSolver s1(ens, g1), s2(ens, g2);
  for (double s : {-0.1, 0.1}) {
    CHECK(std::abs(s1.solve(s).kappa - s2.solve(s).kappa) <= 1e-6);
  }
}

TEST_CASE("lambda curve hits closed forms") {
  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  std::vector<double> nodes = chebyshev_nodes(0.2, 17);
  LambdaCurve curve = lambda_curve(solver, nodes);
  for (size_t k = 0; k < nodes.size(); ++k) {
    CHECK(std::abs(curve.lambda[k] - twopoint_lambda(0.5, nodes[k])) <= 1e-10);
  }

  Ensemble point = testutil::point_mass_two();
  AngleGrid pgrid(point, 64);
  SpectralSolver psolver(point, pgrid);
  LambdaCurve pcurve = lambda_curve(psolver, nodes);
  for (size_t k = 0; k < nodes.size(); ++k) {
    CHECK(std::abs(pcurve.lambda[k] - nodes[k] * std::log(2.0)) <= 1e-12);
  }

  Ensemble pair = testutil::positive_pair();
  AngleGrid prgrid(pair, 256);
  SpectralSolver prsolver(pair, prgrid);
  CHECK(std::abs(std::log(prsolver.base().kappa)) <= 1e-10);
}

TEST_CASE("curve is convex across the window") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 512);
  SpectralSolver solver(ens, grid);
  std::vector<double> nodes = chebyshev_nodes(0.2, 17);
  LambdaCurve curve = lambda_curve(solver, nodes);
  for (size_t k = 2; k < nodes.size(); ++k) {
    double h1 = nodes[k - 1] - nodes[k - 2];
    double h2 = nodes[k] - nodes[k - 1];
    double dd = 2.0 *
                ((curve.lambda[k] - curve.lambda[k - 1]) / h2 -
                 (curve.lambda[k - 1] - curve.lambda[k - 2]) / h1) /
                (h1 + h2);
    CHECK(dd >= -1e-9);
  }
}

TEST_CASE("cumulants match the symmetric two-point law") {
  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  CHECK(std::abs(c.gamma[0] - 0.895879734614027500) <= 1e-6);
  CHECK(std::abs(c.gamma[1] - 0.041100488473291357) <= 1e-6);
  CHECK(std::abs(c.gamma[2] - 0.0) <= 1e-6);
  CHECK(std::abs(c.gamma[3] - -0.003378500305486311) <= 1e-4);
  CHECK(std::abs(c.gamma[4] - 0.0) <= 1e-4);
  CHECK(c.lambdaExp == doctest::Approx(c.gamma[0]));
  CHECK(c.sigma2 == doctest::Approx(c.gamma[1]));
  CHECK(c.fitResidual <= 1e-9);
}

TEST_CASE("cumulants match the asymmetric two-point law") {
  Ensemble ens = testutil::conformal_asym();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  CHECK(std::abs(c.gamma[0] - 0.774240202181578186) <= 1e-6);
  CHECK(std::abs(c.gamma[1] - 0.026304312622906469) <= 1e-6);
  CHECK(std::abs(c.gamma[2] - 0.006399288576814635) <= 1e-6);
  CHECK(std::abs(c.gamma[3] - 0.000172979215640899) <= 1e-4);
  CHECK(std::abs(c.gamma[4] - -0.000967891101910177) <= 1e-4);
}

TEST_CASE("point mass has a linear curve") {
  Ensemble ens = testutil::point_mass_two();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  CHECK(std::abs(c.gamma[0] - std::log(2.0)) <= 1e-12);
  for (int k = 1; k < 5; ++k) CHECK(std::abs(c.gamma[static_cast<size_t>(k)]) <= 1e-9);
}

TEST_CASE("cramer series coefficients") {
  CumulantSet c;
  c.window = 4.0;

  c.gamma = {0.0, 1.0, 6.0, 0.0, 0.0};
  CHECK(zeta(c, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  c.gamma = {0.0, 1.0, 0.0, 24.0, 0.0};
  CHECK(zeta(c, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

  c.gamma = {0.0, 1.0, 0.0, 0.0, 0.0};
  for (double t : {-1.0, 0.0, 0.5}) CHECK(zeta(c, t) == doctest::Approx(0.0));

  c.gamma = {0.0, 0.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(zeta(c, 0.1), Error);
}

TEST_CASE("cramer series matches the asymmetric two-point closed form") {
  Ensemble ens = testutil::conformal_asym();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  // zeta(t) = 0.25 - 0.2708333... t + 0.31875 t^2 for this law.
  CHECK(std::abs(zeta(c, 0.0) - 0.25) <= 1e-5);
  CHECK(std::abs(zeta(c, 0.1) - 0.22610416666666667) <= 1e-5);
}

TEST_CASE("tilt equation solves exactly on a synthetic quadratic curve") {
  CumulantSet c;
  c.window = 1.0;
  c.gamma = {0.5, 0.04, 0.0, 0.0, 0.0};
  c.lambdaExp = 0.5;
  c.sigma2 = 0.04;
  c.poly = {0.0, 0.5, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  // Lambda'(s) - Lambda'(0) = sigma^2 s, so the root is y / (sigma sqrt(n)).
  double s = solve_tilt(c, 1.0, 100);
  CHECK(std::abs(s - 1.0 / (0.2 * 10.0)) <= 1e-9);
  CHECK(solve_tilt(c, 0.0, 100) == doctest::Approx(0.0));
  double sm = solve_tilt(c, 1.0, 100, -1);
  CHECK(std::abs(sm + 0.5) <= 1e-9);
  // Unreachable root reports the window breach.
  CHECK_THROWS_AS(solve_tilt(c, 1000.0, 100), Error);
}

TEST_CASE("tilt root agrees with independent closed-form root finding") {
  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  double sLib = solve_tilt(c, 1.0, 400);

  double target = twopoint_lambda_deriv(0.5, 0.0) + std::sqrt(c.gamma[1]) * 1.0 / 20.0;
  double lo = 0.0, hi = 0.2;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (twopoint_lambda_deriv(0.5, mid) < target ? lo : hi) = mid;
  }
  CHECK(std::abs(sLib - 0.5 * (lo + hi)) <= 1e-8);
}

TEST_CASE("exponent identity from the fitted curve") {
  Ensemble point = testutil::point_mass_two();
  AngleGrid pgrid(point, 64);
  SpectralSolver psolver(point, pgrid);
  CumulantSet cp = fit_cumulants(psolver, 0.2, 17);
  for (double s : {-0.1, 0.0, 0.05}) {
    for (double z : {-0.05, 0.02, 0.1}) {
      CHECK(std::abs(exponent_identity(cp, s, z) - 1.0) <= 1e-12);
    }
  }

  Ensemble ens = testutil::conformal_half();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);
  CHECK(exponent_identity(c, 0.0, 0.0) == doctest::Approx(1.0));
  double expected = std::exp(twopoint_lambda(0.5, 0.05) -
                             0.05 * twopoint_lambda_deriv(0.5, 0.0));
  CHECK(std::abs(exponent_identity(c, 0.0, 0.05) - expected) <= 1e-9);
  CHECK_THROWS_AS(exponent_identity(c, 0.15, 0.1), Error);
}

TEST_CASE("tilted kernel reduces to the plain chain at zero tilt") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 128);
  SpectralSolver solver(ens, grid);
  TiltedKernel ker = tilted_kernel(ens, solver.base(), grid);
  for (int j = 0; j < ker.nodes; ++j) {
    CHECK(std::abs(ker.Z[static_cast<size_t>(j)] - 1.0) <= 1e-9);
    for (int i = 0; i < ker.atoms; ++i) {
      CHECK(std::abs(ker.w(j, i) - ens.atoms[static_cast<size_t>(i)].p) <= 1e-9);
    }
  }
}

TEST_CASE("tilted kernel is node-independent for conformal laws") {
  Ensemble ens = testutil::conformal_asym();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  double s = 0.13;
  TiltedKernel ker = tilted_kernel(ens, solver.solve(s), grid);
  double norm = 0.8 * std::pow(2.0, s) + 0.2 * std::pow(3.0, s);
  double w2 = 0.8 * std::pow(2.0, s) / norm;
  for (int j = 0; j < ker.nodes; j += 5) {
    CHECK(std::abs(ker.w(j, 0) - w2) <= 1e-12);
    CHECK(std::abs(ker.w(j, 1) - (1.0 - w2)) <= 1e-12);
  }
}

TEST_CASE("tilted kernel rows are probability vectors with exact corrections") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 256);
  SpectralSolver solver(ens, grid);
  TiltedKernel ker = tilted_kernel(ens, solver.solve(0.15), grid);
  for (int j = 0; j < ker.nodes; ++j) {
    double sum = 0.0;
    for (int i = 0; i < ker.atoms; ++i) {
      double w = ker.w(j, i);
      CHECK(w >= 0.0);
      sum += w;
      CHECK(std::abs(ker.correction(j, i) -
                     (std::log(ens.atoms[static_cast<size_t>(i)].p) - std::log(w))) <= 1e-12);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("one-step tilted weights compose into the two-step weight") {
  // q1(x, g1) q1(g1 x, g2) = q2(x, g2 g1) for the solver's kappa and
  // interpolated eigenfunction; the identity is algebra, so machine accuracy.
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 512);
  SpectralSolver solver(ens, grid);
  SplitMix64 rng{90210};
  for (double s : {-0.2, -0.1, 0.05, 0.15, 0.2}) {
    SpectralSolution sol = solver.solve(s);
    auto rhat = [&](const Direction& x) {
      return grid.value(sol.rValues, angle_of(x));
    };
    auto q1 = [&](const Direction& x, const Eigen::MatrixXd& g) {
      ActResult ar = act(g, x, ens);
      return std::exp(s * ar.logGain) * rhat(ar.x) / (sol.kappa * rhat(x));
    };
    for (int k = 0; k < 200; ++k) {
      Direction x = direction_from_angle(rng.uniform() * M_PI / 2, ens);
      const Eigen::MatrixXd& g1 = ens.atoms[rng.next() & 1].g;
      const Eigen::MatrixXd& g2 = ens.atoms[rng.next() & 1].g;
      ActResult step1 = act(g1, x, ens);
      double lhs = q1(x, g1) * q1(step1.x, g2);
      ActResult whole = act(g2 * g1, x, ens);
      double rhs = std::exp(s * whole.logGain) * rhat(whole.x) / (sol.kappa * sol.kappa * rhat(x));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
  }
}

TEST_CASE("solution records round-trip byte for byte") {
  Ensemble ens = testutil::positive_pair();
  AngleGrid grid(ens, 128);
  SpectralSolver solver(ens, grid);
  SpectralSolution sol = solver.solve(0.1);

  std::string text = serialize_solution(sol, grid);
  SolutionRecord rec = parse_solution(text);
  CHECK(rec.space == "quadrant-arc");
  CHECK(rec.nodes == 128);
  CHECK(rec.sol.s == sol.s);
  CHECK(rec.sol.kappa == sol.kappa);
  CHECK(rec.sol.gap == sol.gap);
  CHECK(rec.sol.iterations == sol.iterations);
  REQUIRE(rec.sol.rValues.size() == sol.rValues.size());
  for (size_t j = 0; j < sol.rValues.size(); ++j) {
    CHECK(rec.sol.rValues[j] == sol.rValues[j]);
    CHECK(rec.sol.nuWeights[j] == sol.nuWeights[j]);
  }
  CHECK(serialize_solution(rec.sol, grid) == text);

  CHECK_THROWS_AS(parse_solution("{\"kind\":\"other\",\"version\":1}"), Error);
  CHECK_THROWS_AS(parse_solution("not a record"), Error);
}

TEST_CASE("cumulant records round-trip byte for byte") {
  Ensemble ens = testutil::conformal_asym();
  AngleGrid grid(ens, 64);
  SpectralSolver solver(ens, grid);
  CumulantSet c = fit_cumulants(solver, 0.2, 17);

  std::string text = serialize_cumulants(c);
  CumulantSet back = parse_cumulants(text);
  for (int k = 0; k < 5; ++k)
    CHECK(back.gamma[static_cast<size_t>(k)] == c.gamma[static_cast<size_t>(k)]);
  CHECK(back.window == c.window);
  CHECK(back.lambdaExp == c.gamma[0]);
  CHECK(back.sigma2 == c.gamma[1]);
  for (int k = 0; k < 9; ++k)
    CHECK(back.poly[static_cast<size_t>(k)] == c.poly[static_cast<size_t>(k)]);
  CHECK(serialize_cumulants(back) == text);
}
