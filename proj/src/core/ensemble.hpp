#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace rmp {

enum class MatrixClass { Invertible, Positive };
enum class NormKind { Euclidean, L1 };

struct Atom {
  Eigen::MatrixXd g;
  double p;
};

// Finitely supported matrix law.  Validated once at construction; everything
// downstream relies on these invariants.
struct Ensemble {
  int dim = 0;
  MatrixClass cls = MatrixClass::Invertible;
  NormKind norm = NormKind::Euclidean;
  std::vector<Atom> atoms;
};

Ensemble build_ensemble(int dim, MatrixClass cls, NormKind norm, std::vector<Atom> atoms);

// Vector norm used for projective normalization and log gains.
double vec_norm(const Eigen::VectorXd& v, NormKind norm);

// Operator norm over the sphere of the given norm (for nonnegative matrices the
// positive part of the sphere attains the same value).
double matrix_norm(const Eigen::MatrixXd& g, NormKind norm);

// g is allowable when every row and every column has a strictly positive entry.
bool allowable(const Eigen::MatrixXd& g);

struct MatrixGauges {
  double normG = 0.0;  // operator norm
  double iota = 0.0;   // min |gx| over the relevant sphere (lower bound in the sampled case)
  double bigN = 0.0;   // max(normG, 1/iota)
  bool sampled = false;
};

MatrixGauges matrix_gauges(const Eigen::MatrixXd& g, MatrixClass cls, NormKind norm);

enum class Heuristic { LikelyHolds, LikelyFails, Unknown };
enum class ArithFlag { LikelyNonArithmetic, Suspect, Unknown };

// Diagnostic report; the flags are heuristics and never gate computation.
struct ConditionReport {
  bool allowableAll = false;
  bool strictlyPositiveProductFound = false;
  int witnessLength = -1;
  double proximalityGapStat = 1.0;  // median |lambda1/lambda2| over sampled products
  Heuristic irreducibilityFlag = Heuristic::Unknown;
  ArithFlag arithmeticityFlag = ArithFlag::Unknown;
  double momentExponentProbe = 0.0;  // largest probed eta with finite E[N(g)^eta]
};

ConditionReport check_conditions(const Ensemble& ens, int depth, int trials, uint64_t seed);

const char* heuristic_name(Heuristic h);
const char* arith_name(ArithFlag a);

}  // namespace rmp
