#pragma once

// Ensemble builders shared across the test suites.

#include <Eigen/Dense>
#include <vector>

#include "core/ensemble.hpp"

namespace testutil {

// Scalar-multiple-of-identity law in dimension 2: |g x| = c for every unit x,
// so log kappa(s) = log E[c^s] in closed form.
inline rmp::Ensemble conformal(const std::vector<double>& c, const std::vector<double>& p,
                               rmp::MatrixClass cls = rmp::MatrixClass::Invertible,
                               rmp::NormKind norm = rmp::NormKind::Euclidean) {
  std::vector<rmp::Atom> atoms;
  for (size_t i = 0; i < c.size(); ++i) {
    atoms.push_back({c[i] * Eigen::MatrixXd::Identity(2, 2), p[i]});
  }
  return rmp::build_ensemble(2, cls, norm, std::move(atoms));
}

inline rmp::Ensemble conformal_half() { return conformal({2.0, 3.0}, {0.5, 0.5}); }
inline rmp::Ensemble conformal_asym() { return conformal({2.0, 3.0}, {0.8, 0.2}); }

// Asymmetric three-point law with rationally independent log factors; the
// skewed, non-lattice workhorse for the expansion checks.
inline rmp::Ensemble conformal_three() {
  return conformal({2.0, 3.0, 5.0}, {0.7, 0.2, 0.1});
}

inline rmp::Ensemble point_mass_two() { return conformal({2.0}, {1.0}); }

// Strictly positive pair with a genuinely direction-dependent action.
inline rmp::Ensemble positive_pair() {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 2, 1, 1, 1;
  b << 1, 1, 1, 2;
  return rmp::build_ensemble(2, rmp::MatrixClass::Positive, rmp::NormKind::Euclidean,
                             {{a, 0.5}, {b, 0.5}});
}

}  // namespace testutil
