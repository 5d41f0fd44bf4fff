#pragma once

#include <Eigen/Dense>

#include "ensemble.hpp"

namespace rmp {

enum class SpaceTag { Projective, PositiveSphere };

SpaceTag space_tag(const Ensemble& ens);

// Projective point: unit vector under the ensemble norm with a canonical sign.
// Projective representatives have their first nonzero coordinate positive;
// positive-sphere representatives keep all coordinates >= 0.
struct Direction {
  Eigen::VectorXd v;
  SpaceTag space = SpaceTag::Projective;
};

Direction project(const Eigen::VectorXd& x, const Ensemble& ens);

struct ActResult {
  Direction x;
  double logGain;  // log |g x| for |x| = 1 under the ensemble norm
};

ActResult act(const Eigen::MatrixXd& g, const Direction& x, const Ensemble& ens);

// Metric of the space: |sin(angle)| between lines (projective) or the Hilbert
// cross-ratio metric (positive sphere).  Both take values in [0, 1].
double distance(const Direction& x, const Direction& y);

// sin of the angle between the lines through x and y (need not be unit).
double proj_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Cross-ratio metric on the positive cone: d = (1 - m m') / (1 + m m') with
// m(x, y) = min over i with y_i > 0 of x_i / y_i.
double hilbert_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Norm distance between sign classes: min(|x - y|, |x + y|).
double signclass_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, NormKind norm);

// Dimension-2 angle chart, theta in [0, pi) (projective) or [0, pi/2].
double angle_of(const Direction& x);
Direction direction_from_angle(double theta, const Ensemble& ens);

}  // namespace rmp
