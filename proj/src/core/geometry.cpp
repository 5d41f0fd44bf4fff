#include "geometry.hpp"

#include <cmath>
#include <limits>

namespace rmp {

SpaceTag space_tag(const Ensemble& ens) {
  return ens.cls == MatrixClass::Positive ? SpaceTag::PositiveSphere : SpaceTag::Projective;
}

namespace {

void canonicalize_sign(Eigen::VectorXd& v, SpaceTag space) {
  if (space == SpaceTag::PositiveSphere) return;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (v(i) != 0.0) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

Direction project(const Eigen::VectorXd& x, const Ensemble& ens) {
  require(x.size() == ens.dim, Err::SpaceMismatch, "vector dimension does not match ensemble");
  SpaceTag tag = space_tag(ens);
  if (tag == SpaceTag::PositiveSphere) {
    require((x.array() >= 0.0).all(), Err::NegativeCoordinate,
            "positive-sphere points cannot have negative coordinates");
  }
  double n = vec_norm(x, ens.norm);
  require(n > 1e-300 && std::isfinite(n), Err::ZeroVector, "cannot project the zero vector");
  Direction d;
  d.v = x / n;
  d.space = tag;
  canonicalize_sign(d.v, tag);
  return d;
}

ActResult act(const Eigen::MatrixXd& g, const Direction& x, const Ensemble& ens) {
  require(x.space == space_tag(ens), Err::SpaceMismatch,
          "direction does not live in the ensemble's space");
  if (x.space == SpaceTag::PositiveSphere) {
    require((g.array() >= 0.0).all(), Err::SpaceMismatch,
            "only nonnegative matrices act on the positive sphere");
  }
  Eigen::VectorXd y = g * x.v;
  double n = vec_norm(y, ens.norm);
  require(n > 1e-300 && std::isfinite(n), Err::CollapsedImage,
          "matrix collapsed the direction to zero");
  ActResult out;
  out.x.v = y / n;
  out.x.space = x.space;
  canonicalize_sign(out.x.v, x.space);
  out.logGain = std::log(n);
  return out;
}

double distance(const Direction& x, const Direction& y) {
  require(x.space == y.space, Err::SpaceMismatch, "distance needs points of the same space");
  return x.space == SpaceTag::Projective ? proj_distance(x.v, y.v)
                                         : hilbert_distance(x.v, y.v);
}

double proj_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double nx2 = x.squaredNorm();
  double ny2 = y.squaredNorm();
  if (nx2 == 0.0 || ny2 == 0.0) return 0.0;
  if (x.size() == 2) {
    double cross = x(0) * y(1) - x(1) * y(0);
    double v = std::abs(cross) / std::sqrt(nx2 * ny2);
    return v > 1.0 ? 1.0 : v;
  }
  double dot = x.dot(y);
  double s2 = nx2 * ny2 - dot * dot;
  if (s2 <= 0.0) return 0.0;
  double v = std::sqrt(s2 / (nx2 * ny2));
  return v > 1.0 ? 1.0 : v;
}

double hilbert_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  auto m = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < a.size(); ++i) {
      if (b(i) > 0.0) best = std::min(best, a(i) / b(i));
    }
    return best;
  };
  double mm = m(x, y) * m(y, x);
  if (!std::isfinite(mm)) return 1.0;
  if (mm < 0.0) mm = 0.0;
  if (mm > 1.0) mm = 1.0;
  return (1.0 - mm) / (1.0 + mm);
}

double signclass_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, NormKind norm) {
  double dMinus = vec_norm(x - y, norm);
  double dPlus = vec_norm(x + y, norm);
  return std::min(dMinus, dPlus);
}

double angle_of(const Direction& x) {
  require(x.v.size() == 2, Err::UnsupportedDimension, "angle chart needs dimension 2");
  double t = std::atan2(x.v(1), x.v(0));
  if (t < 0.0) t += M_PI;    // fold the canonical representative into [0, pi)
  if (t >= M_PI) t -= M_PI;  // atan2 returns pi only for (negative, +-0)
  return t;
}

Direction direction_from_angle(double theta, const Ensemble& ens) {
  require(ens.dim == 2, Err::UnsupportedDimension, "angle chart needs dimension 2");
  Eigen::VectorXd x(2);
  x << std::cos(theta), std::sin(theta);
  if (ens.cls == MatrixClass::Positive) {
    // Clamp tiny negatives from the trig evaluation at the arc ends.
    if (x(0) < 0.0 && x(0) > -1e-15) x(0) = 0.0;
    if (x(1) < 0.0 && x(1) > -1e-15) x(1) = 0.0;
  }
  return project(x, ens);
}

}  // namespace rmp
