#include "grid.hpp"

#include <cmath>

namespace rmp {

Space space_for(const Ensemble& ens) {
  return ens.cls == MatrixClass::Positive ? Space::QuadrantArc : Space::ProjectiveLine;
}

AngleGrid::AngleGrid(const Ensemble& ens, int nodes) {
  require(ens.dim == 2, Err::UnsupportedDimension, "angle grids exist in dimension 2 only");
  require(nodes >= 64, Err::InvalidArgument, "grid needs at least 64 nodes");
  space_ = space_for(ens);
  if (space_ == Space::ProjectiveLine) {
    span_ = M_PI;
    step_ = span_ / nodes;
    angles_.resize(nodes);
    for (int j = 0; j < nodes; ++j) angles_[j] = j * step_;
  } else {
    span_ = M_PI / 2;
    step_ = span_ / (nodes - 1);
    angles_.resize(nodes);
    for (int j = 0; j < nodes; ++j) angles_[j] = j * step_;
    angles_.back() = span_;  // exact endpoint
  }
  dirs_.reserve(angles_.size());
  for (double t : angles_) dirs_.push_back(direction_from_angle(t, ens));
}

double AngleGrid::normalize_angle(double theta) const {
  if (space_ == Space::ProjectiveLine) {
    theta = std::fmod(theta, span_);
    if (theta < 0.0) theta += span_;
    if (theta >= span_) theta = 0.0;
    return theta;
  }
  if (theta < 0.0) return 0.0;
  if (theta > span_) return span_;
  return theta;
}

InterpWeights AngleGrid::interp(double theta) const {
  theta = normalize_angle(theta);
  const int M = size();
  InterpWeights w;
  if (space_ == Space::ProjectiveLine) {
    double u = theta / step_;
    int j = static_cast<int>(std::floor(u));
    if (j >= M) j = M - 1;
    double frac = u - j;
    w.j0 = j;
    w.j1 = (j + 1) % M;  // node M wraps to node 0 across the pi seam
    w.w0 = 1.0 - frac;
    w.w1 = frac;
  } else {
    double u = theta / step_;
    int j = static_cast<int>(std::floor(u));
    if (j >= M - 1) {
      j = M - 2;
    }
    double frac = u - j;
    if (frac < 0.0) frac = 0.0;
    if (frac > 1.0) frac = 1.0;
    w.j0 = j;
    w.j1 = j + 1;
    w.w0 = 1.0 - frac;
    w.w1 = frac;
  }
  // Snap to the node when the angle hits it to rounding error; keeps kernels
  // of angle-preserving ensembles exactly diagonal.
  if (w.w1 < 1e-9) {
    w.w0 = 1.0;
    w.w1 = 0.0;
  } else if (w.w0 < 1e-9) {
    w.j0 = w.j1;
    w.w0 = 1.0;
    w.w1 = 0.0;
  }
  return w;
}

double AngleGrid::value(const std::vector<double>& f, double theta) const {
  require(static_cast<int>(f.size()) == size(), Err::SpaceMismatch,
          "node vector length does not match the grid");
  InterpWeights w = interp(theta);
  return w.w0 * f[w.j0] + w.w1 * f[w.j1];
}

int AngleGrid::nearest(double theta) const {
  InterpWeights w = interp(theta);
  return w.w0 >= w.w1 ? w.j0 : w.j1;
}

}  // namespace rmp
