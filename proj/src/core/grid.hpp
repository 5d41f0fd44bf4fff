#pragma once

#include <vector>

#include "geometry.hpp"

namespace rmp {

enum class Space { ProjectiveLine, QuadrantArc };

Space space_for(const Ensemble& ens);

// Interpolation stencil: value(theta) = w0 * f[j0] + w1 * f[j1].
struct InterpWeights {
  int j0 = 0;
  int j1 = 0;
  double w0 = 1.0;
  double w1 = 0.0;
};

// Uniform angle grid on the projective line [0, pi) (periodic) or the closed
// quadrant arc [0, pi/2].  Node j carries a unit direction under the ensemble
// norm; functions on the space are stored as node vectors and read back by
// linear interpolation.
class AngleGrid {
 public:
  AngleGrid(const Ensemble& ens, int nodes);

  int size() const { return static_cast<int>(angles_.size()); }
  Space space() const { return space_; }
  double angle(int j) const { return angles_[j]; }
  const Direction& node(int j) const { return dirs_[j]; }
  double step() const { return step_; }

  InterpWeights interp(double theta) const;
  double value(const std::vector<double>& f, double theta) const;

  // Nearest node index to the given angle.
  int nearest(double theta) const;

  // Wrap or clamp an arbitrary angle into the chart.
  double normalize_angle(double theta) const;

 private:
  Space space_;
  double step_;
  double span_;
  std::vector<double> angles_;
  std::vector<Direction> dirs_;
};

}  // namespace rmp
