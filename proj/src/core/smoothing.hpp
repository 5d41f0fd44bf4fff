#pragma once

#include <complex>

#include "common.hpp"

namespace rmp {

// Compactly supported smoothing density on the line built from the C-infinity
// bump exp(-1/(1-x^2)): rho is the squared cosine transform of the bump
// (hence nonnegative with rho_hat supported on [-2,2]), b is the quantile
// constant with integral of rho over [-b,b] equal to 3/4, and rho_T is the
// rescaled, recentered family used at truncation level T.
class SmoothingKernel {
 public:
  SmoothingKernel();

  // Normalizer: integral of exp(-2/(1-x^2)) over [-1,1].
  double normalizer() const { return i2_; }
  double b() const { return b_; }

  double rho(double y) const;

  // Fourier transform of rho; identically zero for |t| >= 2, in [0,1].
  double rho_hat(double t) const;

  double rho_T(double y, double T) const;
  std::complex<double> rho_hat_T(double t, double T) const;

  // Integral of rho over [lo, hi] by piecewise adaptive quadrature.
  double mass_interval(double lo, double hi) const;

  // Integral of rho over [-halfWidth, halfWidth]; halfWidth 200 captures the
  // total mass to about 1e-10.
  double mass(double halfWidth = 200.0) const;

 private:
  double i2_ = 0.0;
  double b_ = 0.0;
};

}  // namespace rmp
