#include "smoothing.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace rmp {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double t = 1.0 - x * x;
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t);
}

// Substitution x = tanh(u) turns the flat-vanishing endpoints of [-1,1] into
// double-exponential decay, so a plain adaptive rule converges fast.
constexpr double kUMax = 4.3;

// Integral of cos(y x) exp(-1/(1-x^2)) over [-1,1].
double cosine_transform(double y) {
  auto f = [y](double u) {
    double c = std::cosh(u);
    double c2 = c * c;
    if (c2 > 760.0) return 0.0;
    return std::cos(y * std::tanh(u)) * std::exp(-c2) / c2;
  };
  return 2.0 * Quad::integrate(f, 0.0, kUMax, 15, 1e-13);
}

double squared_bump_integral() {
  auto f = [](double u) {
    double c = std::cosh(u);
    double c2 = c * c;
    if (c2 > 380.0) return 0.0;
    return std::exp(-2.0 * c2) / c2;
  };
  return 2.0 * Quad::integrate(f, 0.0, kUMax, 15, 1e-13);
}

}  // namespace

double SmoothingKernel::rho(double y) const {
  double c = cosine_transform(y);
  return c * c / (2.0 * M_PI * i2_);
}

double SmoothingKernel::rho_hat(double t) const {
  double ta = std::abs(t);
  if (ta >= 2.0) return 0.0;
  double lo = ta - 1.0;
  if (lo < -1.0) lo = -1.0;
  auto f = [ta](double y) { return bump(ta - y) * bump(y); };
  return Quad::integrate(f, lo, 1.0, 15, 1e-13) / i2_;
}

double SmoothingKernel::rho_T(double y, double T) const {
  require(T > 0.0, Err::InvalidArgument, "T must be positive");
  return 0.5 * T * rho(0.5 * T * y - b_);
}

std::complex<double> SmoothingKernel::rho_hat_T(double t, double T) const {
  require(T > 0.0, Err::InvalidArgument, "T must be positive");
  return std::polar(rho_hat(2.0 * t / T), -2.0 * b_ * t / T);
}

double SmoothingKernel::mass_interval(double lo, double hi) const {
  require(hi >= lo, Err::InvalidArgument, "interval endpoints out of order");
  auto f = [this](double y) { return rho(y); };
  double total = 0.0;
  // Unit-length pieces: rho oscillates on a scale of a few units, so each
  // piece is mild and the adaptive rule stays shallow.
  for (double a = lo; a < hi;) {
    double bEnd = std::min(a + 1.0, hi);
    total += Quad::integrate(f, a, bEnd, 10, 1e-12);
    a = bEnd;
  }
  return total;
}

double SmoothingKernel::mass(double halfWidth) const {
  require(halfWidth > 0.0, Err::InvalidArgument, "halfWidth must be positive");
  return 2.0 * mass_interval(0.0, halfWidth);
}

SmoothingKernel::SmoothingKernel() {
  i2_ = squared_bump_integral();

  // b solves: integral of rho over [-b, b] = 3/4. Cache unit-interval masses
  // so each bisection step only integrates the fractional remainder.
  double unit[4];
  for (int k = 0; k < 4; ++k) unit[k] = mass_interval(k, k + 1.0);
  auto half_mass = [&](double bb) {
    int whole = static_cast<int>(bb);
    double acc = 0.0;
    for (int k = 0; k < whole && k < 4; ++k) acc += unit[k];
    if (whole < 4 && bb > whole) acc += mass_interval(whole, bb);
    return acc;
  };
  double lo = 0.0, hi = 4.0;
  for (int iter = 0; iter < 60 && hi - lo > 1e-13; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (2.0 * half_mass(mid) < 0.75)
      lo = mid;
    else
      hi = mid;
  }
  b_ = 0.5 * (lo + hi);
  require(std::abs(2.0 * half_mass(b_) - 0.75) <= 1e-10, Err::Internal,
          "quantile bisection did not converge");
}

}  // namespace rmp
