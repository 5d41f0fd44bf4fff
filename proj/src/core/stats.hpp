#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rmp {

// Pairwise (cascade) summation: order-deterministic and accurate for the
// large path arrays produced by the samplers.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct MeanStderr {
  double mean;
  double se;  // jackknife standard error of the mean
};

// Mean with leave-one-out (jackknife) standard error; for a plain mean this
// coincides with sd/sqrt(R).
inline MeanStderr mean_stderr(std::span<const double> x) {
  size_t r = x.size();
  if (r == 0) return {0.0, 0.0};
  double m = pairwise_sum(x) / static_cast<double>(r);
  if (r == 1) return {m, 0.0};
  std::vector<double> dev2(r);
  for (size_t i = 0; i < r; ++i) {
    double d = x[i] - m;
    dev2[i] = d * d;
  }
  double ss = pairwise_sum(dev2);
  double se = std::sqrt(ss / (static_cast<double>(r - 1) * static_cast<double>(r)));
  return {m, se};
}

inline double normal_pdf(double y) {
  return std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double y) { return 0.5 * std::erfc(-y / std::sqrt(2.0)); }

}  // namespace rmp
