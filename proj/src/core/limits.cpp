#include "limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stats.hpp"

namespace rmp {

std::vector<double> uniform_grid(double lo, double hi, int points) {
  require(points >= 2, Err::InvalidArgument, "grid needs at least two points");
  require(hi > lo, Err::InvalidArgument, "grid bounds out of order");
  std::vector<double> out(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i)
    out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (points - 1.0);
  return out;
}

EmpiricalTargetCdf target_cdf(const SampleSet& set, const std::vector<double>& phiVals,
                              const std::vector<double>* weights, double lambda, double sigma,
                              const std::vector<double>& yGrid) {
  const size_t R = set.logNorms.size();
  require(R >= 1, Err::InvalidArgument, "empty sample set");
  require(phiVals.size() == R, Err::InvalidArgument, "target values do not match sample count");
  require(weights == nullptr || weights->size() == R, Err::InvalidArgument,
          "weights do not match sample count");
  require(sigma > 1e-12, Err::DegenerateVariance, "sigma too small for normalization");

  const double scale = sigma * std::sqrt(static_cast<double>(set.n));
  std::vector<std::pair<double, double>> zc(R);
  for (size_t r = 0; r < R; ++r) {
    double z = (set.logNorms[r] - set.n * lambda) / scale;
    double c = phiVals[r] * (weights ? (*weights)[r] : 1.0);
    zc[r] = {z, c};
  }
  std::sort(zc.begin(), zc.end());

  // Prefix sums of the weighted target values and their squares let every
  // grid point be answered with one binary search.
  std::vector<double> ps(R + 1, 0.0), ps2(R + 1, 0.0);
  for (size_t r = 0; r < R; ++r) {
    ps[r + 1] = ps[r] + zc[r].second;
    ps2[r + 1] = ps2[r] + zc[r].second * zc[r].second;
  }

  EmpiricalTargetCdf out;
  out.y = yGrid;
  out.value.resize(yGrid.size());
  out.se.resize(yGrid.size());
  out.phiTotal = ps[R] / static_cast<double>(R);
  const double Rd = static_cast<double>(R);
  for (size_t i = 0; i < yGrid.size(); ++i) {
    auto it = std::upper_bound(zc.begin(), zc.end(), std::make_pair(yGrid[i], HUGE_VAL));
    size_t k = static_cast<size_t>(it - zc.begin());
    double mean = ps[k] / Rd;
    // Same leave-one-out convention as mean_stderr.
    double ss = ps2[k] - Rd * mean * mean;
    if (ss < 0.0) ss = 0.0;
    out.value[i] = mean;
    out.se[i] = R > 1 ? std::sqrt(ss / ((Rd - 1.0) * Rd)) : 0.0;
  }
  return out;
}

double edgeworth_prediction(double y, long n, double nuPhi, double bPhi, double sigma,
                            double gamma3) {
  require(n >= 1, Err::InvalidArgument, "n must be positive");
  require(sigma > 1e-12, Err::DegenerateVariance, "sigma too small");
  const double sqrtn = std::sqrt(static_cast<double>(n));
  const double pdf = normal_pdf(y);
  double body = normal_cdf(y) + gamma3 / (6.0 * sigma * sigma * sigma * sqrtn) * (1.0 - y * y) * pdf;
  return nuPhi * body - bPhi / (sigma * sqrtn) * pdf;
}

double md_prediction(double y, long n, const CumulantSet& c, bool upper) {
  require(n >= 1, Err::InvalidArgument, "n must be positive");
  require(y >= 0.0, Err::InvalidArgument, "tail point must be nonnegative");
  const double sqrtn = std::sqrt(static_cast<double>(n));
  const double t = y / sqrtn;
  require(std::abs(t) <= 0.5 * c.window, Err::OutsideWindow,
          "y/sqrt(n) exceeds half the fitted window");
  const double y3 = y * y * y;
  if (upper) return std::exp(y3 / sqrtn * zeta(c, t));
  return std::exp(-y3 / sqrtn * zeta(c, -t));
}

double llt_prediction(double a1, double a2, double y, long n, double sigma,
                      const CumulantSet& c) {
  require(n >= 1, Err::InvalidArgument, "n must be positive");
  require(a1 < a2, Err::InvalidArgument, "interval endpoints out of order");
  require(sigma > 1e-12, Err::DegenerateVariance, "sigma too small");
  const double sqrtn = std::sqrt(static_cast<double>(n));
  const double t = y / sqrtn;
  require(std::abs(t) <= 0.5 * c.window, Err::OutsideWindow,
          "y/sqrt(n) exceeds half the fitted window");
  const double y3 = y * y * y;
  double expo = -0.5 * y * y + y3 / sqrtn * zeta(c, t);
  return (a2 - a1) / (sigma * std::sqrt(2.0 * M_PI * static_cast<double>(n))) * std::exp(expo);
}

static TailEstimate masked_mean(const WeightedSampleSet& set, const std::vector<double>& phiVals,
                                const std::vector<char>& mask) {
  const size_t R = set.base.logNorms.size();
  require(phiVals.size() == R, Err::InvalidArgument, "target values do not match sample count");
  size_t live = 0;
  for (double w : set.weights)
    if (w != 0.0) ++live;
  require(live > 0, Err::AllWeightsRejected, "every path weight was rejected");

  std::vector<double> vals(R);
  for (size_t r = 0; r < R; ++r) vals[r] = mask[r] ? set.weights[r] * phiVals[r] : 0.0;
  MeanStderr ms = mean_stderr(vals);
  return {ms.mean, ms.se};
}

TailEstimate tail_estimate(const WeightedSampleSet& set, const std::vector<double>& phiVals,
                           double threshold) {
  const size_t R = set.base.logNorms.size();
  std::vector<char> mask(R);
  for (size_t r = 0; r < R; ++r) mask[r] = set.base.logNorms[r] >= threshold ? 1 : 0;
  return masked_mean(set, phiVals, mask);
}

TailEstimate interval_estimate(const WeightedSampleSet& set, const std::vector<double>& phiVals,
                               double lo, double hi) {
  require(lo < hi, Err::InvalidArgument, "interval endpoints out of order");
  const size_t R = set.base.logNorms.size();
  std::vector<char> mask(R);
  for (size_t r = 0; r < R; ++r)
    mask[r] = (set.base.logNorms[r] >= lo && set.base.logNorms[r] <= hi) ? 1 : 0;
  return masked_mean(set, phiVals, mask);
}

double rate_fit(const std::vector<double>& ns, const std::vector<double>& gaps) {
  require(ns.size() == gaps.size(), Err::InvalidArgument, "size mismatch");
  require(ns.size() >= 2, Err::InvalidArgument, "need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) {
    require(ns[i] > 0.0 && gaps[i] > 0.0, Err::InvalidArgument, "log-log fit needs positive data");
    double x = std::log(ns[i]);
    double y = std::log(gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = m * sxx - sx * sx;
  require(std::abs(denom) > 1e-12, Err::InvalidArgument, "degenerate abscissae");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace rmp
