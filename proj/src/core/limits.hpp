#pragma once

#include <vector>

#include "montecarlo.hpp"

namespace rmp {

// Weighted empirical CDF of the normalized log norm against the target
// function: F(y) = mean(weight * phi(X_n) * 1{(logNorm - n lambda)/(sigma
// sqrt(n)) <= y}) on a fixed y grid, with per-point standard errors.
struct EmpiricalTargetCdf {
  std::vector<double> y;
  std::vector<double> value;
  std::vector<double> se;
  double phiTotal = 0.0;  // value at +infinity, estimates E[weight phi(X_n)]
};

std::vector<double> uniform_grid(double lo, double hi, int points);

EmpiricalTargetCdf target_cdf(const SampleSet& set, const std::vector<double>& phiVals,
                              const std::vector<double>* weights, double lambda, double sigma,
                              const std::vector<double>& yGrid);

// Theorem-style closed-form predictions.
double edgeworth_prediction(double y, long n, double nuPhi, double bPhi, double sigma,
                            double gamma3);

// Ratio of the tail probability to 1 - Phi(y); the lower tail mirrors the
// series argument.
double md_prediction(double y, long n, const CumulantSet& c, bool upper);

// Interval probability around the moderate-deviation point y.
double llt_prediction(double a1, double a2, double y, long n, double sigma,
                      const CumulantSet& c);

struct TailEstimate {
  double p = 0.0;
  double se = 0.0;
};

// mean(weight * phi * 1{logNorm >= threshold}) over all paths.
TailEstimate tail_estimate(const WeightedSampleSet& set, const std::vector<double>& phiVals,
                           double threshold);

// Interval version: 1{lo <= logNorm <= hi}.
TailEstimate interval_estimate(const WeightedSampleSet& set, const std::vector<double>& phiVals,
                               double lo, double hi);

struct SupGap {
  double gap = 0.0;
  double argmaxY = 0.0;
  double seAtArgmax = 0.0;
};

template <class Fn>
SupGap sup_gap(const EmpiricalTargetCdf& cdf, Fn&& prediction) {
  SupGap out;
  for (size_t i = 0; i < cdf.y.size(); ++i) {
    double g = std::abs(cdf.value[i] - prediction(cdf.y[i]));
    if (g > out.gap) {
      out.gap = g;
      out.argmaxY = cdf.y[i];
      out.seAtArgmax = cdf.se[i];
    }
  }
  return out;
}

// Least-squares slope of log(gap) against log(n).
double rate_fit(const std::vector<double>& ns, const std::vector<double>& gaps);

}  // namespace rmp
