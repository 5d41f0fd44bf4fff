#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spectral.hpp"
#include "stats.hpp"

namespace rmp {

// Trajectories of the matrix walk started at x0: per path the accumulated log
// norm and the endpoint direction (stored as its angle chart value for d=2,
// flattened coordinates otherwise).
struct SampleSet {
  long n = 0;
  long R = 0;
  uint64_t seed = 0;
  Direction x0;
  std::vector<double> logNorms;
  std::vector<double> endAngles;  // d == 2
  std::vector<double> endCoords;  // d > 2, row-major R x d
};

// Tilted trajectories with exact per-path likelihood ratios against the
// sampling proposal.  A rejected (overflowed) path keeps weight 0.
struct WeightedSampleSet {
  SampleSet base;
  double s = 0.0;
  int startNode = 0;  // x0 after snapping to the grid
  std::vector<double> weights;
  long rejected = 0;
};

struct TargetFunction {
  std::function<double(const Direction&)> f;
  std::string name = "phi";
  bool constantOne = false;
};

TargetFunction target_one();
TargetFunction target_coordinate(int index);  // x -> coords[index]

// phi at each endpoint of a sample set.
std::vector<double> evaluate_target(const TargetFunction& phi, const SampleSet& set,
                                    const Ensemble& ens);

SampleSet simulate(const Ensemble& ens, const Direction& x0, long n, long R, uint64_t seed,
                   int threads = 1);

WeightedSampleSet tilted_simulate(const Ensemble& ens, const TiltedKernel& kernel,
                                  const AngleGrid& grid, const Direction& x0, long n, long R,
                                  uint64_t seed, int threads = 1);

// m_k = (1/n) * mean((logNorm - n*center)^k), k = 1..3, with delete-one
// jackknife standard errors.
struct SampleCumulants {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  double se1 = 0.0, se2 = 0.0, se3 = 0.0;
};

SampleCumulants sample_cumulants(const SampleSet& set, double center);

// Mean and stderr of the path weights (unbiasedness diagnostic).
MeanStderr weight_mean(const WeightedSampleSet& set);

// Bias term of the target function: MC form mean((logNorm - n*lambda) * phi(X_n))
// and the spectral form, a central difference in h of the rank-one projection
// (nu_h(phi) / nu_h(r_h)) * r_h(x).
struct BPhiEstimate {
  double mc = 0.0;
  double mcStderr = 0.0;
  double spectral = 0.0;
};

double b_phi_spectral(const SpectralSolver& solver, const TargetFunction& phi,
                      const Direction& x, double h = 1e-3);

BPhiEstimate estimate_b_phi(const SpectralSolver& solver, const TargetFunction& phi,
                            const Direction& x, double lambda, long n, long R, uint64_t seed,
                            double h = 1e-3, int threads = 1);

// Largest sampled ratio |phi(x) - phi(y)| / d(x, y)^gammaExp (reporting only).
double holder_diagnostic(const TargetFunction& phi, const Ensemble& ens, double gammaExp,
                         int samples, uint64_t seed);

}  // namespace rmp
