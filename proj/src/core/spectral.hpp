#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "grid.hpp"

namespace rmp {

// Dominant eigen-data of the weighted transfer operator at one real s.
// rValues is the positive eigenfunction normalized against the base (s=0)
// stationary weights; nuWeights is the eigenmeasure normalized to total mass 1.
struct SpectralSolution {
  double s = 0.0;
  double kappa = 1.0;
  std::vector<double> rValues;
  std::vector<double> nuWeights;
  double gap = 0.0;        // |second eigenvalue| / kappa estimate
  bool gapCollapse = false;
  double residual = 0.0;   // ||A r - kappa r||inf / (kappa ||r||inf)
  double nuResidual = 0.0; // ||nu A - kappa nu||1 / (kappa ||nu||1)
  int iterations = 0;
};

struct SpectralOptions {
  double tol = 1e-13;       // eigenvalue drift stop
  double residualTol = 1e-10;
  int maxIter = 20000;
  int gapIter = 400;        // deflated power steps for the gap diagnostic
};

// Dense M x M discretization: row j holds the weighted interpolation stencils
// of all atom images of node j.
Eigen::MatrixXd assemble(const Ensemble& ens, double s, const AngleGrid& grid);

class SpectralSolver {
 public:
  SpectralSolver(const Ensemble& ens, const AngleGrid& grid, SpectralOptions opt = {});

  const Ensemble& ensemble() const { return ens_; }
  const AngleGrid& grid() const { return grid_; }
  const SpectralOptions& options() const { return opt_; }
  const SpectralSolution& base() const { return base_; }

  SpectralSolution solve(double s) const;

 private:
  const Ensemble& ens_;
  const AngleGrid& grid_;
  SpectralOptions opt_;
  SpectralSolution base_;
};

struct LambdaCurve {
  std::vector<double> sNodes;
  std::vector<double> lambda;    // log kappa per node
  std::vector<double> gap;       // per-node diagnostics
  std::vector<double> residual;
  double window = 0.2;           // half-width of the s interval
  bool anyGapCollapse = false;
};

// Chebyshev node positions in [-smax, smax], count >= 17.
std::vector<double> chebyshev_nodes(double smax, int count);

LambdaCurve lambda_curve(const SpectralSolver& solver, const std::vector<double>& sNodes,
                         int threads = 1);

// Cumulants of the log norm: derivatives at 0 of the least-squares degree-8
// polynomial fit to the lambda curve.  poly holds the fitted coefficients in
// the scaled variable u = s / window, lowest degree first.
struct CumulantSet {
  std::array<double, 5> gamma{};  // gamma[k-1] = k-th derivative at 0
  double lambdaExp = 0.0;         // = gamma[0]
  double sigma2 = 0.0;            // = gamma[1]
  double window = 0.2;
  double fitResidual = 0.0;
  double gapMin = 0.0;            // worst (largest) gap diagnostic over the window
  std::array<double, 9> poly{};
};

inline constexpr int kZetaTruncationOrder = 3;

CumulantSet cumulants(const LambdaCurve& curve);

// Fitted curve evaluations; |s| must stay inside the window.
double curve_value(const CumulantSet& c, double s);
double curve_deriv(const CumulantSet& c, double s);
double curve_deriv2(const CumulantSet& c, double s);
double curve_deriv3(const CumulantSet& c, double s);

// Truncated Cramer series in the cumulants (three terms).
double zeta(const CumulantSet& c, double t);

// Unique root s of Lambda'(s) - Lambda'(0) = sign * sigma0 * y / sqrt(n).
double solve_tilt(const CumulantSet& c, double y, long n, int sign = +1);

// lambda_{s,z} = exp(Lambda(s+z) - Lambda(s) - Lambda'(s) z) from the fit.
double exponent_identity(const CumulantSet& c, double s, double z);

// Sampling table of the tilted node chain: per node j and atom i a jump
// probability with its image interpolation stencil, plus everything needed for
// the exact per-step likelihood correction p_i / wTilde.
struct TiltedKernel {
  double s = 0.0;
  double kappa = 1.0;
  int nodes = 0;
  int atoms = 0;
  std::vector<double> wTilde;        // nodes x atoms, rows sum to 1
  std::vector<double> Z;             // per-node raw weight sums
  std::vector<InterpWeights> jump;   // nodes x atoms image stencils
  std::vector<double> logCorrection; // nodes x atoms, log(p_i / wTilde)

  double w(int j, int i) const { return wTilde[static_cast<size_t>(j) * atoms + i]; }
  const InterpWeights& image(int j, int i) const {
    return jump[static_cast<size_t>(j) * atoms + i];
  }
  double correction(int j, int i) const {
    return logCorrection[static_cast<size_t>(j) * atoms + i];
  }
};

TiltedKernel tilted_kernel(const Ensemble& ens, const SpectralSolution& sol,
                           const AngleGrid& grid);

// Versioned structured-text snapshots of solver output, so later runs can
// reuse a solve without recomputing it.  Serializing a parsed record yields
// the original text byte for byte.
struct SolutionRecord {
  std::string space;  // grid space name ("projective-line" or "quadrant-arc")
  int nodes = 0;
  SpectralSolution sol;
};

std::string serialize_solution(const SpectralSolution& sol, const AngleGrid& grid);
SolutionRecord parse_solution(const std::string& text);

std::string serialize_cumulants(const CumulantSet& c);
CumulantSet parse_cumulants(const std::string& text);

}  // namespace rmp
