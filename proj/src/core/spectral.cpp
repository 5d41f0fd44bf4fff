#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "parallel.hpp"

namespace rmp {

Eigen::MatrixXd assemble(const Ensemble& ens, double s, const AngleGrid& grid) {
  require(ens.dim == 2, Err::UnsupportedDimension, "operator assembly needs dimension 2");
  const int M = grid.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  for (int j = 0; j < M; ++j) {
    for (const Atom& a : ens.atoms) {
      ActResult ar = act(a.g, grid.node(j), ens);
      double weight = a.p * std::exp(s * ar.logGain);
      InterpWeights w = grid.interp(angle_of(ar.x));
      A(j, w.j0) += weight * w.w0;
      if (w.w1 != 0.0) A(j, w.j1) += weight * w.w1;
    }
  }
  return A;
}

namespace {

struct RawTriple {
  double kappa;
  Eigen::VectorXd r;
  Eigen::VectorXd nu;
  double residual;
  double nuResidual;
  int iterations;
};

RawTriple power_iterate(const Eigen::MatrixXd& A, const SpectralOptions& opt) {
  const int M = static_cast<int>(A.rows());
  Eigen::VectorXd r = Eigen::VectorXd::Ones(M);
  Eigen::VectorXd nu = Eigen::VectorXd::Constant(M, 1.0 / M);
  double kappa = 1.0;
  int it = 0;
  for (it = 1; it <= opt.maxIter; ++it) {
    Eigen::VectorXd rn = A * r;
    Eigen::VectorXd nun = A.transpose() * nu;
    double denom = nu.dot(r);
    require(denom > 0.0, Err::NoConvergence, "eigenvector iterates lost positivity");
    double kn = nu.dot(rn) / denom;
    require(kn > 0.0 && std::isfinite(kn), Err::NoConvergence,
            "eigenvalue iterate left the positive axis");
    double drift = std::abs(kn - kappa) / kn;
    kappa = kn;
    double resR = (rn - kappa * r).cwiseAbs().maxCoeff() /
                  (kappa * r.cwiseAbs().maxCoeff());
    double resN = (nun - kappa * nu).cwiseAbs().sum() / (kappa * nu.cwiseAbs().sum());
    r = rn / rn.cwiseAbs().maxCoeff();
    nu = nun / nun.sum();
    if (drift <= opt.tol && resR <= opt.residualTol && resN <= opt.residualTol) {
      RawTriple out;
      out.kappa = kappa;
      out.r = r;
      out.nu = nu;
      out.residual = resR;
      out.nuResidual = resN;
      out.iterations = it;
      return out;
    }
  }
  fail(Err::NoConvergence, "power iteration did not converge within maxIter");
}

// Spectral radius of the deflated operator, relative to kappa: geometric mean
// of late-stage growth factors of v -> Av - kappa r (nu v), nu scaled so
// nu r = 1.  A complex second pair makes single steps oscillate; the window
// average stays a usable diagnostic.
double deflated_gap(const Eigen::MatrixXd& A, const RawTriple& t, int iters) {
  const int M = static_cast<int>(A.rows());
  double nuDotR = t.nu.dot(t.r);
  if (nuDotR <= 0.0) return 1.0;
  Eigen::VectorXd nuHat = t.nu / nuDotR;
  Eigen::VectorXd v(M);
  for (int j = 0; j < M; ++j) v(j) = std::cos(2.0 * M_PI * j / M) + 0.5 * std::sin(6.0 * M_PI * j / M);
  v -= t.r * nuHat.dot(v);
  double vn = v.cwiseAbs().maxCoeff();
  if (vn == 0.0) return 0.0;
  v /= vn;
  // Geometric mean of the trailing growth factors; a fast-contracting deflated
  // operator can underflow early, in which case whatever steps ran suffice.
  const size_t window = static_cast<size_t>(std::min(50, std::max(1, iters / 2)));
  std::vector<double> lastLogs;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = A * v - t.kappa * t.r * nuHat.dot(v);
    if (k % 50 == 0) w -= t.r * nuHat.dot(w);  // re-deflate drift
    double wn = w.cwiseAbs().maxCoeff();
    if (wn <= 1e-250) break;
    lastLogs.push_back(std::log(wn));
    if (lastLogs.size() > window) lastLogs.erase(lastLogs.begin());
    v = w / wn;
  }
  if (lastLogs.empty()) return 0.0;
  double logSum = 0.0;
  for (double l : lastLogs) logSum += l;
  double rate = std::exp(logSum / lastLogs.size()) / t.kappa;
  return rate > 1.0 ? 1.0 : (rate < 0.0 ? 0.0 : rate);
}

}  // namespace

SpectralSolver::SpectralSolver(const Ensemble& ens, const AngleGrid& grid, SpectralOptions opt)
    : ens_(ens), grid_(grid), opt_(opt) {
  Eigen::MatrixXd A0 = assemble(ens_, 0.0, grid_);
  RawTriple t = power_iterate(A0, opt_);
  base_.s = 0.0;
  base_.kappa = t.kappa;
  base_.rValues.assign(t.r.data(), t.r.data() + t.r.size());
  base_.nuWeights.assign(t.nu.data(), t.nu.data() + t.nu.size());
  base_.residual = t.residual;
  base_.nuResidual = t.nuResidual;
  base_.iterations = t.iterations;
  // nu is already a probability vector; normalize r against it.
  double nur = 0.0;
  for (int j = 0; j < grid_.size(); ++j) nur += base_.nuWeights[j] * base_.rValues[j];
  require(nur > 0.0, Err::NoConvergence, "base eigenfunction has zero stationary mass");
  for (double& v : base_.rValues) v /= nur;
  base_.gap = deflated_gap(A0, t, opt_.gapIter);
  base_.gapCollapse = base_.gap > 0.95;
}

SpectralSolution SpectralSolver::solve(double s) const {
  Eigen::MatrixXd A = assemble(ens_, s, grid_);
  RawTriple t = power_iterate(A, opt_);
  SpectralSolution out;
  out.s = s;
  out.kappa = t.kappa;
  out.rValues.assign(t.r.data(), t.r.data() + t.r.size());
  out.nuWeights.assign(t.nu.data(), t.nu.data() + t.nu.size());
  out.residual = t.residual;
  out.nuResidual = t.nuResidual;
  out.iterations = t.iterations;
  double nur = 0.0;
  for (int j = 0; j < grid_.size(); ++j) nur += base_.nuWeights[j] * out.rValues[j];
  require(nur > 0.0, Err::NoConvergence,
          "eigenfunction has zero mass under the base stationary weights");
  for (double& v : out.rValues) v /= nur;
  out.gap = deflated_gap(A, t, opt_.gapIter);
  out.gapCollapse = out.gap > 0.95;
  return out;
}

std::vector<double> chebyshev_nodes(double smax, int count) {
  require(count >= 17, Err::InvalidArgument, "cumulant fit needs at least 17 nodes");
  std::vector<double> nodes(count);
  // Second-kind (Lobatto) points: endpoints included, so the recorded window
  // equals the configured half-width exactly; odd counts place a node at 0.
  for (int k = 0; k < count; ++k) {
    nodes[k] = -smax * std::cos(M_PI * k / (count - 1.0));
  }
  return nodes;
}

LambdaCurve lambda_curve(const SpectralSolver& solver, const std::vector<double>& sNodes,
                         int threads) {
  require(!sNodes.empty(), Err::InvalidArgument, "lambda curve needs at least one node");
  LambdaCurve out;
  out.sNodes = sNodes;
  const size_t N = sNodes.size();
  out.lambda.resize(N);
  out.gap.resize(N);
  out.residual.resize(N);
  out.window = 0.0;
  for (double s : sNodes) out.window = std::max(out.window, std::abs(s));
  std::vector<char> collapse(N, 0);
  parallel_blocks(N, 1, threads, [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) {
      SpectralSolution sol = solver.solve(sNodes[k]);
      out.lambda[k] = std::log(sol.kappa);
      out.gap[k] = sol.gap;
      out.residual[k] = sol.residual;
      collapse[k] = sol.gapCollapse ? 1 : 0;
    }
  });
  for (char c : collapse) {
    if (c) out.anyGapCollapse = true;
  }
  return out;
}

namespace {

// Coefficients of the Chebyshev polynomial T_k as monomials in u, k <= 8.
std::array<std::array<double, 9>, 9> chebyshev_monomials() {
  std::array<std::array<double, 9>, 9> T{};
  T[0][0] = 1.0;
  T[1][1] = 1.0;
  for (int k = 2; k <= 8; ++k) {
    for (int m = 0; m < 8; ++m) T[k][m + 1] += 2.0 * T[k - 1][m];
    for (int m = 0; m <= 8; ++m) T[k][m] -= T[k - 2][m];
  }
  return T;
}

double poly_eval(const std::array<double, 9>& c, double u) {
  double acc = 0.0;
  for (int k = 8; k >= 0; --k) acc = acc * u + c[k];
  return acc;
}

std::array<double, 9> poly_derivative(const std::array<double, 9>& c) {
  std::array<double, 9> d{};
  for (int k = 1; k <= 8; ++k) d[k - 1] = k * c[k];
  return d;
}

double scaled_u(const CumulantSet& c, double s) {
  require(std::abs(s) <= c.window * (1.0 + 1e-9), Err::OutsideWindow,
          "s lies outside the fitted window");
  return s / c.window;
}

}  // namespace

CumulantSet cumulants(const LambdaCurve& curve) {
  const int N = static_cast<int>(curve.sNodes.size());
  require(N >= 17, Err::InvalidArgument, "cumulant fit needs at least 17 nodes");
  CumulantSet out;
  out.window = curve.window;
  require(out.window > 0.0, Err::InvalidArgument, "fit window must have positive width");

  auto T = chebyshev_monomials();
  Eigen::MatrixXd design(N, 9);
  Eigen::VectorXd rhs(N);
  for (int row = 0; row < N; ++row) {
    double u = curve.sNodes[row] / out.window;
    for (int k = 0; k <= 8; ++k) design(row, k) = poly_eval(T[k], u);
    rhs(row) = curve.lambda[row];
  }
  Eigen::VectorXd chebCoef = design.colPivHouseholderQr().solve(rhs);

  for (int k = 0; k <= 8; ++k) {
    for (int m = 0; m <= 8; ++m) out.poly[m] += chebCoef(k) * T[k][m];
  }

  double maxAbs = 0.0;
  double maxErr = 0.0;
  for (int row = 0; row < N; ++row) {
    double u = curve.sNodes[row] / out.window;
    maxAbs = std::max(maxAbs, std::abs(curve.lambda[row]));
    maxErr = std::max(maxErr, std::abs(poly_eval(out.poly, u) - curve.lambda[row]));
  }
  out.fitResidual = maxErr;
  require(maxErr <= 1e-6 * (1.0 + maxAbs), Err::IllConditionedFit,
          "polynomial fit does not reproduce the curve on its own nodes");

  double fact = 1.0;
  double scale = 1.0;
  for (int k = 1; k <= 5; ++k) {
    fact *= k;
    scale *= out.window;
    out.gamma[k - 1] = fact * out.poly[k] / scale;
  }
  out.lambdaExp = out.gamma[0];
  out.sigma2 = out.gamma[1];
  require(out.sigma2 >= -1e-10, Err::DegenerateVariance,
          "fitted variance is negative beyond tolerance");

  out.gapMin = 0.0;
  for (double g : curve.gap) out.gapMin = std::max(out.gapMin, g);
  return out;
}

double curve_value(const CumulantSet& c, double s) {
  return poly_eval(c.poly, scaled_u(c, s));
}

double curve_deriv(const CumulantSet& c, double s) {
  return poly_eval(poly_derivative(c.poly), scaled_u(c, s)) / c.window;
}

double curve_deriv2(const CumulantSet& c, double s) {
  auto d2 = poly_derivative(poly_derivative(c.poly));
  return poly_eval(d2, scaled_u(c, s)) / (c.window * c.window);
}

double curve_deriv3(const CumulantSet& c, double s) {
  auto d3 = poly_derivative(poly_derivative(poly_derivative(c.poly)));
  return poly_eval(d3, scaled_u(c, s)) / (c.window * c.window * c.window);
}

double zeta(const CumulantSet& c, double t) {
  const double g2 = c.gamma[1];
  const double g3 = c.gamma[2];
  const double g4 = c.gamma[3];
  const double g5 = c.gamma[4];
  require(g2 > 1e-12, Err::DegenerateVariance, "Cramer series needs positive variance");
  require(std::abs(t) <= c.window * (1.0 + 1e-9), Err::OutsideWindow,
          "Cramer series argument outside the window");
  double s2 = std::sqrt(g2);
  double c0 = g3 / (6.0 * g2 * s2);
  double c1 = (g4 * g2 - 3.0 * g3 * g3) / (24.0 * g2 * g2 * g2);
  double c2 = (g5 * g2 * g2 - 10.0 * g4 * g3 * g2 + 15.0 * g3 * g3 * g3) /
              (120.0 * std::pow(g2, 4.5));
  return c0 + c1 * t + c2 * t * t;
}

double solve_tilt(const CumulantSet& c, double y, long n, int sign) {
  require(y >= 0.0, Err::InvalidArgument, "tilt target y must be nonnegative");
  require(n >= 1, Err::InvalidArgument, "tilt target n must be positive");
  require(sign == 1 || sign == -1, Err::InvalidArgument, "tilt sign must be +-1");
  require(c.sigma2 > 1e-12, Err::DegenerateVariance, "tilting needs positive variance");
  if (y == 0.0) return 0.0;
  double target = sign * std::sqrt(c.sigma2) * y / std::sqrt(static_cast<double>(n));
  double d0 = curve_deriv(c, 0.0);
  double lo = 0.0, hi = sign * c.window;
  if (sign < 0) std::swap(lo, hi);
  auto f = [&](double s) { return curve_deriv(c, s) - d0 - target; };
  double fLo = f(lo), fHi = f(hi);
  bool bracket = (fLo <= 0.0 && fHi >= 0.0) || (fLo >= 0.0 && fHi <= 0.0);
  require(bracket, Err::RootOutsideWindow,
          "tilting equation has no root inside the configured window");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (std::abs(fm) <= 1e-12) return mid;
    if ((fm < 0.0) == (fLo < 0.0)) {
      lo = mid;
      fLo = fm;
    } else {
      hi = mid;
    }
  }
  double mid = 0.5 * (lo + hi);
  require(std::abs(f(mid)) <= 1e-10, Err::NoConvergence,
          "tilt bisection stalled before reaching tolerance");
  return mid;
}

double exponent_identity(const CumulantSet& c, double s, double z) {
  double a = curve_value(c, s + z);  // OutsideWindow if s+z escapes
  double b = curve_value(c, s);
  double d = curve_deriv(c, s);
  return std::exp(a - b - d * z);
}

TiltedKernel tilted_kernel(const Ensemble& ens, const SpectralSolution& sol,
                           const AngleGrid& grid) {
  const int M = grid.size();
  const int K = static_cast<int>(ens.atoms.size());
  require(static_cast<int>(sol.rValues.size()) == M, Err::SpaceMismatch,
          "spectral solution does not match the grid");
  require(sol.residual <= 1e-8 && sol.nuResidual <= 1e-8, Err::NoConvergence,
          "tilting requires a converged spectral solution");
  TiltedKernel ker;
  ker.s = sol.s;
  ker.kappa = sol.kappa;
  ker.nodes = M;
  ker.atoms = K;
  ker.wTilde.resize(static_cast<size_t>(M) * K);
  ker.Z.resize(M);
  ker.jump.resize(static_cast<size_t>(M) * K);
  ker.logCorrection.resize(static_cast<size_t>(M) * K);
  for (int j = 0; j < M; ++j) {
    double rj = sol.rValues[j];
    require(rj > 0.0, Err::NegativeWeight, "eigenfunction must be positive at every node");
    double z = 0.0;
    for (int i = 0; i < K; ++i) {
      const Atom& a = ens.atoms[i];
      ActResult ar = act(a.g, grid.node(j), ens);
      InterpWeights w = grid.interp(angle_of(ar.x));
      double rImage = w.w0 * sol.rValues[w.j0] + w.w1 * sol.rValues[w.j1];
      double raw = a.p * std::exp(sol.s * ar.logGain) * rImage / (sol.kappa * rj);
      require(raw >= 0.0 && std::isfinite(raw), Err::NegativeWeight,
              "tilted weight left the positive axis");
      size_t idx = static_cast<size_t>(j) * K + i;
      ker.wTilde[idx] = raw;
      ker.jump[idx] = w;
      z += raw;
    }
    require(z > 0.0, Err::NegativeWeight, "tilted weights collapsed at a node");
    ker.Z[j] = z;
    for (int i = 0; i < K; ++i) {
      size_t idx = static_cast<size_t>(j) * K + i;
      ker.wTilde[idx] /= z;
      ker.logCorrection[idx] = std::log(ens.atoms[i].p) - std::log(ker.wTilde[idx]);
    }
  }
  return ker;
}

namespace {

const char* space_label(Space sp) {
  return sp == Space::ProjectiveLine ? "projective-line" : "quadrant-arc";
}

// JSON with sorted keys and shortest round-trip numbers; reserializing a
// parsed document reproduces the text exactly.
nlohmann::json parse_record(const std::string& text, const char* kind) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  require(!doc.is_discarded() && doc.is_object(), Err::ConfigInvalid,
          "record is not a structured object");
  require(doc.value("kind", std::string()) == kind, Err::ConfigInvalid,
          "record kind mismatch");
  require(doc.value("version", 0) == 1, Err::ConfigInvalid,
          "unsupported record version");
  return doc;
}

template <typename T>
T field(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  require(it != doc.end(), Err::ConfigInvalid,
          std::string("record is missing field ") + key);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(Err::ConfigInvalid, std::string("record field has wrong type: ") + key);
  }
}

}  // namespace

std::string serialize_solution(const SpectralSolution& sol, const AngleGrid& grid) {
  nlohmann::json doc;
  doc["kind"] = "spectral-solution";
  doc["version"] = 1;
  doc["grid"] = {{"nodes", grid.size()}, {"space", space_label(grid.space())}};
  doc["s"] = sol.s;
  doc["kappa"] = sol.kappa;
  doc["rValues"] = sol.rValues;
  doc["nuWeights"] = sol.nuWeights;
  doc["gap"] = sol.gap;
  doc["gapCollapse"] = sol.gapCollapse;
  doc["residual"] = sol.residual;
  doc["nuResidual"] = sol.nuResidual;
  doc["iterations"] = sol.iterations;
  return doc.dump(2) + "\n";
}

SolutionRecord parse_solution(const std::string& text) {
  nlohmann::json doc = parse_record(text, "spectral-solution");
  nlohmann::json grid = field<nlohmann::json>(doc, "grid");
  SolutionRecord rec;
  rec.space = field<std::string>(grid, "space");
  rec.nodes = field<int>(grid, "nodes");
  require(rec.space == "projective-line" || rec.space == "quadrant-arc",
          Err::ConfigInvalid, "unknown grid space name");
  rec.sol.s = field<double>(doc, "s");
  rec.sol.kappa = field<double>(doc, "kappa");
  rec.sol.rValues = field<std::vector<double>>(doc, "rValues");
  rec.sol.nuWeights = field<std::vector<double>>(doc, "nuWeights");
  rec.sol.gap = field<double>(doc, "gap");
  rec.sol.gapCollapse = field<bool>(doc, "gapCollapse");
  rec.sol.residual = field<double>(doc, "residual");
  rec.sol.nuResidual = field<double>(doc, "nuResidual");
  rec.sol.iterations = field<int>(doc, "iterations");
  require(static_cast<int>(rec.sol.rValues.size()) == rec.nodes &&
              static_cast<int>(rec.sol.nuWeights.size()) == rec.nodes,
          Err::ConfigInvalid, "record arrays do not match the grid size");
  return rec;
}

std::string serialize_cumulants(const CumulantSet& c) {
  nlohmann::json doc;
  doc["kind"] = "cumulant-set";
  doc["version"] = 1;
  doc["gamma"] = c.gamma;
  doc["window"] = c.window;
  doc["fitResidual"] = c.fitResidual;
  doc["gapMin"] = c.gapMin;
  doc["poly"] = c.poly;
  return doc.dump(2) + "\n";
}

CumulantSet parse_cumulants(const std::string& text) {
  nlohmann::json doc = parse_record(text, "cumulant-set");
  CumulantSet c;
  c.gamma = field<std::array<double, 5>>(doc, "gamma");
  c.window = field<double>(doc, "window");
  require(c.window > 0.0, Err::ConfigInvalid, "record window must be positive");
  c.fitResidual = field<double>(doc, "fitResidual");
  c.gapMin = field<double>(doc, "gapMin");
  c.poly = field<std::array<double, 9>>(doc, "poly");
  c.lambdaExp = c.gamma[0];
  c.sigma2 = c.gamma[1];
  return c;
}

}  // namespace rmp
