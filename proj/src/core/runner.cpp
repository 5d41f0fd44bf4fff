#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rng.hpp"
#include "stats.hpp"

namespace rmp {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string hex16(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ensemble_hash(const ExperimentConfig& cfg) {
  json e = {{"dim", cfg.dim},
            {"matrixClass", cfg.matrixClass},
            {"normKind", cfg.normKind},
            {"matrices", cfg.matrices},
            {"probabilities", cfg.probabilities}};
  return hex16(fnv1a(e.dump()));
}

Direction start_direction(const ExperimentConfig& cfg, const Ensemble& ens) {
  if (ens.dim == 2) return direction_from_angle(cfg.x0Angle, ens);
  return project(Eigen::VectorXd::Ones(ens.dim), ens);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::IoError, "cannot open for writing: " + path);
  out << body;
  require(out.good(), Err::IoError, "write failed: " + path);
}

// One sampled CDF comparison: the empirical weighted CDF of the normalized
// log norm against a prediction function on the standard y grid.
struct CdfRun {
  EmpiricalTargetCdf cdf;
  SupGap gapNormal;
};

}  // namespace

SpectralContext make_context(const ExperimentConfig& cfg) {
  SpectralContext ctx;
  ctx.ens = std::make_unique<Ensemble>(config_ensemble(cfg));
  ctx.grid = std::make_unique<AngleGrid>(*ctx.ens, cfg.gridNodes);
  ctx.solver = std::make_unique<SpectralSolver>(*ctx.ens, *ctx.grid);
  ctx.curve = lambda_curve(*ctx.solver, chebyshev_nodes(cfg.window, cfg.sNodes), cfg.threads);
  ctx.cum = cumulants(ctx.curve);
  ctx.x0 = start_direction(cfg, *ctx.ens);

  const std::vector<double>& nu = ctx.solver->base().nuWeights;
  if (cfg.target == "centered-first-coordinate") {
    double center = 0.0;
    for (int j = 0; j < ctx.grid->size(); ++j) center += nu[static_cast<size_t>(j)] * ctx.grid->node(j).v(0);
    ctx.phiCenter = center;
  }
  ctx.phi = make_target(cfg.target, ctx.phiCenter);
  if (ctx.phi.constantOne) {
    ctx.nuPhi = 1.0;
  } else {
    double acc = 0.0;
    for (int j = 0; j < ctx.grid->size(); ++j) acc += nu[static_cast<size_t>(j)] * ctx.phi.f(ctx.grid->node(j));
    ctx.nuPhi = acc;
  }
  ctx.lambda = ctx.cum.gamma[0];
  ctx.sigma = std::sqrt(std::max(ctx.cum.sigma2, 0.0));
  return ctx;
}

RunResult run_simulate(const ExperimentConfig& cfg) {
  Ensemble ens = config_ensemble(cfg);
  Direction x0 = start_direction(cfg, ens);
  long n = cfg.nList.front();
  SampleSet set = simulate(ens, x0, n, cfg.paths, cfg.seed, cfg.threads);

  std::ostringstream csv;
  if (ens.dim == 2) {
    csv << "logNorm,angle,weight\n";
    for (long r = 0; r < set.R; ++r)
      csv << format_double(set.logNorms[static_cast<size_t>(r)]) << ','
          << format_double(set.endAngles[static_cast<size_t>(r)]) << ",1\n";
  } else {
    csv << "logNorm,weight";
    for (int i = 0; i < ens.dim; ++i) csv << ",c" << i;
    csv << '\n';
    for (long r = 0; r < set.R; ++r) {
      csv << format_double(set.logNorms[static_cast<size_t>(r)]) << ",1";
      for (int i = 0; i < ens.dim; ++i)
        csv << ',' << format_double(set.endCoords[static_cast<size_t>(r) * ens.dim + i]);
      csv << '\n';
    }
  }

  MeanStderr m = mean_stderr(set.logNorms);
  RunResult out;
  out.csv = csv.str();
  out.report = {{"seed", cfg.seed},     {"ensembleHash", ensemble_hash(cfg)},
                {"n", n},               {"R", cfg.paths},
                {"s", 0.0},             {"x0Angle", cfg.x0Angle},
                {"x0Snapped", false},   {"meanLogNorm", m.mean},
                {"meanLogNormStderr", m.se}};
  return out;
}

RunResult run_spectrum(const ExperimentConfig& cfg) {
  Ensemble ens = config_ensemble(cfg);
  AngleGrid grid(ens, cfg.gridNodes);
  SpectralSolver solver(ens, grid);
  std::vector<double> nodes = chebyshev_nodes(cfg.window, cfg.sNodes);

  std::ostringstream csv;
  csv << "s,kappa,lambda,gap,gapCollapse,residual,nuResidual,iterations\n";
  json rows = json::array();
  bool anyCollapse = false;
  for (double s : nodes) {
    SpectralSolution sol = solver.solve(s);
    anyCollapse = anyCollapse || sol.gapCollapse;
    csv << format_double(s) << ',' << format_double(sol.kappa) << ','
        << format_double(std::log(sol.kappa)) << ',' << format_double(sol.gap) << ','
        << (sol.gapCollapse ? 1 : 0) << ',' << format_double(sol.residual) << ','
        << format_double(sol.nuResidual) << ',' << sol.iterations << '\n';
    rows.push_back({{"s", s},
                    {"kappa", sol.kappa},
                    {"lambda", std::log(sol.kappa)},
                    {"gap", sol.gap},
                    {"gapCollapse", sol.gapCollapse},
                    {"residual", sol.residual},
                    {"iterations", sol.iterations}});
  }
  RunResult out;
  out.csv = csv.str();
  out.report = {{"window", cfg.window},
                {"gridNodes", cfg.gridNodes},
                {"anyGapCollapse", anyCollapse},
                {"nodes", rows}};
  return out;
}

RunResult run_cumulants(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);

  std::ostringstream csv;
  csv << "k,gamma\n";
  for (int k = 1; k <= 5; ++k)
    csv << k << ',' << format_double(ctx.cum.gamma[static_cast<size_t>(k - 1)]) << '\n';

  std::ostringstream curveCsv;
  curveCsv << "s,lambda,gap,residual\n";
  for (size_t i = 0; i < ctx.curve.sNodes.size(); ++i)
    curveCsv << format_double(ctx.curve.sNodes[i]) << ',' << format_double(ctx.curve.lambda[i])
             << ',' << format_double(ctx.curve.gap[i]) << ','
             << format_double(ctx.curve.residual[i]) << '\n';

  RunResult out;
  out.csv = csv.str();
  out.extraCsv.emplace_back("curve", curveCsv.str());
  out.report = {{"gamma", ctx.cum.gamma},
                {"sigma2", ctx.cum.sigma2},
                {"window", ctx.cum.window},
                {"fitResidual", ctx.cum.fitResidual},
                {"gapMin", ctx.cum.gapMin},
                {"anyGapCollapse", ctx.curve.anyGapCollapse},
                {"zetaAt0", zeta(ctx.cum, 0.0)},
                {"poly", ctx.cum.poly}};
  return out;
}

RunResult run_tilt(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);
  SpectralSolution sol = ctx.solver->solve(cfg.tiltS);
  TiltedKernel kern = tilted_kernel(*ctx.ens, sol, *ctx.grid);
  long n = cfg.nList.front();
  WeightedSampleSet wset =
      tilted_simulate(*ctx.ens, kern, *ctx.grid, ctx.x0, n, cfg.paths, cfg.seed, cfg.threads);
  MeanStderr wm = weight_mean(wset);

  std::ostringstream csv;
  csv << "logNorm,angle,weight\n";
  for (long r = 0; r < wset.base.R; ++r)
    csv << format_double(wset.base.logNorms[static_cast<size_t>(r)]) << ','
        << format_double(wset.base.endAngles[static_cast<size_t>(r)]) << ','
        << format_double(wset.weights[static_cast<size_t>(r)]) << '\n';

  RunResult out;
  out.csv = csv.str();
  out.report = {{"seed", cfg.seed},
                {"ensembleHash", ensemble_hash(cfg)},
                {"n", n},
                {"R", cfg.paths},
                {"s", cfg.tiltS},
                {"kappa", sol.kappa},
                {"x0Angle", cfg.x0Angle},
                {"x0Snapped", true},
                {"startNode", wset.startNode},
                {"startAngle", ctx.grid->angle(wset.startNode)},
                {"rejected", wset.rejected},
                {"weightMean", wm.mean},
                {"weightStderr", wm.se},
                {"meanLogNormPerStep", mean_stderr(wset.base.logNorms).mean / static_cast<double>(n)},
                {"tiltedDrift", curve_deriv(ctx.cum, cfg.tiltS)}};
  return out;
}

namespace {

RunResult verify_be(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);
  std::vector<double> yGrid =
      uniform_grid(criteria::kCdfLo, criteria::kCdfHi, criteria::kCdfPoints);

  std::ostringstream csv;
  csv << "n,gap,argmaxY,seAtArgmax,scaledGap\n";
  json perN = json::array();
  std::vector<double> ns, gaps;
  double maxScaled = 0.0, minScaled = HUGE_VAL;
  // MC noise budget: the pass decision deflates the largest scaled gap and
  // inflates the smallest by 3 stderr at the respective argmax.
  double maxScaledLow = 0.0, minScaledHigh = HUGE_VAL;
  for (long n : cfg.nList) {
    SampleSet set = simulate(*ctx.ens, ctx.x0, n, cfg.paths, cfg.seed, cfg.threads);
    std::vector<double> phiVals = evaluate_target(ctx.phi, set, *ctx.ens);
    EmpiricalTargetCdf cdf = target_cdf(set, phiVals, nullptr, ctx.lambda, ctx.sigma, yGrid);
    SupGap g = sup_gap(cdf, [&](double y) { return ctx.nuPhi * normal_cdf(y); });
    double sqrtN = std::sqrt(static_cast<double>(n));
    double scaled = sqrtN * g.gap;
    maxScaled = std::max(maxScaled, scaled);
    minScaled = std::min(minScaled, scaled);
    double margin = 3.0 * sqrtN * g.seAtArgmax;
    maxScaledLow = std::max(maxScaledLow, scaled - margin);
    minScaledHigh = std::min(minScaledHigh, scaled + margin);
    ns.push_back(static_cast<double>(n));
    gaps.push_back(g.gap);
    csv << n << ',' << format_double(g.gap) << ',' << format_double(g.argmaxY) << ','
        << format_double(g.seAtArgmax) << ',' << format_double(scaled) << '\n';
    perN.push_back({{"n", n},
                    {"gap", g.gap},
                    {"argmaxY", g.argmaxY},
                    {"seAtArgmax", g.seAtArgmax},
                    {"scaledGap", scaled}});
  }
  double ratio = minScaled > 0.0 ? maxScaled / minScaled : HUGE_VAL;
  double budgetedRatio =
      minScaledHigh > 0.0 ? std::max(maxScaledLow, 0.0) / minScaledHigh : HUGE_VAL;
  bool pass = budgetedRatio <= criteria::kBeRatioMax;
  RunResult out;
  out.exitCode = pass ? 0 : 2;
  out.csv = csv.str();
  out.report = {{"which", "be"},
                {"pass", pass},
                {"lambda", ctx.lambda},
                {"sigma", ctx.sigma},
                {"nuPhi", ctx.nuPhi},
                {"target", ctx.phi.name},
                {"scaledGapRatio", ratio},
                {"scaledGapRatioBudgeted", budgetedRatio},
                {"scaledGapRatioMax", criteria::kBeRatioMax},
                {"constantC", maxScaled},
                {"perN", perN}};
  if (ns.size() >= 2) out.report["rateExponent"] = rate_fit(ns, gaps);
  return out;
}

RunResult verify_edgeworth(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);
  double bphi = b_phi_spectral(*ctx.solver, ctx.phi, ctx.x0);
  double g3 = ctx.cum.gamma[2];
  ConditionReport cond =
      check_conditions(*ctx.ens, cfg.conditionsDepth, cfg.conditionsTrials, cfg.seed);
  std::vector<double> yGrid =
      uniform_grid(criteria::kCdfLo, criteria::kCdfHi, criteria::kCdfPoints);

  std::ostringstream csv;
  csv << "n,gapNormal,gapEdgeworth,ratio,pass\n";
  json perN = json::array();
  bool pass = true;
  for (long n : cfg.nList) {
    SampleSet set = simulate(*ctx.ens, ctx.x0, n, cfg.paths, cfg.seed, cfg.threads);
    std::vector<double> phiVals = evaluate_target(ctx.phi, set, *ctx.ens);
    EmpiricalTargetCdf cdf = target_cdf(set, phiVals, nullptr, ctx.lambda, ctx.sigma, yGrid);
    SupGap gN = sup_gap(cdf, [&](double y) { return ctx.nuPhi * normal_cdf(y); });
    SupGap gE = sup_gap(cdf, [&](double y) {
      return edgeworth_prediction(y, n, ctx.nuPhi, bphi, ctx.sigma, g3);
    });
    double ratio = gN.gap > 0.0 ? gE.gap / gN.gap : HUGE_VAL;
    bool ok = ratio <= criteria::kEdgeworthFactor;
    pass = pass && ok;
    csv << n << ',' << format_double(gN.gap) << ',' << format_double(gE.gap) << ','
        << format_double(ratio) << ',' << (ok ? 1 : 0) << '\n';
    perN.push_back({{"n", n},
                    {"gapNormal", gN.gap},
                    {"gapEdgeworth", gE.gap},
                    {"ratio", ratio},
                    {"pass", ok}});
  }
  RunResult out;
  out.exitCode = pass ? 0 : 2;
  out.csv = csv.str();
  out.report = {{"which", "edgeworth"},
                {"pass", pass},
                {"gamma3", g3},
                {"bPhi", bphi},
                {"sigma", ctx.sigma},
                {"nuPhi", ctx.nuPhi},
                {"target", ctx.phi.name},
                {"ratioMax", criteria::kEdgeworthFactor},
                {"arithmeticityFlag", arith_name(cond.arithmeticityFlag)},
                {"perN", perN}};
  if (cond.arithmeticityFlag != ArithFlag::LikelyNonArithmetic)
    out.report["warnings"] = {"log spectrum may be arithmetic; the corrected expansion can fail"};
  return out;
}

// One tail or interval cell of the moderate-deviation verifications.
struct TiltCell {
  long n = 0;
  double y = 0.0;
  int tailSign = +1;
  double s = 0.0;
  TailEstimate est;
  double prediction = 0.0;
  double relErr = 0.0;
  double relSe = 0.0;
  double tol = 0.0;
  bool pass = false;
  long rejected = 0;
};

TiltCell run_tilt_cell(const ExperimentConfig& cfg, const SpectralContext& ctx, long n, double y,
                       int tailSign, bool interval, uint64_t cellSeed, double baseTol) {
  TiltCell cell;
  cell.n = n;
  cell.y = y;
  cell.tailSign = tailSign;
  // tailSign is the tilt direction: the tail side for the tail cells, the
  // sign of y for the interval cells (which receive |y| here).
  cell.s = solve_tilt(ctx.cum, std::abs(y), n, tailSign);
  SpectralSolution sol = ctx.solver->solve(cell.s);
  TiltedKernel kern = tilted_kernel(*ctx.ens, sol, *ctx.grid);
  WeightedSampleSet wset =
      tilted_simulate(*ctx.ens, kern, *ctx.grid, ctx.x0, n, cfg.paths, cellSeed, cfg.threads);
  cell.rejected = wset.rejected;
  std::vector<double> phiVals = evaluate_target(ctx.phi, wset.base, *ctx.ens);

  double sqrtn = std::sqrt(static_cast<double>(n));
  if (interval) {
    double center = n * ctx.lambda + ctx.sigma * sqrtn * y;
    cell.est = interval_estimate(wset, phiVals, center + cfg.intervalLo, center + cfg.intervalHi);
    cell.prediction =
        ctx.nuPhi * llt_prediction(cfg.intervalLo, cfg.intervalHi, y, n, ctx.sigma, ctx.cum);
  } else {
    double threshold = n * ctx.lambda + tailSign * ctx.sigma * sqrtn * y;
    cell.est = tailSign > 0 ? tail_estimate(wset, phiVals, threshold)
                            : interval_estimate(wset, phiVals, -HUGE_VAL, threshold);
    double tailProb = normal_cdf(-y);
    cell.prediction = ctx.nuPhi * tailProb * md_prediction(y, n, ctx.cum, tailSign > 0);
  }
  require(cell.prediction > 0.0, Err::Internal, "nonpositive tail prediction");
  cell.relErr = cell.est.p / cell.prediction - 1.0;
  cell.relSe = cell.est.p != 0.0 ? std::abs(cell.est.se / cell.est.p) : HUGE_VAL;
  cell.tol = baseTol + 3.0 * cell.relSe;
  cell.pass = std::abs(cell.relErr) <= cell.tol;
  return cell;
}

RunResult verify_md(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);
  std::ostringstream csv;
  csv << "n,y,tail,s,pHat,se,prediction,relErr,relSe,tol,pass,rejected\n";
  json cells = json::array();
  bool pass = true;
  uint64_t cellIndex = 0;
  for (long n : cfg.nList) {
    for (double y : cfg.yList) {
      require(y >= 0.0, Err::InvalidArgument, "tail levels must be nonnegative");
      for (int tailSign : {+1, -1}) {
        uint64_t cellSeed = mix_seed(cfg.seed, 1000 + cellIndex, 0);
        ++cellIndex;
        TiltCell c =
            run_tilt_cell(cfg, ctx, n, y, tailSign, false, cellSeed, criteria::kMdRelTol);
        pass = pass && c.pass;
        const char* tail = tailSign > 0 ? "upper" : "lower";
        csv << n << ',' << format_double(y) << ',' << tail << ',' << format_double(c.s) << ','
            << format_double(c.est.p) << ',' << format_double(c.est.se) << ','
            << format_double(c.prediction) << ',' << format_double(c.relErr) << ','
            << format_double(c.relSe) << ',' << format_double(c.tol) << ',' << (c.pass ? 1 : 0)
            << ',' << c.rejected << '\n';
        cells.push_back({{"n", n},
                         {"y", y},
                         {"tail", tail},
                         {"s", c.s},
                         {"pHat", c.est.p},
                         {"se", c.est.se},
                         {"prediction", c.prediction},
                         {"relErr", c.relErr},
                         {"relSe", c.relSe},
                         {"tol", c.tol},
                         {"pass", c.pass},
                         {"rejected", c.rejected}});
      }
    }
  }
  RunResult out;
  out.exitCode = pass ? 0 : 2;
  out.csv = csv.str();
  out.report = {{"which", "md"},
                {"pass", pass},
                {"lambda", ctx.lambda},
                {"sigma", ctx.sigma},
                {"nuPhi", ctx.nuPhi},
                {"target", ctx.phi.name},
                {"window", ctx.cum.window},
                {"relTol", criteria::kMdRelTol},
                {"cells", cells}};
  return out;
}

RunResult verify_llt(const ExperimentConfig& cfg) {
  SpectralContext ctx = make_context(cfg);
  std::ostringstream csv;
  csv << "n,y,s,pHat,se,prediction,relErr,relSe,tol,pass,rejected\n";
  json cells = json::array();
  bool pass = true;
  uint64_t cellIndex = 0;
  for (long n : cfg.nList) {
    for (double y : cfg.yList) {
      uint64_t cellSeed = mix_seed(cfg.seed, 2000 + cellIndex, 0);
      ++cellIndex;
      TiltCell c = run_tilt_cell(cfg, ctx, n, y, y >= 0.0 ? +1 : -1, true, cellSeed,
                                 criteria::kLltRelTol);
      pass = pass && c.pass;
      csv << n << ',' << format_double(y) << ',' << format_double(c.s) << ','
          << format_double(c.est.p) << ',' << format_double(c.est.se) << ','
          << format_double(c.prediction) << ',' << format_double(c.relErr) << ','
          << format_double(c.relSe) << ',' << format_double(c.tol) << ',' << (c.pass ? 1 : 0)
          << ',' << c.rejected << '\n';
      cells.push_back({{"n", n},
                       {"y", y},
                       {"s", c.s},
                       {"pHat", c.est.p},
                       {"se", c.est.se},
                       {"prediction", c.prediction},
                       {"relErr", c.relErr},
                       {"relSe", c.relSe},
                       {"tol", c.tol},
                       {"pass", c.pass},
                       {"rejected", c.rejected}});
    }
  }
  RunResult out;
  out.exitCode = pass ? 0 : 2;
  out.csv = csv.str();
  out.report = {{"which", "llt"},
                {"pass", pass},
                {"lambda", ctx.lambda},
                {"sigma", ctx.sigma},
                {"nuPhi", ctx.nuPhi},
                {"target", ctx.phi.name},
                {"intervalLo", cfg.intervalLo},
                {"intervalHi", cfg.intervalHi},
                {"relTol", criteria::kLltRelTol},
                {"cells", cells}};
  return out;
}

}  // namespace

RunResult run_verify(const ExperimentConfig& cfg, const std::string& which) {
  if (which == "be") return verify_be(cfg);
  if (which == "edgeworth") return verify_edgeworth(cfg);
  if (which == "md") return verify_md(cfg);
  if (which == "llt") return verify_llt(cfg);
  fail(Err::InvalidArgument, "unknown verification: " + which);
}

RunResult run_smoothing(const ExperimentConfig& cfg) {
  (void)cfg;
  SmoothingKernel kernel;

  std::ostringstream rhoCsv;
  rhoCsv << "y,rho\n";
  for (int i = 0; i <= 240; ++i) {
    double y = -6.0 + 0.05 * i;
    rhoCsv << format_double(y) << ',' << format_double(kernel.rho(y)) << '\n';
  }
  std::ostringstream hatCsv;
  hatCsv << "t,rhoHat\n";
  for (int i = 0; i <= 120; ++i) {
    double t = -3.0 + 0.05 * i;
    hatCsv << format_double(t) << ',' << format_double(kernel.rho_hat(t)) << '\n';
  }

  RunResult out;
  out.csv = rhoCsv.str();
  out.extraCsv.emplace_back("rho-hat", hatCsv.str());
  out.report = {{"normalizer", kernel.normalizer()},
                {"b", kernel.b()},
                {"mass", kernel.mass()},
                {"rhoAt0", kernel.rho(0.0)},
                {"rhoHatAt0", kernel.rho_hat(0.0)},
                {"rhoHatAt3", kernel.rho_hat(3.0)},
                {"quantileMass", kernel.mass_interval(-kernel.b(), kernel.b())}};
  return out;
}

RunResult run_conditions(const ExperimentConfig& cfg) {
  Ensemble ens = config_ensemble(cfg);
  ConditionReport rep = check_conditions(ens, cfg.conditionsDepth, cfg.conditionsTrials, cfg.seed);

  std::ostringstream csv;
  csv << "atom,p,normG,iota,bigN,sampled\n";
  for (size_t a = 0; a < ens.atoms.size(); ++a) {
    MatrixGauges g = matrix_gauges(ens.atoms[a].g, ens.cls, ens.norm);
    csv << a << ',' << format_double(ens.atoms[a].p) << ',' << format_double(g.normG) << ','
        << format_double(g.iota) << ',' << format_double(g.bigN) << ',' << (g.sampled ? 1 : 0)
        << '\n';
  }

  RunResult out;
  out.csv = csv.str();
  out.report = {{"allowableAll", rep.allowableAll},
                {"strictlyPositiveProductFound", rep.strictlyPositiveProductFound},
                {"witnessLength", rep.witnessLength},
                {"proximalityGapStat", rep.proximalityGapStat},
                {"irreducibilityFlag", heuristic_name(rep.irreducibilityFlag)},
                {"arithmeticityFlag", arith_name(rep.arithmeticityFlag)},
                {"momentExponentProbe", rep.momentExponentProbe}};
  return out;
}

RunResult run_collect(const std::string& subcommand, const ExperimentConfig& cfg) {
  std::string sub = subcommand;
  std::replace(sub.begin(), sub.end(), ' ', '-');

  RunResult res;
  if (sub == "simulate")
    res = run_simulate(cfg);
  else if (sub == "spectrum")
    res = run_spectrum(cfg);
  else if (sub == "cumulants")
    res = run_cumulants(cfg);
  else if (sub == "tilt")
    res = run_tilt(cfg);
  else if (sub.rfind("verify-", 0) == 0)
    res = run_verify(cfg, sub.substr(7));
  else if (sub == "smoothing")
    res = run_smoothing(cfg);
  else if (sub == "conditions")
    res = run_conditions(cfg);
  else
    fail(Err::InvalidArgument, "unknown subcommand: " + subcommand);

  std::error_code ec;
  std::filesystem::create_directories(cfg.outDir, ec);
  require(!ec, Err::IoError, "cannot create output directory: " + cfg.outDir);

  std::vector<std::string> artifacts;
  std::string base = cfg.outDir + "/" + sub;
  write_text(base + ".csv", res.csv);
  artifacts.push_back(sub + ".csv");
  for (const auto& [suffix, body] : res.extraCsv) {
    write_text(base + "-" + suffix + ".csv", body);
    artifacts.push_back(sub + "-" + suffix + ".csv");
  }
  write_text(base + ".json", res.report.dump(2) + "\n");
  artifacts.push_back(sub + ".json");

  json manifest = {{"subcommand", sub},
                   {"configHash", config_hash(cfg)},
                   {"config", config_json(cfg)},
                   {"seed", cfg.seed},
                   {"versions", {{"library", kLibraryVersion}, {"schema", kSchemaVersion}}},
                   {"artifacts", artifacts}};
  write_text(base + "-manifest.json", manifest.dump(2) + "\n");
  return res;
}

int run(const std::string& subcommand, const ExperimentConfig& cfg) {
  return run_collect(subcommand, cfg).exitCode;
}

}  // namespace rmp
