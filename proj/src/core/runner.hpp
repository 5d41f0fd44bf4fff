#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "limits.hpp"
#include "smoothing.hpp"

namespace rmp {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Pinned pass/fail tolerances for the verification subcommands.
namespace criteria {
inline constexpr double kBeRatioMax = 2.5;      // max/min of sqrt(n) * sup-gap
inline constexpr double kEdgeworthFactor = 0.6; // corrected gap vs plain normal gap
inline constexpr double kMdRelTol = 0.15;       // tail ratio, plus 3x relative stderr
inline constexpr double kLltRelTol = 0.15;      // interval ratio, plus 3x relative stderr
inline constexpr int kCdfPoints = 401;
inline constexpr double kCdfLo = -4.0;
inline constexpr double kCdfHi = 4.0;
}  // namespace criteria

// Everything the verification flows derive from a config before sampling.
// Solver members live behind stable pointers because SpectralSolver keeps
// references to the ensemble and grid.
struct SpectralContext {
  std::unique_ptr<Ensemble> ens;
  std::unique_ptr<AngleGrid> grid;
  std::unique_ptr<SpectralSolver> solver;
  LambdaCurve curve;
  CumulantSet cum;
  Direction x0;
  TargetFunction phi;
  double phiCenter = 0.0;
  double nuPhi = 1.0;  // stationary mean of phi
  double lambda = 0.0;
  double sigma = 0.0;
};

SpectralContext make_context(const ExperimentConfig& cfg);

struct RunResult {
  int exitCode = 0;  // 0 ok, 2 = ran correctly but a criterion failed
  nlohmann::json report;
  std::string csv;
  // (suffix, body) for subcommands that emit more than one table.
  std::vector<std::pair<std::string, std::string>> extraCsv;
};

RunResult run_simulate(const ExperimentConfig& cfg);
RunResult run_spectrum(const ExperimentConfig& cfg);
RunResult run_cumulants(const ExperimentConfig& cfg);
RunResult run_tilt(const ExperimentConfig& cfg);
RunResult run_verify(const ExperimentConfig& cfg, const std::string& which);
RunResult run_smoothing(const ExperimentConfig& cfg);
RunResult run_conditions(const ExperimentConfig& cfg);

// Dispatch by subcommand name ("verify be" or "verify-be" select a
// verification), write CSV + JSON + manifest artifacts into cfg.outDir, and
// return the result with its process exit code.
RunResult run_collect(const std::string& subcommand, const ExperimentConfig& cfg);
int run(const std::string& subcommand, const ExperimentConfig& cfg);

std::string format_double(double v);

}  // namespace rmp
