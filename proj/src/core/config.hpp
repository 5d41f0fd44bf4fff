#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemble.hpp"
#include "montecarlo.hpp"

namespace rmp {

// Experiment description: every field has a working default, unknown keys are
// rejected at parse time.  `threads` is runtime-only (CLI flag), never part
// of the config document or its hash, so artifacts stay identical across
// worker counts.
struct ExperimentConfig {
  int dim = 2;
  std::string matrixClass = "invertible";  // "invertible" | "positive"
  std::string normKind = "euclidean";      // "euclidean" | "l1"
  // One row-major dim*dim block per atom; defaults to the conformal pair
  // {2I, 3I} with equal weights.
  std::vector<std::vector<double>> matrices;
  std::vector<double> probabilities;

  int gridNodes = 512;
  double window = 0.2;  // fit and tilt window: s ranges over [-window, window]
  int sNodes = 17;

  std::vector<long> nList = {64, 256, 1024};
  long paths = 100000;
  std::vector<double> yList = {1.0, 2.0, 3.0};
  double intervalLo = -0.5;  // local-theorem window around the tilt center
  double intervalHi = 0.5;
  std::string target = "constant-one";  // | "first-coordinate" | "centered-first-coordinate"
  double x0Angle = 0.78539816339744831;
  double tiltS = 0.1;

  int conditionsDepth = 6;
  int conditionsTrials = 200;

  uint64_t seed = 12345;
  std::string outDir = "out";
  int threads = 1;  // runtime-only
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Canonical document (sorted keys, no runtime fields); hashing is FNV-1a over
// the serialized form.
nlohmann::json config_json(const ExperimentConfig& cfg);
std::string canonical_dump(const nlohmann::json& doc);
uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const ExperimentConfig& cfg);

Ensemble config_ensemble(const ExperimentConfig& cfg);
TargetFunction make_target(const std::string& name, double center = 0.0);

}  // namespace rmp
