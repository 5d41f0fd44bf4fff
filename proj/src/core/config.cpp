#include "config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rmp {

using nlohmann::json;

namespace {

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {
      "dim",        "matrixClass",     "normKind",        "matrices", "probabilities",
      "gridNodes",  "window",          "sNodes",          "nList",    "paths",
      "yList",      "intervalLo",      "intervalHi",      "target",   "x0Angle",
      "tiltS",      "conditionsDepth", "conditionsTrials", "seed",    "outDir"};
  return keys;
}

template <class T>
void pull(const json& doc, const char* key, T& into) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception& e) {
    fail(Err::ConfigInvalid, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require(doc.is_object(), Err::ConfigInvalid, "config root must be an object");
  for (const auto& item : doc.items())
    require(allowed_keys().count(item.key()) > 0, Err::ConfigInvalid,
            "unknown config key '" + item.key() + "'");

  ExperimentConfig cfg;
  pull(doc, "dim", cfg.dim);
  pull(doc, "matrixClass", cfg.matrixClass);
  pull(doc, "normKind", cfg.normKind);
  pull(doc, "matrices", cfg.matrices);
  pull(doc, "probabilities", cfg.probabilities);
  pull(doc, "gridNodes", cfg.gridNodes);
  pull(doc, "window", cfg.window);
  pull(doc, "sNodes", cfg.sNodes);
  pull(doc, "nList", cfg.nList);
  pull(doc, "paths", cfg.paths);
  pull(doc, "yList", cfg.yList);
  pull(doc, "intervalLo", cfg.intervalLo);
  pull(doc, "intervalHi", cfg.intervalHi);
  pull(doc, "target", cfg.target);
  pull(doc, "x0Angle", cfg.x0Angle);
  pull(doc, "tiltS", cfg.tiltS);
  pull(doc, "conditionsDepth", cfg.conditionsDepth);
  pull(doc, "conditionsTrials", cfg.conditionsTrials);
  pull(doc, "seed", cfg.seed);
  pull(doc, "outDir", cfg.outDir);

  require(cfg.dim >= 1, Err::ConfigInvalid, "dim must be at least 1");
  require(cfg.matrixClass == "invertible" || cfg.matrixClass == "positive", Err::ConfigInvalid,
          "matrixClass must be 'invertible' or 'positive'");
  require(cfg.normKind == "euclidean" || cfg.normKind == "l1", Err::ConfigInvalid,
          "normKind must be 'euclidean' or 'l1'");
  require(cfg.matrices.size() == cfg.probabilities.size(), Err::ConfigInvalid,
          "matrices and probabilities must have equal length");
  for (const auto& m : cfg.matrices)
    require(m.size() == static_cast<size_t>(cfg.dim) * static_cast<size_t>(cfg.dim),
            Err::ConfigInvalid, "each matrix needs dim*dim entries");
  require(cfg.gridNodes >= 64, Err::ConfigInvalid, "gridNodes must be at least 64");
  require(cfg.window > 0.0, Err::ConfigInvalid, "window must be positive");
  require(cfg.sNodes >= 17, Err::ConfigInvalid, "sNodes must be at least 17");
  require(!cfg.nList.empty(), Err::ConfigInvalid, "nList must be nonempty");
  for (long n : cfg.nList) require(n >= 1, Err::ConfigInvalid, "every n must be positive");
  require(cfg.paths >= 1, Err::ConfigInvalid, "paths must be positive");
  require(cfg.intervalLo < cfg.intervalHi, Err::ConfigInvalid,
          "intervalLo must be below intervalHi");
  require(cfg.target == "constant-one" || cfg.target == "first-coordinate" ||
              cfg.target == "centered-first-coordinate",
          Err::ConfigInvalid, "unknown target name");
  require(std::isfinite(cfg.x0Angle), Err::ConfigInvalid, "x0Angle must be finite");
  require(std::isfinite(cfg.tiltS), Err::ConfigInvalid, "tiltS must be finite");
  require(cfg.conditionsDepth >= 1 && cfg.conditionsTrials >= 1, Err::ConfigInvalid,
          "conditions probe sizes must be positive");
  require(!cfg.outDir.empty(), Err::ConfigInvalid, "outDir must be nonempty");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::IoError, "cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(Err::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["dim"] = cfg.dim;
  doc["matrixClass"] = cfg.matrixClass;
  doc["normKind"] = cfg.normKind;
  doc["matrices"] = cfg.matrices;
  doc["probabilities"] = cfg.probabilities;
  doc["gridNodes"] = cfg.gridNodes;
  doc["window"] = cfg.window;
  doc["sNodes"] = cfg.sNodes;
  doc["nList"] = cfg.nList;
  doc["paths"] = cfg.paths;
  doc["yList"] = cfg.yList;
  doc["intervalLo"] = cfg.intervalLo;
  doc["intervalHi"] = cfg.intervalHi;
  doc["target"] = cfg.target;
  doc["x0Angle"] = cfg.x0Angle;
  doc["tiltS"] = cfg.tiltS;
  doc["conditionsDepth"] = cfg.conditionsDepth;
  doc["conditionsTrials"] = cfg.conditionsTrials;
  doc["seed"] = cfg.seed;
  doc["outDir"] = cfg.outDir;
  return doc;
}

std::string canonical_dump(const json& doc) {
  // nlohmann objects keep keys sorted, so dump() is already canonical.
  return doc.dump();
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  uint64_t h = fnv1a(canonical_dump(config_json(cfg)));
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

Ensemble config_ensemble(const ExperimentConfig& cfg) {
  std::vector<Atom> atoms;
  if (cfg.matrices.empty()) {
    // Default: the conformal pair {2I, 3I} with equal weights.
    require(cfg.dim == 2, Err::ConfigInvalid, "default ensemble is 2x2; supply matrices");
    Eigen::MatrixXd two = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd three = 3.0 * Eigen::MatrixXd::Identity(2, 2);
    atoms.push_back({two, 0.5});
    atoms.push_back({three, 0.5});
  } else {
    for (size_t a = 0; a < cfg.matrices.size(); ++a) {
      Eigen::MatrixXd g(cfg.dim, cfg.dim);
      for (int i = 0; i < cfg.dim; ++i)
        for (int j = 0; j < cfg.dim; ++j)
          g(i, j) = cfg.matrices[a][static_cast<size_t>(i * cfg.dim + j)];
      atoms.push_back({g, cfg.probabilities[a]});
    }
  }
  MatrixClass cls = cfg.matrixClass == "positive" ? MatrixClass::Positive : MatrixClass::Invertible;
  NormKind norm = cfg.normKind == "l1" ? NormKind::L1 : NormKind::Euclidean;
  return build_ensemble(cfg.dim, cls, norm, atoms);
}

TargetFunction make_target(const std::string& name, double center) {
  if (name == "constant-one") return target_one();
  if (name == "first-coordinate") return target_coordinate(0);
  if (name == "centered-first-coordinate") {
    TargetFunction phi;
    phi.name = "centered-first-coordinate";
    phi.f = [center](const Direction& x) { return x.v(0) - center; };
    return phi;
  }
  fail(Err::ConfigInvalid, "unknown target name: " + name);
}

}  // namespace rmp
