#include <rmprod/rmprod.h>

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>

#include "core/config.hpp"
#include "core/runner.hpp"

namespace {

thread_local std::string g_last_error;

template <typename F>
rmp_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RMP_OK;
  } catch (const rmp::Error& e) {
    g_last_error = e.what();
    return static_cast<rmp_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RMP_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RMP_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rmp::Direction start_direction(const rmp::Ensemble& ens, double angle) {
  if (ens.dim == 2) return rmp::direction_from_angle(angle, ens);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(ens.dim);
  return rmp::project(v, ens);
}

}  // namespace

struct rmp_ensemble {
  rmp::Ensemble ens;
};

struct rmp_solver {
  rmp::Ensemble ens;
  rmp::AngleGrid grid;
  rmp::SpectralSolver solver;

  rmp_solver(rmp::Ensemble e, int nodes)
      : ens(std::move(e)), grid(ens, nodes), solver(ens, grid) {}
};

struct rmp_cumulants {
  rmp::CumulantSet c;
};

extern "C" {

const char* rmp_version(void) { return rmp::kLibraryVersion; }

const char* rmp_status_name(int status) {
  if (status == RMP_OK) return "Ok";
  if (status >= 1 && status <= static_cast<int>(rmp::Err::Internal))
    return rmp::err_name(static_cast<rmp::Err>(status));
  return "Unknown";
}

const char* rmp_last_error(void) { return g_last_error.c_str(); }

void rmp_free_string(char* s) { std::free(s); }

rmp_status rmp_ensemble_create(int dim, const char* class_tag,
                               const char* norm_kind, const double* matrices,
                               const double* probs, int count,
                               rmp_ensemble** out) {
  return guarded([&] {
    rmp::require(class_tag != nullptr && norm_kind != nullptr &&
                     matrices != nullptr && probs != nullptr && out != nullptr,
                 rmp::Err::InvalidArgument, "null pointer argument");
    rmp::require(dim >= 1 && count >= 1, rmp::Err::InvalidArgument,
                 "need dim >= 1 and count >= 1");
    std::string cls = class_tag;
    rmp::MatrixClass mc;
    if (cls == "invertible")
      mc = rmp::MatrixClass::Invertible;
    else if (cls == "positive")
      mc = rmp::MatrixClass::Positive;
    else
      rmp::fail(rmp::Err::InvalidArgument, "unknown class tag: " + cls);
    std::string nrm = norm_kind;
    rmp::NormKind nk;
    if (nrm == "euclidean")
      nk = rmp::NormKind::Euclidean;
    else if (nrm == "l1")
      nk = rmp::NormKind::L1;
    else
      rmp::fail(rmp::Err::InvalidArgument, "unknown norm kind: " + nrm);

    std::vector<rmp::Atom> atoms;
    atoms.reserve(static_cast<size_t>(count));
    for (int a = 0; a < count; ++a) {
      Eigen::MatrixXd g(dim, dim);
      const double* block = matrices + static_cast<size_t>(a) * dim * dim;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = block[i * dim + j];
      atoms.push_back({std::move(g), probs[a]});
    }
    *out = new rmp_ensemble{rmp::build_ensemble(dim, mc, nk, std::move(atoms))};
  });
}

void rmp_ensemble_destroy(rmp_ensemble* e) { delete e; }

int rmp_ensemble_dim(const rmp_ensemble* e) {
  return e == nullptr ? 0 : e->ens.dim;
}

int rmp_ensemble_atoms(const rmp_ensemble* e) {
  return e == nullptr ? 0 : static_cast<int>(e->ens.atoms.size());
}

rmp_status rmp_solver_create(const rmp_ensemble* e, int grid_nodes,
                             rmp_solver** out) {
  return guarded([&] {
    rmp::require(e != nullptr && out != nullptr, rmp::Err::InvalidArgument,
                 "null pointer argument");
    *out = new rmp_solver(e->ens, grid_nodes);
  });
}

void rmp_solver_destroy(rmp_solver* s) { delete s; }

rmp_status rmp_solver_solve(rmp_solver* s, double tilt, double* kappa,
                            double* gap, double* residual, double* r_values,
                            double* nu_weights) {
  return guarded([&] {
    rmp::require(s != nullptr, rmp::Err::InvalidArgument, "null solver");
    rmp::SpectralSolution sol = s->solver.solve(tilt);
    if (kappa != nullptr) *kappa = sol.kappa;
    if (gap != nullptr) *gap = sol.gap;
    if (residual != nullptr) *residual = sol.residual;
    if (r_values != nullptr)
      std::memcpy(r_values, sol.rValues.data(),
                  sol.rValues.size() * sizeof(double));
    if (nu_weights != nullptr)
      std::memcpy(nu_weights, sol.nuWeights.data(),
                  sol.nuWeights.size() * sizeof(double));
  });
}

rmp_status rmp_cumulants_create(rmp_solver* s, double window, int s_nodes,
                                rmp_cumulants** out) {
  return guarded([&] {
    rmp::require(s != nullptr && out != nullptr, rmp::Err::InvalidArgument,
                 "null pointer argument");
    std::vector<double> nodes = rmp::chebyshev_nodes(window, s_nodes);
    rmp::LambdaCurve curve = rmp::lambda_curve(s->solver, nodes);
    *out = new rmp_cumulants{rmp::cumulants(curve)};
  });
}

void rmp_cumulants_destroy(rmp_cumulants* c) { delete c; }

rmp_status rmp_cumulants_gamma(const rmp_cumulants* c, double gamma[5]) {
  return guarded([&] {
    rmp::require(c != nullptr && gamma != nullptr, rmp::Err::InvalidArgument,
                 "null pointer argument");
    for (int k = 0; k < 5; ++k) gamma[k] = c->c.gamma[static_cast<size_t>(k)];
  });
}

rmp_status rmp_cumulants_zeta(const rmp_cumulants* c, double t, double* out) {
  return guarded([&] {
    rmp::require(c != nullptr && out != nullptr, rmp::Err::InvalidArgument,
                 "null pointer argument");
    *out = rmp::zeta(c->c, t);
  });
}

rmp_status rmp_cumulants_tilt(const rmp_cumulants* c, double y, long long n,
                              int sign, double* out) {
  return guarded([&] {
    rmp::require(c != nullptr && out != nullptr, rmp::Err::InvalidArgument,
                 "null pointer argument");
    *out = rmp::solve_tilt(c->c, y, n, sign);
  });
}

rmp_status rmp_simulate(const rmp_ensemble* e, double x0_angle, long long n,
                        long long paths, uint64_t seed, int threads,
                        double* log_norms) {
  return guarded([&] {
    rmp::require(e != nullptr && log_norms != nullptr,
                 rmp::Err::InvalidArgument, "null pointer argument");
    rmp::Direction x0 = start_direction(e->ens, x0_angle);
    rmp::SampleSet set = rmp::simulate(e->ens, x0, n, paths, seed, threads);
    std::memcpy(log_norms, set.logNorms.data(),
                set.logNorms.size() * sizeof(double));
  });
}

rmp_status rmp_run(const char* subcommand, const char* config_path,
                   const char* overrides_json, char** report_json,
                   char** primary_csv, int* exit_code) {
  return guarded([&] {
    rmp::require(subcommand != nullptr, rmp::Err::InvalidArgument,
                 "null subcommand");
    nlohmann::json doc = config_path != nullptr
                             ? rmp::config_json(rmp::load_config(config_path))
                             : rmp::config_json(rmp::ExperimentConfig{});
    int threads = 1;
    if (overrides_json != nullptr && overrides_json[0] != '\0') {
      nlohmann::json ov = nlohmann::json::parse(overrides_json, nullptr, false);
      rmp::require(!ov.is_discarded() && ov.is_object(),
                   rmp::Err::ConfigInvalid, "overrides must be a JSON object");
      // threads is a runtime knob, not part of the experiment identity, so it
      // bypasses the config schema.
      if (auto it = ov.find("threads"); it != ov.end()) {
        rmp::require(it->is_number_integer() && it->get<int>() >= 1,
                     rmp::Err::ConfigInvalid, "threads must be an integer >= 1");
        threads = it->get<int>();
        ov.erase(it);
      }
      doc.update(ov);
    }
    rmp::ExperimentConfig cfg = rmp::parse_config(doc);
    cfg.threads = threads;
    rmp::RunResult res = rmp::run_collect(subcommand, cfg);
    if (report_json != nullptr) *report_json = copy_string(res.report.dump(2) + "\n");
    if (primary_csv != nullptr) *primary_csv = copy_string(res.csv);
    if (exit_code != nullptr) *exit_code = res.exitCode;
  });
}

}  // extern "C"
