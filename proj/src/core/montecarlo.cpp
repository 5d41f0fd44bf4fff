#include "montecarlo.hpp"

#include <cmath>

#include "parallel.hpp"
#include "rng.hpp"

namespace rmp {

TargetFunction target_one() {
  TargetFunction t;
  t.f = [](const Direction&) { return 1.0; };
  t.name = "one";
  t.constantOne = true;
  return t;
}

TargetFunction target_coordinate(int index) {
  TargetFunction t;
  t.f = [index](const Direction& x) {
    require(index >= 0 && index < x.v.size(), Err::InvalidArgument,
            "coordinate index out of range");
    return x.v(index);
  };
  t.name = "coord" + std::to_string(index);
  return t;
}

std::vector<double> evaluate_target(const TargetFunction& phi, const SampleSet& set,
                                    const Ensemble& ens) {
  std::vector<double> out(set.logNorms.size());
  if (phi.constantOne) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  if (ens.dim == 2) {
    require(set.endAngles.size() == set.logNorms.size(), Err::InvalidArgument,
            "sample set carries no endpoints");
    for (size_t r = 0; r < out.size(); ++r) {
      out[r] = phi.f(direction_from_angle(set.endAngles[r], ens));
    }
  } else {
    require(set.endCoords.size() == set.logNorms.size() * static_cast<size_t>(ens.dim),
            Err::InvalidArgument, "sample set carries no endpoints");
    for (size_t r = 0; r < out.size(); ++r) {
      Eigen::VectorXd v(ens.dim);
      for (int i = 0; i < ens.dim; ++i) v(i) = set.endCoords[r * ens.dim + i];
      Direction d;
      d.v = v;
      d.space = space_tag(ens);
      out[r] = phi.f(d);
    }
  }
  return out;
}

namespace {

constexpr int64_t kPathBlock = 65536;
constexpr int kRenormEvery = 16;

// One walk step set for dimension 2, hand-rolled to keep the hot loop free of
// allocation; falls back to Eigen for higher dimensions.
struct Walk2 {
  double x0, x1;
  double acc = 0.0;

  void renorm() {
    double nrm = std::sqrt(x0 * x0 + x1 * x1);
    acc += std::log(nrm);
    x0 /= nrm;
    x1 /= nrm;
  }
};

int pick_atom(const Ensemble& ens, double u) {
  double cum = 0.0;
  int last = static_cast<int>(ens.atoms.size()) - 1;
  for (int i = 0; i < last; ++i) {
    cum += ens.atoms[i].p;
    if (u < cum) return i;
  }
  return last;
}

}  // namespace

SampleSet simulate(const Ensemble& ens, const Direction& x0, long n, long R, uint64_t seed,
                   int threads) {
  require(n >= 1, Err::InvalidArgument, "path length must be at least 1");
  require(R >= 1, Err::InvalidArgument, "need at least one path");
  require(x0.space == space_tag(ens), Err::SpaceMismatch,
          "start direction does not live in the ensemble's space");
  SampleSet set;
  set.n = n;
  set.R = R;
  set.seed = seed;
  set.x0 = x0;
  set.logNorms.resize(static_cast<size_t>(R));
  const int d = ens.dim;
  if (d == 2) {
    set.endAngles.resize(static_cast<size_t>(R));
    // Flatten atom matrices for the hot loop.
    const size_t K = ens.atoms.size();
    std::vector<double> m(K * 4);
    for (size_t i = 0; i < K; ++i) {
      m[i * 4 + 0] = ens.atoms[i].g(0, 0);
      m[i * 4 + 1] = ens.atoms[i].g(0, 1);
      m[i * 4 + 2] = ens.atoms[i].g(1, 0);
      m[i * 4 + 3] = ens.atoms[i].g(1, 1);
    }
    parallel_blocks(R, kPathBlock, threads, [&](int64_t begin, int64_t end) {
      for (int64_t r = begin; r < end; ++r) {
        SplitMix64 rng = path_rng(seed, Stream::SimulatePath, static_cast<uint64_t>(r));
        Walk2 w{x0.v(0), x0.v(1)};
        for (long k = 0; k < n; ++k) {
          int i = pick_atom(ens, rng.uniform());
          const double* g = &m[static_cast<size_t>(i) * 4];
          double y0 = g[0] * w.x0 + g[1] * w.x1;
          double y1 = g[2] * w.x0 + g[3] * w.x1;
          w.x0 = y0;
          w.x1 = y1;
          if ((k + 1) % kRenormEvery == 0) w.renorm();
        }
        Eigen::Vector2d v(w.x0, w.x1);
        double finalNorm = vec_norm(v, ens.norm);
        require(finalNorm > 0.0 && std::isfinite(finalNorm), Err::CollapsedImage,
                "walk collapsed to the zero vector");
        set.logNorms[static_cast<size_t>(r)] = w.acc + std::log(finalNorm);
        Direction dend;
        dend.v = v / finalNorm;
        dend.space = x0.space;
        set.endAngles[static_cast<size_t>(r)] = angle_of(dend);
      }
    });
  } else {
    set.endCoords.resize(static_cast<size_t>(R) * d);
    parallel_blocks(R, kPathBlock, threads, [&](int64_t begin, int64_t end) {
      for (int64_t r = begin; r < end; ++r) {
        SplitMix64 rng = path_rng(seed, Stream::SimulatePath, static_cast<uint64_t>(r));
        Eigen::VectorXd x = x0.v;
        double acc = 0.0;
        for (long k = 0; k < n; ++k) {
          int i = pick_atom(ens, rng.uniform());
          x = ens.atoms[i].g * x;
          if ((k + 1) % kRenormEvery == 0) {
            double nrm = x.norm();
            acc += std::log(nrm);
            x /= nrm;
          }
        }
        double finalNorm = vec_norm(x, ens.norm);
        require(finalNorm > 0.0 && std::isfinite(finalNorm), Err::CollapsedImage,
                "walk collapsed to the zero vector");
        set.logNorms[static_cast<size_t>(r)] = acc + std::log(finalNorm);
        x /= finalNorm;
        for (int i = 0; i < d; ++i) set.endCoords[static_cast<size_t>(r) * d + i] = x(i);
      }
    });
  }
  return set;
}

WeightedSampleSet tilted_simulate(const Ensemble& ens, const TiltedKernel& kernel,
                                  const AngleGrid& grid, const Direction& x0, long n, long R,
                                  uint64_t seed, int threads) {
  require(n >= 1, Err::InvalidArgument, "path length must be at least 1");
  require(R >= 1, Err::InvalidArgument, "need at least one path");
  require(kernel.nodes == grid.size(), Err::SpaceMismatch,
          "kernel was built for a different grid");
  require(ens.dim == 2, Err::UnsupportedDimension, "tilted walks need the angle grid (d=2)");
  const int K = kernel.atoms;
  require(K == static_cast<int>(ens.atoms.size()), Err::SpaceMismatch,
          "kernel was built for a different ensemble");

  WeightedSampleSet out;
  out.s = kernel.s;
  out.startNode = grid.nearest(angle_of(x0));
  Direction start = grid.node(out.startNode);
  out.base.n = n;
  out.base.R = R;
  out.base.seed = seed;
  out.base.x0 = start;
  out.base.logNorms.resize(static_cast<size_t>(R));
  out.base.endAngles.resize(static_cast<size_t>(R));
  out.weights.resize(static_cast<size_t>(R));

  const size_t Ka = ens.atoms.size();
  std::vector<double> m(Ka * 4);
  for (size_t i = 0; i < Ka; ++i) {
    m[i * 4 + 0] = ens.atoms[i].g(0, 0);
    m[i * 4 + 1] = ens.atoms[i].g(0, 1);
    m[i * 4 + 2] = ens.atoms[i].g(1, 0);
    m[i * 4 + 3] = ens.atoms[i].g(1, 1);
  }

  std::vector<int64_t> rejectedPerBlock((R + kPathBlock - 1) / kPathBlock, 0);
  parallel_blocks(R, kPathBlock, threads, [&](int64_t begin, int64_t end) {
    int64_t blockIdx = begin / kPathBlock;
    for (int64_t r = begin; r < end; ++r) {
      SplitMix64 rng = path_rng(seed, Stream::TiltedPath, static_cast<uint64_t>(r));
      int node = out.startNode;
      Walk2 w{start.v(0), start.v(1)};
      double logW = 0.0;
      for (long k = 0; k < n; ++k) {
        double u = rng.uniform();
        double cum = 0.0;
        int atom = K - 1;
        for (int i = 0; i < K - 1; ++i) {
          cum += kernel.w(node, i);
          if (u < cum) {
            atom = i;
            break;
          }
        }
        logW += kernel.correction(node, atom);
        const InterpWeights& jump = kernel.image(node, atom);
        if (jump.w1 == 0.0) {
          node = jump.j0;
        } else {
          node = (rng.uniform() < jump.w0) ? jump.j0 : jump.j1;
        }
        const double* g = &m[static_cast<size_t>(atom) * 4];
        double y0 = g[0] * w.x0 + g[1] * w.x1;
        double y1 = g[2] * w.x0 + g[3] * w.x1;
        w.x0 = y0;
        w.x1 = y1;
        if ((k + 1) % kRenormEvery == 0) w.renorm();
      }
      Eigen::Vector2d v(w.x0, w.x1);
      double finalNorm = vec_norm(v, ens.norm);
      require(finalNorm > 0.0 && std::isfinite(finalNorm), Err::CollapsedImage,
              "walk collapsed to the zero vector");
      out.base.logNorms[static_cast<size_t>(r)] = w.acc + std::log(finalNorm);
      Direction dend;
      dend.v = v / finalNorm;
      dend.space = start.space;
      out.base.endAngles[static_cast<size_t>(r)] = angle_of(dend);
      if (logW > 700.0) {
        out.weights[static_cast<size_t>(r)] = 0.0;
        ++rejectedPerBlock[static_cast<size_t>(blockIdx)];
      } else {
        out.weights[static_cast<size_t>(r)] = std::exp(logW);
      }
    }
  });
  for (int64_t c : rejectedPerBlock) out.rejected += c;
  require(out.rejected < R, Err::WeightOverflow,
          "every tilted path overflowed its weight");
  return out;
}

SampleCumulants sample_cumulants(const SampleSet& set, double center) {
  require(set.R >= 100, Err::InvalidArgument, "sample cumulants need at least 100 paths");
  const size_t R = set.logNorms.size();
  const double n = static_cast<double>(set.n);
  std::vector<double> p1(R), p2(R), p3(R);
  for (size_t r = 0; r < R; ++r) {
    double d = set.logNorms[r] - n * center;
    p1[r] = d;
    p2[r] = d * d;
    p3[r] = d * d * d;
  }
  MeanStderr s1 = mean_stderr(p1);
  MeanStderr s2 = mean_stderr(p2);
  MeanStderr s3 = mean_stderr(p3);
  SampleCumulants out;
  out.m1 = s1.mean / n;
  out.m2 = s2.mean / n;
  out.m3 = s3.mean / n;
  out.se1 = s1.se / n;
  out.se2 = s2.se / n;
  out.se3 = s3.se / n;
  return out;
}

MeanStderr weight_mean(const WeightedSampleSet& set) { return mean_stderr(set.weights); }

double b_phi_spectral(const SpectralSolver& solver, const TargetFunction& phi,
                      const Direction& x, double h) {
  require(h > 0.0, Err::InvalidArgument, "difference step must be positive");
  const AngleGrid& grid = solver.grid();
  const Ensemble& ens = solver.ensemble();
  std::vector<double> phiNodes(grid.size());
  for (int j = 0; j < grid.size(); ++j) phiNodes[j] = phi.f(grid.node(j));
  double thetaX = angle_of(x);
  auto projector = [&](double hh) {
    SpectralSolution sol = solver.solve(hh);
    double nuPhi = 0.0;
    double nuR = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
      nuPhi += sol.nuWeights[j] * phiNodes[j];
      nuR += sol.nuWeights[j] * sol.rValues[j];
    }
    double rAtX = grid.value(sol.rValues, thetaX);
    return nuPhi / nuR * rAtX;
  };
  return (projector(h) - projector(-h)) / (2.0 * h);
}

BPhiEstimate estimate_b_phi(const SpectralSolver& solver, const TargetFunction& phi,
                            const Direction& x, double lambda, long n, long R, uint64_t seed,
                            double h, int threads) {
  require(n >= 100, Err::InvalidArgument,
          "bias-term sampling needs n large enough to be near its limit");
  const Ensemble& ens = solver.ensemble();
  SampleSet set = simulate(ens, x, n, R, seed, threads);
  std::vector<double> phiVals = evaluate_target(phi, set, ens);
  std::vector<double> prod(phiVals.size());
  for (size_t r = 0; r < prod.size(); ++r) {
    prod[r] = (set.logNorms[r] - n * lambda) * phiVals[r];
  }
  MeanStderr ms = mean_stderr(prod);
  BPhiEstimate out;
  out.mc = ms.mean;
  out.mcStderr = ms.se;
  out.spectral = b_phi_spectral(solver, phi, x, h);
  return out;
}

double holder_diagnostic(const TargetFunction& phi, const Ensemble& ens, double gammaExp,
                         int samples, uint64_t seed) {
  require(gammaExp > 0.0, Err::InvalidArgument, "Holder exponent must be positive");
  SplitMix64 rng = path_rng(seed, Stream::Conditions, 1);
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd a(ens.dim), b(ens.dim);
    for (int i = 0; i < ens.dim; ++i) {
      if (ens.cls == MatrixClass::Positive) {
        a(i) = rng.uniform();
        b(i) = rng.uniform();
      } else {
        a(i) = 2.0 * rng.uniform() - 1.0;
        b(i) = 2.0 * rng.uniform() - 1.0;
      }
    }
    if (vec_norm(a, ens.norm) < 1e-6 || vec_norm(b, ens.norm) < 1e-6) continue;
    Direction x = project(a, ens);
    Direction y = project(b, ens);
    double d = distance(x, y);
    if (d < 1e-12) continue;
    double num = std::abs(phi.f(x) - phi.f(y));
    worst = std::max(worst, num / std::pow(d, gammaExp));
  }
  return worst;
}

}  // namespace rmp
