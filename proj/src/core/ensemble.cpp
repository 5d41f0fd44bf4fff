#include "ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "rng.hpp"

namespace rmp {

double vec_norm(const Eigen::VectorXd& v, NormKind norm) {
  return norm == NormKind::Euclidean ? v.norm() : v.lpNorm<1>();
}

double matrix_norm(const Eigen::MatrixXd& g, NormKind norm) {
  if (norm == NormKind::L1) {
    return g.cwiseAbs().colwise().sum().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  return svd.singularValues()(0);
}

bool allowable(const Eigen::MatrixXd& g) {
  for (int i = 0; i < g.rows(); ++i) {
    if ((g.row(i).array() > 0.0).count() == 0) return false;
  }
  for (int j = 0; j < g.cols(); ++j) {
    if ((g.col(j).array() > 0.0).count() == 0) return false;
  }
  return true;
}

Ensemble build_ensemble(int dim, MatrixClass cls, NormKind norm, std::vector<Atom> atoms) {
  require(dim >= 1, Err::UnsupportedDimension, "dimension must be at least 1");
  require(!atoms.empty(), Err::InvalidArgument, "ensemble needs at least one atom");
  double psum = 0.0;
  for (const Atom& a : atoms) {
    require(a.g.rows() == dim && a.g.cols() == dim, Err::NonSquare,
            "atom matrix shape does not match the stated dimension");
    require(a.p > 0.0, Err::ZeroProbability, "atom probabilities must be strictly positive");
    require(a.g.allFinite(), Err::InvalidArgument, "atom entries must be finite");
    psum += a.p;
    if (cls == MatrixClass::Invertible) {
      double scale = a.g.cwiseAbs().maxCoeff();
      require(scale > 0.0, Err::NotInvertible, "zero matrix is not invertible");
      Eigen::MatrixXd scaled = a.g / scale;
      require(std::abs(scaled.determinant()) > 1e-12, Err::NotInvertible,
              "atom matrix is numerically singular");
    } else {
      require((a.g.array() >= 0.0).all(), Err::NegativeCoordinate,
              "nonnegative ensembles cannot contain negative entries");
      require(allowable(a.g), Err::NotAllowable,
              "every row and column of each atom needs a positive entry");
    }
  }
  for (Atom& a : atoms) a.p /= psum;
  Ensemble ens;
  ens.dim = dim;
  ens.cls = cls;
  ens.norm = norm;
  ens.atoms = std::move(atoms);
  return ens;
}

namespace {

// Smallest |gx| over the nonnegative part of the Euclidean sphere, for a
// nonnegative matrix g.  In dimension 2 the arc [0, pi/2] is scanned and the
// best bracket is refined by golden-section; higher dimensions fall back to a
// sampled bound.
double min_gain_positive_euclidean(const Eigen::MatrixXd& g, bool* sampled, uint64_t seed) {
  const int d = static_cast<int>(g.rows());
  if (d == 2) {
    auto f = [&](double t) {
      Eigen::Vector2d x(std::cos(t), std::sin(t));
      return (g * x).norm();
    };
    const int K = 4096;
    double best = std::numeric_limits<double>::infinity();
    int bestI = 0;
    for (int i = 0; i <= K; ++i) {
      double t = (M_PI / 2) * i / K;
      double v = f(t);
      if (v < best) {
        best = v;
        bestI = i;
      }
    }
    double lo = (M_PI / 2) * std::max(0, bestI - 1) / K;
    double hi = (M_PI / 2) * std::min(K, bestI + 1) / K;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = f(c1), f2 = f(c2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - gr * (b - a);
        f1 = f(c1);
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + gr * (b - a);
        f2 = f(c2);
      }
    }
    *sampled = false;
    return std::min({best, f1, f2});
  }
  SplitMix64 rng = path_rng(seed, Stream::GaugeProbe, 0);
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100000; ++trial) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) {
      double u = rng.uniform();
      x(i) = -std::log(std::max(u, 1e-300));  // exponential spacings cover the simplex
    }
    x /= x.norm();
    best = std::min(best, (g * x).norm());
  }
  *sampled = true;
  return best;
}

}  // namespace

MatrixGauges matrix_gauges(const Eigen::MatrixXd& g, MatrixClass cls, NormKind norm) {
  MatrixGauges out;
  out.normG = matrix_norm(g, norm);
  if (cls == MatrixClass::Invertible) {
    if (norm == NormKind::Euclidean) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      out.iota = svd.singularValues()(svd.singularValues().size() - 1);
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      require(smin > 1e-12, Err::SingularInvertible,
              "matrix is numerically singular; gauges undefined");
      Eigen::MatrixXd inv = g.inverse();
      out.iota = 1.0 / inv.cwiseAbs().colwise().sum().maxCoeff();
    }
    require(out.iota > 1e-12, Err::SingularInvertible,
            "matrix is numerically singular; gauges undefined");
  } else {
    if (g.rows() == 1) {
      out.iota = std::abs(g(0, 0));
    } else if (norm == NormKind::L1) {
      // On the L1 simplex |gx| is linear in x, so the minimum sits at a vertex.
      out.iota = g.colwise().sum().minCoeff();
    } else {
      out.iota = min_gain_positive_euclidean(g, &out.sampled, 0x9e3779b97f4a7c15ULL);
    }
    require(out.iota > 0.0, Err::CollapsedImage,
            "matrix collapses part of the positive sphere");
  }
  out.bigN = std::max(out.normG, 1.0 / out.iota);
  return out;
}

namespace {

// Entrywise positivity pattern closure: track which (i,j) can be strictly
// positive in some product of length <= depth.
bool positive_product_exists(const Ensemble& ens, int depth, int* witness) {
  const int d = ens.dim;
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> pats;
  for (const Atom& a : ens.atoms) {
    pats.push_back((a.g.array() > 0.0).matrix());
  }
  // frontier holds attainable positivity patterns at the current length.
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> frontier = pats;
  auto all_pos = [&](const auto& m) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (!m(i, j)) return false;
    return true;
  };
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> seen = frontier;
  auto contains = [&](const auto& m) {
    for (const auto& s : seen) {
      bool eq = true;
      for (int i = 0; i < d && eq; ++i)
        for (int j = 0; j < d && eq; ++j)
          if (s(i, j) != m(i, j)) eq = false;
      if (eq) return true;
    }
    return false;
  };
  for (int len = 1; len <= depth; ++len) {
    for (const auto& m : frontier) {
      if (all_pos(m)) {
        *witness = len;
        return true;
      }
    }
    std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> next;
    for (const auto& m : frontier) {
      for (const auto& p : pats) {
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> prod(d, d);
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            bool v = false;
            for (int k = 0; k < d && !v; ++k) v = p(i, k) && m(k, j);
            prod(i, j) = v;
          }
        }
        if (!contains(prod)) {
          seen.push_back(prod);
          next.push_back(prod);
        }
      }
    }
    if (next.empty()) break;
    frontier = std::move(next);
  }
  *witness = -1;
  return false;
}

// Continued-fraction depth at which x looks rational: small depth means the
// ratio is (close to) rational, so log spectral radii are commensurable.
int cf_depth(double x, int maxDepth) {
  x = std::abs(x);
  for (int k = 0; k < maxDepth; ++k) {
    double n = std::round(x);
    if (std::abs(x - n) < 1e-9) return k;
    x = 1.0 / (x - std::floor(x));
  }
  return maxDepth;
}

}  // namespace

ConditionReport check_conditions(const Ensemble& ens, int depth, int trials, uint64_t seed) {
  ConditionReport rep;
  rep.allowableAll = true;
  for (const Atom& a : ens.atoms) {
    if (ens.cls == MatrixClass::Positive && !allowable(a.g)) rep.allowableAll = false;
  }
  if (ens.cls == MatrixClass::Positive) {
    rep.strictlyPositiveProductFound =
        positive_product_exists(ens, depth, &rep.witnessLength);
  }

  // Proximality statistic: the ratio of the two largest eigenvalue moduli of
  // random products of length 50 (median over trials).  Values well below 1
  // indicate a contracting (proximal) action; 1 means top moduli tie.
  SplitMix64 rng = path_rng(seed, Stream::Conditions, 0);
  std::vector<double> ratios;
  const int d = ens.dim;
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(d, d);
    for (int k = 0; k < 50; ++k) {
      double u = rng.uniform();
      double acc = 0.0;
      int pick = static_cast<int>(ens.atoms.size()) - 1;
      for (int i = 0; i < static_cast<int>(ens.atoms.size()); ++i) {
        acc += ens.atoms[i].p;
        if (u <= acc) {
          pick = i;
          break;
        }
      }
      prod = ens.atoms[pick].g * prod;
      double sc = prod.cwiseAbs().maxCoeff();
      if (sc > 0) prod /= sc;
    }
    if (d == 1) {
      ratios.push_back(0.0);
      continue;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
    std::vector<double> mods(d);
    for (int i = 0; i < d; ++i) mods[i] = std::abs(es.eigenvalues()(i));
    std::sort(mods.begin(), mods.end(), std::greater<double>());
    if (mods[0] > 0) ratios.push_back(mods[1] / mods[0]);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    rep.proximalityGapStat = ratios[ratios.size() / 2];
  }
  if (rep.proximalityGapStat >= 0.99) {
    rep.irreducibilityFlag = Heuristic::LikelyFails;
  } else if (rep.proximalityGapStat < 0.9) {
    rep.irreducibilityFlag = Heuristic::LikelyHolds;
  } else {
    rep.irreducibilityFlag = Heuristic::Unknown;
  }

  // Arithmeticity probe: collect log spectral radii of strictly positive short
  // products; if some pairwise ratio stays irrational-looking to continued
  // fraction depth 6, the additive group they generate is unlikely a lattice.
  std::vector<double> posLogs;
  {
    std::vector<Eigen::MatrixXd> frontier = {Eigen::MatrixXd::Identity(d, d)};
    int maxLen = std::min(depth, 4);
    for (int len = 1; len <= maxLen && posLogs.size() < 256; ++len) {
      std::vector<Eigen::MatrixXd> next;
      for (const auto& m : frontier) {
        for (const Atom& a : ens.atoms) {
          if (next.size() >= 512) break;
          Eigen::MatrixXd prod = a.g * m;
          next.push_back(prod);
          if ((prod.array() > 0.0).all()) {
            Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
            double rad = 0.0;
            for (int i = 0; i < d; ++i) rad = std::max(rad, std::abs(es.eigenvalues()(i)));
            if (rad > 0 && std::abs(std::log(rad)) > 1e-12) {
              posLogs.push_back(std::log(rad));
            }
          }
        }
      }
      frontier = std::move(next);
    }
  }
  bool anyDeep = false;
  bool anyPair = false;
  for (size_t i = 0; i < posLogs.size() && !anyDeep; ++i) {
    for (size_t j = i + 1; j < posLogs.size() && !anyDeep; ++j) {
      anyPair = true;
      if (cf_depth(posLogs[i] / posLogs[j], 6) >= 6) anyDeep = true;
    }
  }
  if (anyPair) {
    rep.arithmeticityFlag = anyDeep ? ArithFlag::LikelyNonArithmetic : ArithFlag::Suspect;
  } else {
    rep.arithmeticityFlag = ArithFlag::Unknown;
  }

  // Finite ensembles always have every polynomial gauge moment; record the
  // largest probed exponent for the report.
  double maxBigN = 1.0;
  for (const Atom& a : ens.atoms) {
    maxBigN = std::max(maxBigN, matrix_gauges(a.g, ens.cls, ens.norm).bigN);
  }
  rep.momentExponentProbe = maxBigN;
  return rep;
}

const char* heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::LikelyHolds: return "likely-holds";
    case Heuristic::LikelyFails: return "likely-fails";
    default: return "unknown";
  }
}

const char* arith_name(ArithFlag a) {
  switch (a) {
    case ArithFlag::LikelyNonArithmetic: return "likely-non-arithmetic";
    case ArithFlag::Suspect: return "suspect";
    default: return "unknown";
  }
}

}  // namespace rmp
