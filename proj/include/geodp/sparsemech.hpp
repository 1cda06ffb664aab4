#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "geodp/gauge.hpp"
#include "geodp/gaussmech.hpp"

namespace geodp {

// Split of the decomposition at the largest level index t with d_t >= eps n.
// Levels 1..t carry enough dimensions to profit from least squares; the
// rest keep their Gaussian answer untouched.
struct LevelSplit {
  Eigen::Index t = 0;     // 0 means no level qualifies
  Eigen::MatrixXd X;      // d x sum_{i<=t} d_i
  Eigen::MatrixXd Y;      // d x sum_{i>t} d_i
};

inline LevelSplit split_level(const BaseDecomposition& dec, const PrivacyParams& pp,
                              double n) {
  if (!(n > 0.0)) throw ConfigError("split_level: n must be positive");
  const double threshold = pp.epsilon * n;
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < dec.k(); ++i)
    if (static_cast<double>(dec.levels[i].dim) >= threshold) t = i + 1;

  Eigen::Index dx = 0, dy = 0;
  for (Eigen::Index i = 0; i < dec.k(); ++i)
    (i < t ? dx : dy) += dec.levels[i].dim;

  LevelSplit out;
  out.t = t;
  out.X.resize(dec.d, dx);
  out.Y.resize(dec.d, dy);
  Eigen::Index cx = 0, cy = 0;
  for (Eigen::Index i = 0; i < dec.k(); ++i) {
    const auto& lvl = dec.levels[i];
    if (i < t) {
      out.X.middleCols(cx, lvl.dim) = lvl.U;
      cx += lvl.dim;
    } else {
      out.Y.middleCols(cy, lvl.dim) = lvl.U;
      cy += lvl.dim;
    }
  }
  return out;
}

// Gaussian noise, then least squares on the high-dimensional levels:
// project X X^T y_tilde onto n X X^T K and pass the rest through.
// The projection uses the declared bound x.n, never ||x||_1.
inline MechanismAnswer run_lse(const NoiseSpec& spec, const Eigen::MatrixXd& A,
                               const Histogram& x, std::uint64_t seed, int T = -1) {
  if (x.x.size() != A.cols()) throw ConfigError("run_lse: histogram length mismatch");
  MechanismAnswer ans = run_gaussian(spec, A, x, seed);
  const LevelSplit split = split_level(spec.dec, spec.pp, x.n);
  if (split.t == 0) {
    // degenerate split: pure Gaussian path, bit-for-bit
    ans.mechanism = "lse";
    return ans;
  }
  if (T < 0) T = default_fw_iters(x.n);
  const Eigen::MatrixXd XXt = split.X * split.X.transpose();
  const Eigen::VectorXd y1 = XXt * ans.answer;
  const Eigen::VectorXd y2 = ans.answer - y1;

  PolytopeView L(XXt * A, x.n);
  FwProjection proj = fw_project(L, y1, T);

  MechanismAnswer out;
  out.mechanism = "lse";
  out.pp = spec.pp;
  out.seed = seed;
  out.noise = ans.noise;
  out.prenoise_answer = ans.answer;
  out.answer = proj.point + y2;
  out.fw_gap = proj.gap;
  out.noise_dual_norm = dual_norm(L, XXt * ans.noise);
  return out;
}

// Spherical noise scaled to the largest column norm, then least squares
// onto n K. Intended for workloads with entries in [0,1].
inline MechanismAnswer run_simple_lse(const Eigen::MatrixXd& A, const PrivacyParams& pp,
                                      const Histogram& x, std::uint64_t seed, int T = -1) {
  if (x.x.size() != A.cols()) throw ConfigError("run_simple_lse: histogram length mismatch");
  if (T < 0) T = default_fw_iters(x.n);
  const double r = A.colwise().norm().maxCoeff();
  const double c = pp.noise_scale();
  Rng rng(seed, 2);

  MechanismAnswer out;
  out.mechanism = "simple-lse";
  out.pp = pp;
  out.seed = seed;
  out.noise = r * c * rng.gaussian_vector(A.rows());
  out.prenoise_answer = A * x.x + out.noise;

  PolytopeView L(A, x.n);
  FwProjection proj = fw_project(L, out.prenoise_answer, T);
  out.answer = proj.point;
  out.fw_gap = proj.gap;
  out.noise_dual_norm = dual_norm(L, out.noise);
  return out;
}

}  // namespace geodp
