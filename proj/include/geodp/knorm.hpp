#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geodp/decomposition.hpp"
#include "geodp/gauge.hpp"
#include "geodp/rng.hpp"
#include "geodp/sparsemech.hpp"

namespace geodp {

struct KNormSample {
  Eigen::VectorXd w;  // r * z, the noise vector
  double r = 0.0;     // radial draw, Gamma(dim + 1, eps')
  Eigen::VectorXd z;  // hit-and-run point, approximately uniform in K
};

// Sampler for the density proportional to exp(-eps' ||y||_K) over span(K):
// radial Gamma(dim+1, eps') times a uniform point of K from a hit-and-run
// chain (gauge/chord LPs). One chain per sampler; burn-in happens on the
// first draw, later draws advance `thin` steps each.
class KNormSampler {
public:
  KNormSampler(PolytopeView K, double eps_prime, std::uint64_t seed,
               std::uint64_t stream = 5)
      : L_(std::move(K)), eps_(eps_prime), rng_(seed, stream) {
    if (!(eps_ > 0.0)) throw ConfigError("KNormSampler: eps' must be positive");
    dim_ = L_.dim();
    if (dim_ < 1) throw DimensionError("KNormSampler: empty polytope");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L_.G);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol =
        sv.size() ? sv[0] * std::max(L_.G.rows(), L_.G.cols()) * 1e-12 : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > tol) ++rank;
    if (rank < dim_)
      throw DimensionError(
          "KNormSampler: K is not full-dimensional; project to its span first");
    burn_in_ = 10 * static_cast<long>(dim_) * static_cast<long>(dim_);
    thin_ = static_cast<long>(dim_);
    z_ = Eigen::VectorXd::Zero(dim_);  // interior by symmetry
  }

  Eigen::Index dim() const { return dim_; }
  double eps_prime() const { return eps_; }
  long burn_in() const { return burn_in_; }
  long thin() const { return thin_; }

  KNormSample next() {
    const long steps = warmed_ ? thin_ : burn_in_;
    warmed_ = true;
    for (long s = 0; s < steps; ++s) step();
    KNormSample out;
    out.r = rng_.gamma_int(static_cast<int>(dim_) + 1, eps_);
    out.z = z_;
    out.w = out.r * z_;
    return out;
  }

private:
  void step() {
    Eigen::VectorXd u = rng_.gaussian_vector(dim_);
    const double nrm = u.norm();
    if (nrm <= 0.0) return;  // astronomically unlikely; keep the point
    u /= nrm;
    auto [lo, hi] = chord(L_, z_, u);
    z_ += rng_.uniform(lo, hi) * u;
  }

  PolytopeView L_;
  double eps_;
  Eigen::Index dim_ = 0;
  long burn_in_ = 0;
  long thin_ = 0;
  Eigen::VectorXd z_;
  Rng rng_;
  bool warmed_ = false;
};

inline KNormSample sample_knorm(KNormSampler& s) { return s.next(); }

// K-norm noise + least squares (pure DP): noise over span(A) via the
// row-space reduction, then projection onto n K.
inline MechanismAnswer run_knorm_lse(const Eigen::MatrixXd& A, const PrivacyParams& pp,
                                     const Histogram& x, std::uint64_t seed, int T = -1) {
  if (pp.delta != 0.0)
    throw ConfigError("run_knorm_lse: pure DP mechanism, delta must be 0");
  if (x.x.size() != A.cols()) throw ConfigError("run_knorm_lse: histogram length mismatch");
  if (T < 0) T = default_fw_iters(x.n);

  const RowSpaceProjection rp = row_space_projector(A);
  MechanismAnswer out;
  out.mechanism = "knorm";
  out.pp = pp;
  out.seed = seed;
  if (rp.rank == 0) {
    out.answer = Eigen::VectorXd::Zero(A.rows());
    out.noise = out.answer;
    out.prenoise_answer = out.answer;
    return out;
  }
  KNormSampler sampler(PolytopeView(rp.reduced, 1.0), pp.epsilon, seed, 5);
  out.noise = rp.V * sampler.next().w;
  out.prenoise_answer = A * x.x + out.noise;

  PolytopeView L(A, x.n);
  FwProjection proj = fw_project(L, out.prenoise_answer, T);
  out.answer = proj.point;
  out.fw_gap = proj.gap;
  out.noise_dual_norm = dual_norm(L, out.noise);
  return out;
}

// Per-call budgets for the split mechanism: t least-squares levels plus one
// pass-through remainder, eps/(t+1) each; when the remainder is empty the
// t levels share eps evenly. t = 0 spends the whole budget on one call.
inline std::vector<double> knorm_split_budgets(double eps, Eigen::Index t, bool has_rest) {
  const Eigen::Index calls = t + (has_rest ? 1 : 0);
  if (calls == 0) return {eps};
  return std::vector<double>(calls, eps / static_cast<double>(calls));
}

// Algorithm: per-level K-norm noise on U_i^T A for the qualifying levels,
// K-norm noise on the remainder, least squares on the qualifying part only.
inline MechanismAnswer run_knorm_split(const Eigen::MatrixXd& A, const PrivacyParams& pp,
                                       const Histogram& x, std::uint64_t seed, int T = -1) {
  if (pp.delta != 0.0)
    throw ConfigError("run_knorm_split: pure DP mechanism, delta must be 0");
  if (x.x.size() != A.cols()) throw ConfigError("run_knorm_split: histogram length mismatch");
  if (T < 0) T = default_fw_iters(x.n);

  const BaseDecomposition dec = decompose(A);
  const LevelSplit split = split_level(dec, pp, x.n);
  const Eigen::Index t = split.t;
  if (t == 0) return run_knorm_lse(A, pp, x, seed, T);

  const bool has_rest = split.Y.cols() > 0;
  const std::vector<double> budgets = knorm_split_budgets(pp.epsilon, t, has_rest);

  const Eigen::Index d = A.rows();
  Eigen::VectorXd y1 = Eigen::VectorXd::Zero(d);  // noisy qualifying part
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(d);

  // one noise draw per level, lifted back to R^d; distinct chain streams
  auto level_noise = [&](const Eigen::MatrixXd& U, double eps_i,
                         std::uint64_t stream) -> Eigen::VectorXd {
    const Eigen::MatrixXd Ai = U.transpose() * A;
    const RowSpaceProjection rp = row_space_projector(Ai);
    if (rp.rank == 0) return Eigen::VectorXd::Zero(d);
    KNormSampler sampler(PolytopeView(rp.reduced, 1.0), eps_i, seed, stream);
    return U * (rp.V * sampler.next().w);
  };

  for (Eigen::Index i = 0; i < t; ++i) {
    const Eigen::MatrixXd& U = dec.levels[i].U;
    const Eigen::VectorXd wi =
        level_noise(U, budgets[i], 100 + static_cast<std::uint64_t>(i));
    noise += wi;
    y1 += U * (U.transpose() * (A * x.x)) + wi;
  }

  Eigen::VectorXd y2 = Eigen::VectorXd::Zero(d);
  if (has_rest) {
    const Eigen::VectorXd wr = level_noise(split.Y, budgets.back(), 99);
    noise += wr;
    y2 = split.Y * (split.Y.transpose() * (A * x.x)) + wr;
  }

  const Eigen::MatrixXd XXt = split.X * split.X.transpose();
  PolytopeView L(XXt * A, x.n);
  FwProjection proj = fw_project(L, y1, T);

  MechanismAnswer out;
  out.mechanism = "knorm-split";
  out.pp = pp;
  out.seed = seed;
  out.noise = noise;
  out.prenoise_answer = y1 + y2;
  out.answer = proj.point + y2;
  out.fw_gap = proj.gap;
  out.noise_dual_norm = dual_norm(L, XXt * noise);
  return out;
}

}  // namespace geodp
