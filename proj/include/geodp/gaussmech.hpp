#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "geodp/decomposition.hpp"
#include "geodp/rng.hpp"
#include "geodp/workload.hpp"

namespace geodp {

// Correlated Gaussian noise sqrt(k) sum_i r_i U_i w_i, with covariance
// Sigma = c^2 k sum_i r_i^2 U_i U_i^T kept in factored form.
struct NoiseSpec {
  BaseDecomposition dec;
  PrivacyParams pp;
  double c = 0.0;  // noise magnitude c(eps, delta)

  Eigen::Index d() const { return dec.d; }
  Eigen::Index k() const { return dec.k(); }

  Eigen::MatrixXd covariance() const {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d(), d());
    const double kk = static_cast<double>(k());
    for (const auto& lvl : dec.levels)
      S += (c * c * kk * lvl.radius * lvl.radius) * (lvl.U * lvl.U.transpose());
    return S;
  }

  // (1/k) sum_i ||U_i^T a||^2 / r_i^2 -- at most 1 exactly when a lies in
  // the enclosing ellipsoid of the composition corollary, so privacy of
  // the mechanism reduces to this check on every column.
  double containment_certificate(const Eigen::VectorXd& a) const {
    double s = 0.0;
    for (const auto& lvl : dec.levels)
      s += (lvl.U.transpose() * a).squaredNorm() / (lvl.radius * lvl.radius);
    return s / static_cast<double>(k());
  }

  double max_certificate(const Eigen::MatrixXd& A) const {
    double m = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      m = std::max(m, containment_certificate(A.col(j)));
    return m;
  }

  Eigen::VectorXd sample_noise(Rng& rng) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d());
    const double sk = std::sqrt(static_cast<double>(k()));
    for (const auto& lvl : dec.levels) {
      Eigen::VectorXd wi = rng.gaussian_vector(lvl.dim) * c;
      w += sk * lvl.radius * (lvl.U * wi);
    }
    return w;
  }
};

struct MechanismAnswer {
  Eigen::VectorXd answer;
  Eigen::VectorXd noise;  // realized noise before any post-processing
  std::string mechanism;
  PrivacyParams pp;
  std::uint64_t seed = 0;

  // projection diagnostics, meaningful for the least-squares mechanisms
  double fw_gap = 0.0;
  double noise_dual_norm = 0.0;
  Eigen::VectorXd prenoise_answer;  // noisy answer before projection
};

inline NoiseSpec build_noise_spec(BaseDecomposition dec, const PrivacyParams& pp) {
  if (pp.delta <= 0.0)
    throw ConfigError("gaussian mechanism requires delta > 0; use the K-norm mechanism for pure DP");
  NoiseSpec spec{std::move(dec), pp, pp.noise_scale()};
  return spec;
}

inline MechanismAnswer run_gaussian(const NoiseSpec& spec, const Eigen::MatrixXd& A,
                                    const Histogram& x, std::uint64_t seed) {
  Rng rng(seed, 1);
  MechanismAnswer out;
  out.mechanism = "gaussian";
  out.pp = spec.pp;
  out.seed = seed;
  out.noise = spec.sample_noise(rng);
  out.answer = A * x.x + out.noise;
  return out;
}

// k c^2 sum_i d_i r_i^2 -- the exact expected squared noise norm
inline double analytic_error(const NoiseSpec& spec) {
  double s = 0.0;
  for (const auto& lvl : spec.dec.levels)
    s += static_cast<double>(lvl.dim) * lvl.radius * lvl.radius;
  return static_cast<double>(spec.k()) * spec.c * spec.c * s;
}

// x -> (1/k) mech(k x): trades a k-fold epsilon increase for a k^2 error
// reduction on databases of size n/k.
using Mechanism = std::function<MechanismAnswer(const Histogram&, std::uint64_t)>;

inline Mechanism scale_reduction_wrap(Mechanism mech, int k) {
  if (k < 1) throw ConfigError("scale_reduction_wrap: k must be >= 1");
  if (k == 1) return mech;
  const double kk = static_cast<double>(k);
  return [mech = std::move(mech), kk](const Histogram& x, std::uint64_t seed) {
    Histogram scaled = make_histogram(x.x * kk, x.n * kk);
    MechanismAnswer ans = mech(scaled, seed);
    ans.answer /= kk;
    ans.noise /= kk;
    if (ans.prenoise_answer.size()) ans.prenoise_answer /= kk;
    return ans;
  };
}

// privacy bookkeeping for the wrapper: (eps, delta) -> (k eps, delta')
inline PrivacyParams scale_reduction_params(const PrivacyParams& pp, int k) {
  const double e = pp.epsilon;
  const double delta_prime =
      pp.delta * (std::exp(k * e) - 1.0) / (std::exp(e) - 1.0);
  return PrivacyParams(k * e, delta_prime);
}

}  // namespace geodp
