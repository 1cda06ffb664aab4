#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "geodp/bounds.hpp"
#include "geodp/decomposition.hpp"
#include "geodp/gaussmech.hpp"
#include "geodp/workload.hpp"

namespace geodp {

struct DiscResult {
  double value = 0.0;
  Eigen::VectorXi coloring;  // entries in {-1, +1}
};

struct DiscrepancyReport {
  std::optional<double> herdisc_exact;
  std::vector<Eigen::Index> witness_subset;
  Eigen::VectorXi witness_coloring;
  double lower_estimate = 0.0;
  double upper_estimate = 0.0;
  double approx_factor_budget = 0.0;
};

// Row weights p_i >= 0 with sum 1; the matrix form diag(sqrt(p)) applies to
// rows, so tr(P^2) = 1.
struct WeightedWorkload {
  Eigen::VectorXd p;
  Eigen::MatrixXd weighted;  // diag(sqrt(p)) * A
};

// disc(A) = min over +-1 colorings of ||A x||_inf, exact via Gray-code
// enumeration (one column flip per step).
inline DiscResult disc_bruteforce(const Eigen::MatrixXd& A) {
  const Eigen::Index N = A.cols();
  if (N > 24) throw BudgetError("disc_bruteforce: N > 24");
  DiscResult best;
  if (N == 0) {
    best.value = 0.0;
    return best;
  }
  Eigen::VectorXi x = Eigen::VectorXi::Ones(N);
  Eigen::VectorXd y = A.rowwise().sum();
  best.value = y.lpNorm<Eigen::Infinity>();
  best.coloring = x;
  std::uint32_t prev_gray = 0;
  const std::uint64_t total = 1ULL << N;
  for (std::uint64_t g = 1; g < total; ++g) {
    const std::uint32_t gray = static_cast<std::uint32_t>(g ^ (g >> 1));
    const int j = std::countr_zero(gray ^ prev_gray);
    prev_gray = gray;
    x[j] = -x[j];
    y += 2.0 * x[j] * A.col(j);
    const double v = y.lpNorm<Eigen::Infinity>();
    if (v < best.value) {
      best.value = v;
      best.coloring = x;
    }
  }
  return best;
}

// herdisc(A) = max over column subsets of disc(A|_S).
inline DiscrepancyReport herdisc_bruteforce(const Eigen::MatrixXd& A) {
  const Eigen::Index N = A.cols();
  if (N > 16) throw BudgetError("herdisc_bruteforce: N > 16");
  DiscrepancyReport rep;
  rep.herdisc_exact = 0.0;
  for (std::uint32_t mask = 1; mask < (1U << N); ++mask) {
    std::vector<Eigen::Index> S;
    for (Eigen::Index j = 0; j < N; ++j)
      if (mask & (1U << j)) S.push_back(j);
    DiscResult d = disc_bruteforce(detail::columns(A, S));
    if (d.value > *rep.herdisc_exact) {
      rep.herdisc_exact = d.value;
      rep.witness_subset = S;
      rep.witness_coloring = d.coloring;
    }
  }
  return rep;
}

inline DiscResult disc_bruteforce(const Workload& w) { return disc_bruteforce(w.A); }
inline DiscrepancyReport herdisc_bruteforce(const Workload& w) {
  return herdisc_bruteforce(w.A);
}

namespace detail {

// Mechanism pieces for the weighted workload diag(sqrt(p)) A, built in its
// row space so rank-deficient weightings (e.g. identical rows) still work.
struct WeightedSpec {
  RowSpaceProjection rp;  // V lifts reduced coordinates back to R^d
  NoiseSpec spec;         // on the reduced workload
};

inline WeightedSpec weighted_spec(const Eigen::MatrixXd& A, const Eigen::VectorXd& p,
                                  const PrivacyParams& pp) {
  Eigen::MatrixXd B = p.array().sqrt().matrix().asDiagonal() * A;
  WeightedSpec out;
  out.rp = row_space_projector(B);
  if (out.rp.rank == 0)
    throw RankError("weighted workload is identically zero");
  out.spec = build_noise_spec(decompose(out.rp.reduced), pp);
  return out;
}

// diagonal of the mechanism covariance on diag(sqrt(p)) A
inline Eigen::VectorXd weighted_cov_diag(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& p,
                                         const PrivacyParams& pp) {
  const WeightedSpec ws = weighted_spec(A, p, pp);
  const Eigen::MatrixXd cov = ws.spec.covariance();
  return (ws.rp.V * cov * ws.rp.V.transpose()).diagonal();
}

}  // namespace detail

// Multiplicative-weights approximation of the minimax row weighting: each
// round reweights toward the rows whose unweighted per-coordinate error
// Sigma_ii / p_i dominates. Deterministic; returns the averaged iterate.
inline WeightedWorkload minimax_weights(const Eigen::MatrixXd& A, const PrivacyParams& pp,
                                        int rounds = 200, double learning_rate = 0.5) {
  if (pp.delta <= 0.0) throw ConfigError("minimax_weights: needs delta > 0");
  const Eigen::Index d = A.rows();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(d);
  for (int r = 0; r < rounds; ++r) {
    const Eigen::VectorXd diag = detail::weighted_cov_diag(A, p, pp);
    Eigen::VectorXd err(d);
    for (Eigen::Index i = 0; i < d; ++i) err[i] = diag[i] / std::max(p[i], 1e-12);
    const double emax = err.maxCoeff();
    if (emax > 0.0)
      for (Eigen::Index i = 0; i < d; ++i)
        p[i] *= std::exp(learning_rate * err[i] / emax);
    p = p.cwiseMax(1e-12);
    p /= p.sum();
    avg += p;
  }
  avg /= static_cast<double>(rounds);
  WeightedWorkload out;
  out.p = avg;
  out.weighted = avg.array().sqrt().matrix().asDiagonal() * A;
  return out;
}

// Default repetition count for the median mechanism: odd, about log d.
inline int default_median_reps(Eigen::Index d) {
  const int l = static_cast<int>(std::ceil(std::log2(static_cast<double>(d) + 1.0)));
  return 2 * std::max(l, 1) + 1;
}

// L independent runs of the minimax-weighted Gaussian mechanism at budget
// (eps/L, delta/L) each; coordinatewise medians, unweighted back by
// 1/sqrt(p_i).
inline MechanismAnswer median_linf_mechanism(const Eigen::MatrixXd& A,
                                             const PrivacyParams& pp, const Histogram& x,
                                             int L, std::uint64_t seed) {
  if (L < 1 || L % 2 == 0) throw ConfigError("median_linf_mechanism: L must be odd");
  const Eigen::Index d = A.rows();
  const WeightedWorkload ww = minimax_weights(A, pp);
  const PrivacyParams per(pp.epsilon / L, pp.delta / L);
  const detail::WeightedSpec ws = detail::weighted_spec(A, ww.p, per);
  const Eigen::VectorXd rescale = ww.p.array().sqrt().inverse().matrix();

  Eigen::MatrixXd runs(d, L);
  Rng base(seed, 7);
  for (int l = 0; l < L; ++l) {
    Rng rng = base.child(static_cast<std::uint64_t>(l));
    runs.col(l) = rescale.asDiagonal() *
                  (ww.weighted * x.x + ws.rp.V * ws.spec.sample_noise(rng));
  }
  MechanismAnswer out;
  out.mechanism = "median-linf";
  out.pp = pp;
  out.seed = seed;
  out.answer.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd row = runs.row(i);
    std::nth_element(row.data(), row.data() + L / 2, row.data() + L);
    out.answer[i] = row[L / 2];
  }
  out.noise = out.answer - A * x.x;
  return out;
}

inline double herdisc_budget(Eigen::Index d, Eigen::Index N) {
  const double ld = std::max(1.0, std::log2(static_cast<double>(d)));
  const double lN = std::max(1.0, std::log2(static_cast<double>(N)));
  return ld * ld * lN * std::sqrt(std::max(1.0, std::log(std::log(d + 2.0))));
}

// Sandwich estimates around herdisc: the decomposition lower bound of the
// minimax-weighted workload from below, the analytic l_inf error of the
// median mechanism from above. Both use the same weights.
inline DiscrepancyReport herdisc_approx(const Eigen::MatrixXd& A,
                                        const PrivacyParams& pp = PrivacyParams(1.0, 1e-6)) {
  const Eigen::Index d = A.rows();
  const Eigen::Index N = A.cols();
  const WeightedWorkload ww = minimax_weights(A, pp);

  DiscrepancyReport rep;
  rep.approx_factor_budget = herdisc_budget(d, N);
  const RowSpaceProjection rp = row_space_projector(ww.weighted);
  rep.lower_estimate = std::sqrt(dec_lowerbound(decompose(rp.reduced), pp).dec_lb);

  // l_inf error bound of the median mechanism in discrepancy units: the
  // privacy magnitude c^2 divides out so both estimates are noise-free
  // geometric quantities and the calibrated constants stay O(polylog).
  const Eigen::VectorXd diag = detail::weighted_cov_diag(A, ww.p, pp);
  const double c2 = pp.noise_scale() * pp.noise_scale();
  double rms = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    rms = std::max(rms, std::sqrt(diag[i] / c2 / std::max(ww.p[i], 1e-12)));
  rep.upper_estimate = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(d))) * rms;
  return rep;
}

inline DiscrepancyReport herdisc_approx(const Workload& w,
                                        const PrivacyParams& pp = PrivacyParams(1.0, 1e-6)) {
  return herdisc_approx(w.A, pp);
}

}  // namespace geodp
