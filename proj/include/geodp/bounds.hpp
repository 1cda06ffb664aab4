#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "geodp/decomposition.hpp"
#include "geodp/errors.hpp"
#include "geodp/gaussmech.hpp"
#include "geodp/workload.hpp"

namespace geodp {

struct LowerBoundWitness {
  std::vector<Eigen::Index> subset;
  Eigen::Index k = 0;
};

struct LowerBoundReport {
  double spec_lb = 0.0;
  LowerBoundWitness spec_witness;
  double det_lb = 0.0;
  LowerBoundWitness det_witness;
  double dec_lb = 0.0;
  Eigen::Index dec_level = -1;  // 1-based level index attaining dec_lb
  double n = 0.0;               // size bound used (inf for dense mode)
  std::string mode;             // "bruteforce" or "decomposition"
};

namespace detail {

// Sum_k C(N, k) for k = 1..kmax, saturating instead of overflowing.
inline double subset_budget(Eigen::Index N, Eigen::Index kmax) {
  double total = 0.0, c = 1.0;
  for (Eigen::Index k = 1; k <= kmax; ++k) {
    c *= static_cast<double>(N - k + 1) / static_cast<double>(k);
    total += c;
    if (total > 1e18) return total;
  }
  return total;
}

template <typename Fn>
void for_each_subset(Eigen::Index N, Eigen::Index k, Fn&& fn) {
  std::vector<Eigen::Index> idx(k);
  for (Eigen::Index i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[i] == N - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (Eigen::Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline Eigen::MatrixXd columns(const Eigen::MatrixXd& A,
                               const std::vector<Eigen::Index>& S) {
  Eigen::MatrixXd B(A.rows(), static_cast<Eigen::Index>(S.size()));
  for (std::size_t j = 0; j < S.size(); ++j) B.col(j) = A.col(S[j]);
  return B;
}

inline void check_budget(Eigen::Index N, Eigen::Index kmax, double limit,
                         const char* who) {
  const double need = subset_budget(N, kmax);
  if (need > limit)
    throw BudgetError(std::string(who) + ": subset enumeration needs " +
                      std::to_string(need) + " evaluations, limit is " +
                      std::to_string(limit));
}

}  // namespace detail

// specLB(A, n) = max over subsets S, |S| = k <= n, of k sigma_k(A|_S)^2.
// The inner maximization over k-dimensional projections is attained at the
// top-k left singular subspace, so sigma_min(Pi A|_S) = sigma_k(A|_S).
inline LowerBoundReport speclb_bruteforce(const Eigen::MatrixXd& A, double n,
                                          double limit = 2e6) {
  const Eigen::Index N = A.cols();
  const Eigen::Index kmax = std::min<Eigen::Index>(
      {static_cast<Eigen::Index>(std::floor(n)), N, A.rows()});
  LowerBoundReport rep;
  rep.n = n;
  rep.mode = "bruteforce";
  if (kmax < 1) return rep;
  detail::check_budget(N, kmax, limit, "speclb_bruteforce");

  for (Eigen::Index k = 1; k <= kmax; ++k) {
    detail::for_each_subset(N, k, [&](const std::vector<Eigen::Index>& S) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::columns(A, S));
      const double sk = svd.singularValues()[k - 1];
      const double val = static_cast<double>(k) * sk * sk;
      if (val > rep.spec_lb) {
        rep.spec_lb = val;
        rep.spec_witness = {S, k};
      }
    });
  }
  return rep;
}

// detLB(A, n) = max over subsets of k * |det(Pi A|_S)|^{2/k}; the best
// projection realizes the product of the top-k singular values.
inline LowerBoundReport detlb_bruteforce(const Eigen::MatrixXd& A, double n,
                                         double limit = 2e6) {
  const Eigen::Index N = A.cols();
  const Eigen::Index kmax = std::min<Eigen::Index>(
      {static_cast<Eigen::Index>(std::floor(n)), N, A.rows()});
  LowerBoundReport rep;
  rep.n = n;
  rep.mode = "bruteforce";
  if (kmax < 1) return rep;
  detail::check_budget(N, kmax, limit, "detlb_bruteforce");

  for (Eigen::Index k = 1; k <= kmax; ++k) {
    detail::for_each_subset(N, k, [&](const std::vector<Eigen::Index>& S) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::columns(A, S));
      double logprod = 0.0;
      bool ok = true;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double s = svd.singularValues()[i];
        if (s <= 0.0) { ok = false; break; }
        logprod += std::log(s);
      }
      if (!ok) return;
      const double val =
          static_cast<double>(k) * std::exp(2.0 * logprod / static_cast<double>(k));
      if (val > rep.det_lb) {
        rep.det_lb = val;
        rep.det_witness = {S, k};
      }
    });
  }
  return rep;
}

inline LowerBoundReport speclb_bruteforce(const Workload& w, double n,
                                          double limit = 2e6) {
  return speclb_bruteforce(w.A, n, limit);
}
inline LowerBoundReport detlb_bruteforce(const Workload& w, double n,
                                         double limit = 2e6) {
  return detlb_bruteforce(w.A, n, limit);
}

// Decomposition-derived lower bound, up to universal constants. Dense mode
// (n = inf): L_A = max_i d_i r_i^2. Sparse mode: eps*n r_i^2 on levels with
// d_i >= eps*n, d_i r_i^2 on the rest.
inline LowerBoundReport dec_lowerbound(
    const BaseDecomposition& dec, const PrivacyParams& pp,
    double n = std::numeric_limits<double>::infinity()) {
  LowerBoundReport rep;
  rep.n = n;
  rep.mode = "decomposition";
  const bool dense = !std::isfinite(n);
  const double en = dense ? 0.0 : pp.epsilon * n;
  for (Eigen::Index i = 0; i < dec.k(); ++i) {
    const double di = static_cast<double>(dec.levels[i].dim);
    const double r2 = dec.levels[i].radius * dec.levels[i].radius;
    const double val = (!dense && di >= en) ? en * r2 : di * r2;
    if (val > rep.dec_lb) {
      rep.dec_lb = val;
      rep.dec_level = i + 1;
    }
  }
  return rep;
}

struct RatioReport {
  double mechanism_error = 0.0;  // analytic Gaussian error
  double lower_bound = 0.0;      // max(spec_lb, dec_lb) for the mode
  double ratio = 0.0;
  double budget = 0.0;  // (1 + log2 d)^2 * max(1, ln 1/delta)
  LowerBoundReport bounds;
};

inline double ratio_budget(Eigen::Index d, const PrivacyParams& pp) {
  const double l = 1.0 + std::log2(static_cast<double>(std::max<Eigen::Index>(d, 1)));
  return l * l * std::max(1.0, std::log(1.0 / pp.delta));
}

inline RatioReport optimality_ratio(const Eigen::MatrixXd& A, const PrivacyParams& pp,
                                    double n, const std::string& mode,
                                    double limit = 2e6) {
  const BaseDecomposition dec = decompose(A);
  const NoiseSpec spec = build_noise_spec(dec, pp);

  RatioReport rep;
  rep.mechanism_error = analytic_error(spec);
  rep.budget = ratio_budget(A.rows(), pp);
  if (mode == "bruteforce") {
    const double nb = std::isfinite(n) ? n : static_cast<double>(A.rows());
    rep.bounds = speclb_bruteforce(A, nb, limit);
    rep.bounds.dec_lb = dec_lowerbound(dec, pp, n).dec_lb;
  } else {
    rep.bounds = dec_lowerbound(dec, pp, n);
  }
  rep.lower_bound = std::max(rep.bounds.spec_lb, rep.bounds.dec_lb);
  rep.ratio = rep.lower_bound > 0.0
                  ? rep.mechanism_error / rep.lower_bound
                  : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace geodp
