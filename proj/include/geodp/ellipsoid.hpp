#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "geodp/errors.hpp"
#include "geodp/workload.hpp"

namespace geodp {

// Approximate minimum-volume enclosing ellipsoid of K = sym{a_1..a_N},
// E = F B_2 with F = sqrt(C d) chol(A diag(p) A^T).
struct EllipsoidResult {
  Eigen::VectorXd p;   // design weights, sum 1
  Eigen::MatrixXd F;   // d x d factor, E = F B_2
  double C = 1.0;      // achieved optimality constant, >= 1
  int iterations = 0;
  bool converged = false;

  double quadratic_form(const Eigen::VectorXd& a) const {
    // a^T (F F^T)^{-1} a; <= 1 iff a is inside E
    Eigen::VectorXd z = F.triangularView<Eigen::Lower>().solve(a);
    return z.squaredNorm();
  }
};

namespace detail {

inline double rank_tolerance(const Eigen::VectorXd& sv, Eigen::Index d) {
  return sv.size() ? sv[0] * d * 1e-12 : 0.0;
}

}  // namespace detail

inline int default_mee_iters(Eigen::Index d, Eigen::Index N) {
  return static_cast<int>(100.0 * static_cast<double>(d) * std::log(static_cast<double>(N) + 1.0)) + 16;
}

// Khachiyan iteration on the symmetric hull: because K = -K is centered,
// the design runs on M(p) = A diag(p) A^T directly, with optimality
// target max_i a_i^T M^{-1} a_i <= (1 + eta) d.
inline EllipsoidResult approx_mee(const Eigen::MatrixXd& A, double eta = 0.05,
                                  int max_iters = -1) {
  const Eigen::Index d = A.rows();
  const Eigen::Index N = A.cols();
  if (eta <= 0.0) throw ConfigError("approx_mee: eta must be positive");
  if (max_iters < 0) max_iters = default_mee_iters(d, N);

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > detail::rank_tolerance(sv, d)) ++rank;
    if (rank < d)
      throw RankError("approx_mee: rank(A) = " + std::to_string(rank) + " < d = " +
                      std::to_string(d) + "; project onto the row space first");
  }

  if (d == 1) {
    // interval case: the enclosing "ellipsoid" is [-max|a|, max|a|]
    Eigen::Index jstar;
    const double amax = A.cwiseAbs().row(0).maxCoeff(&jstar);
    EllipsoidResult res;
    res.p = Eigen::VectorXd::Zero(N);
    res.p[jstar] = 1.0;
    res.F = Eigen::MatrixXd::Constant(1, 1, amax);
    res.C = 1.0;
    res.converged = true;
    return res;
  }

  Eigen::VectorXd p = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));

  Eigen::MatrixXd Minv;  // (A diag(p) A^T)^{-1}
  Eigen::MatrixXd Q;     // Minv * A
  Eigen::VectorXd g;     // g_j = a_j^T Minv a_j

  auto refactor = [&]() {
    Eigen::MatrixXd M = A * p.asDiagonal() * A.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw ConditioningError("approx_mee: A diag(p) A^T numerically singular");
    Minv = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
    Q = Minv * A;
    g = (A.array() * Q.array()).colwise().sum();
  };
  refactor();

  const double dd = static_cast<double>(d);
  int iters = 0;
  bool converged = false;
  const int refactor_period = static_cast<int>(d) + 8;

  for (; iters < max_iters; ++iters) {
    Eigen::Index istar;
    const double gmax = g.maxCoeff(&istar);
    if (gmax <= (1.0 + eta) * dd) {
      converged = true;
      break;
    }
    // closed-form optimal step toward e_{i*}
    const double kappa = (gmax - dd) / (dd * (gmax - 1.0));
    p *= (1.0 - kappa);
    p[istar] += kappa;

    if ((iters + 1) % refactor_period == 0 || kappa > 1.0 - 1e-9) {
      refactor();
      continue;
    }
    // Sherman-Morrison update of Minv, Q, g for
    // M' = (1-kappa) M + kappa a a^T
    const Eigen::VectorXd z = Q.col(istar);  // Minv a
    const double denom = (1.0 - kappa) + kappa * gmax;
    if (denom <= 0.0 || !std::isfinite(denom))
      throw ConditioningError("approx_mee: degenerate rank-one update");
    const double beta = kappa / denom;
    const Eigen::VectorXd s = A.transpose() * z;  // s_j = a_j^T z
    Q = (Q - beta * z * s.transpose()) / (1.0 - kappa);
    Minv = (Minv - beta * z * z.transpose()) / (1.0 - kappa);
    g = (g - beta * s.cwiseProduct(s)) / (1.0 - kappa);
  }

  refactor();
  double C = g.maxCoeff() / dd;
  if (C < 1.0) C = 1.0;  // containment scale; C < 1 only through roundoff

  Eigen::MatrixXd M = A * p.asDiagonal() * A.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("approx_mee: final Cholesky failed");
  Eigen::MatrixXd F = std::sqrt(C * dd) * Eigen::MatrixXd(llt.matrixL());

  EllipsoidResult res{std::move(p), std::move(F), C, iters, converged};

  // Final rescale: containment of every column must hold regardless of
  // convergence, since privacy downstream depends only on K being inside E.
  double qmax = 0.0;
  for (Eigen::Index j = 0; j < N; ++j) qmax = std::max(qmax, res.quadratic_form(A.col(j)));
  if (qmax > 1.0) {
    res.F *= std::sqrt(qmax);
    res.C *= qmax;
  }
  return res;
}

inline EllipsoidResult approx_mee(const Workload& w, double eta = 0.05, int max_iters = -1) {
  return approx_mee(w.A, eta, max_iters);
}

// log-det of the factor; shrinks as the ellipsoid improves
inline double mee_volume_proxy(const EllipsoidResult& res) {
  return std::log(std::abs(res.F.determinant()));
}

}  // namespace geodp
