#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "geodp/errors.hpp"

namespace geodp {

// Dense two-phase primal simplex for
//     min c^T x   s.t.  A x = b,  x >= 0,
// with Bland's anti-cycling rule. Desk scale only: the tableau is stored
// in full, including the phase-1 artificial columns.
struct LpResult {
  enum Status { Optimal, Infeasible, Unbounded, IterLimit };
  Status status = Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

class SimplexSolver {
public:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kFeasTol = 1e-8;

  static LpResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, long max_iters = -1) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (max_iters < 0) max_iters = 200L * static_cast<long>(m + n) + 2000;

    // tableau: m rows x (n + m) columns (artificials appended), plus rhs
    Eigen::MatrixXd T(m, n + m);
    T.leftCols(n) = A;
    T.rightCols(m).setIdentity();
    Eigen::VectorXd rhs = b;
    for (Eigen::Index i = 0; i < m; ++i)
      if (rhs[i] < 0.0) {
        T.row(i) = -T.row(i);
        rhs[i] = -rhs[i];
      }

    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

    // phase 1: minimize the artificial sum
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + m);
    cost1.tail(m).setOnes();
    long used = 0;
    int rc = optimize(T, rhs, basis, cost1, n + m, max_iters, used);
    if (rc == kIterLimit) return {LpResult::IterLimit, 0.0, {}};
    double art = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] >= n) art += rhs[i];
    if (art > kFeasTol) return {LpResult::Infeasible, 0.0, {}};

    // phase 2: real costs, artificial columns barred from entering
    Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + m);
    cost2.head(n) = c;
    rc = optimize(T, rhs, basis, cost2, n, max_iters - used, used);
    if (rc == kIterLimit) return {LpResult::IterLimit, 0.0, {}};
    if (rc == kUnbounded) return {LpResult::Unbounded, 0.0, {}};

    LpResult res;
    res.status = LpResult::Optimal;
    res.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] < n) res.x[basis[i]] = rhs[i];
    res.objective = c.dot(res.x);
    return res;
  }

private:
  static constexpr int kOptimal = 0;
  static constexpr int kUnbounded = 1;
  static constexpr int kIterLimit = 2;

  // reduced-cost pricing with Bland's rule
  static int optimize(Eigen::MatrixXd& T, Eigen::VectorXd& rhs,
                      std::vector<Eigen::Index>& basis, const Eigen::VectorXd& cost,
                      Eigen::Index n_enterable, long max_iters, long& used) {
    const Eigen::Index m = T.rows();
    for (long iter = 0; iter < max_iters; ++iter, ++used) {
      // T holds B^{-1} A throughout, so pricing is direct
      Eigen::VectorXd cb(m);
      for (Eigen::Index i = 0; i < m; ++i) cb[i] = cost[basis[i]];

      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n_enterable; ++j) {
        const double red = cost[j] - cb.dot(T.col(j));
        if (red < -kPivotTol) {
          enter = j;
          break;  // Bland: smallest index
        }
      }
      if (enter < 0) return kOptimal;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = T(i, enter);
        if (a > kPivotTol) {
          const double ratio = rhs[i] / a;
          if (ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return kUnbounded;

      pivot(T, rhs, leave, enter);
      basis[leave] = enter;
    }
    return kIterLimit;
  }

  static void pivot(Eigen::MatrixXd& T, Eigen::VectorXd& rhs, Eigen::Index r,
                    Eigen::Index col) {
    const double piv = T(r, col);
    T.row(r) /= piv;
    rhs[r] /= piv;
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, col);
      if (f != 0.0) {
        T.row(i) -= f * T.row(r);
        rhs[i] -= f * rhs[r];
      }
    }
  }
};

inline LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c, long max_iters = -1) {
  return SimplexSolver::solve(A, b, c, max_iters);
}

}  // namespace geodp
