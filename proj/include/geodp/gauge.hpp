#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "geodp/errors.hpp"
#include "geodp/simplex.hpp"

namespace geodp {

// L = scale * G * B_1: the symmetric convex hull of the columns of G
// (and their negations), dilated by scale. For the sensitivity polytope
// K = A B_1 take G = A, scale = 1; the least-squares target n X X^T K
// takes G = X X^T A, scale = n.
struct PolytopeView {
  Eigen::MatrixXd G;
  double scale = 1.0;

  PolytopeView(Eigen::MatrixXd g, double s = 1.0) : G(std::move(g)), scale(s) {
    if (!(scale > 0.0)) throw ConfigError("PolytopeView: scale must be positive");
    if (!G.allFinite()) throw ConfigError("PolytopeView: non-finite generator");
  }

  Eigen::Index dim() const { return G.rows(); }
  Eigen::Index vertices() const { return G.cols(); }
};

inline constexpr double kGaugeInfinity = std::numeric_limits<double>::infinity();

// Minkowski gauge ||y||_L = min{r >= 0 : y in r L}, via the l1 program
// min ||z||_1 s.t. G z = y. Returns +inf when y is outside span(G).
inline double gauge(const PolytopeView& L, const Eigen::VectorXd& y) {
  const Eigen::Index d = L.dim();
  const Eigen::Index N = L.vertices();
  if (y.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
  Eigen::MatrixXd A(d, 2 * N);
  A.leftCols(N) = L.G;
  A.rightCols(N) = -L.G;
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(2 * N);
  LpResult res = solve_lp(A, y, c);
  if (res.status == LpResult::Infeasible) return kGaugeInfinity;
  if (res.status != LpResult::Optimal)
    throw Error("gauge: LP did not converge (iteration limit)");
  return res.objective / L.scale;
}

// ||w||_{L°} = max_{x in L} <x, w>; attained at a vertex.
inline double dual_norm(const PolytopeView& L, const Eigen::VectorXd& w) {
  if (L.vertices() == 0) return 0.0;
  return L.scale * (L.G.transpose() * w).cwiseAbs().maxCoeff();
}

// Maximal chord {t : y + t u in L} around an interior point y.
// Two LPs over (z+, z-, slack, t+, t-):
//   G(z+ - z-) * scale - u (t+ - t-) = y,  1^T(z+ + z-) + s = 1.
inline std::pair<double, double> chord(const PolytopeView& L, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& u) {
  if (u.lpNorm<Eigen::Infinity>() == 0.0)
    throw DimensionError("chord: direction must be nonzero");
  const Eigen::Index d = L.dim();
  const Eigen::Index N = L.vertices();
  const Eigen::Index nv = 2 * N + 3;  // z+, z-, slack, t+, t-
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 1, nv);
  A.block(0, 0, d, N) = L.scale * L.G;
  A.block(0, N, d, N) = -L.scale * L.G;
  A.block(0, 2 * N + 1, d, 1) = -u;
  A.block(0, 2 * N + 2, d, 1) = u;
  A.row(d).segment(0, 2 * N).setOnes();
  A(d, 2 * N) = 1.0;  // slack on the l1 budget
  Eigen::VectorXd b(d + 1);
  b.head(d) = y;
  b[d] = 1.0;

  auto extreme = [&](double sign) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c[2 * N + 1] = sign;   // t+
    c[2 * N + 2] = -sign;  // t-
    LpResult res = solve_lp(A, b, c);
    if (res.status != LpResult::Optimal)
      throw Error("chord: LP failed (is y interior to L?)");
    return res.x[2 * N + 1] - res.x[2 * N + 2];
  };
  const double t_hi = extreme(-1.0);  // maximize t
  const double t_lo = extreme(+1.0);  // minimize t
  return {t_lo, t_hi};
}

struct FwProjection {
  Eigen::VectorXd point;  // feasible: a convex combination of vertices of L
  double gap = 0.0;       // final Frank-Wolfe duality gap
  int iterations = 0;
};

// Curvature bound C(L) <= sup_{u,v in L} |<u, u - v>| for the quadratic;
// for L = scale G B_1 the sup is over signed vertices.
inline double fw_curvature_bound(const PolytopeView& L) {
  double best = 0.0;
  const double s2 = L.scale * L.scale;
  for (Eigen::Index i = 0; i < L.vertices(); ++i) {
    const double gii = L.G.col(i).squaredNorm();
    for (Eigen::Index j = 0; j < L.vertices(); ++j) {
      const double gij = std::abs(L.G.col(i).dot(L.G.col(j)));
      best = std::max(best, s2 * (gii + gij));
    }
  }
  return best;
}

// Frank-Wolfe least squares: argmin_{p in L} ||p - target||^2, exact line
// search, vertex oracle over +-scale g_j. After T iterations the additive
// suboptimality is at most 4 C(L) / (T + 3).
inline FwProjection fw_project(const PolytopeView& L, const Eigen::VectorXd& target, int T) {
  if (T < 1) throw ConfigError("fw_project: need T >= 1");
  FwProjection out;
  out.point = Eigen::VectorXd::Zero(L.dim());
  if (L.vertices() == 0) return out;  // L = {0}
  // An interior target is its own projection; the gauge LP certifies it.
  if (gauge(L, target) <= 1.0 + 1e-12) {
    out.point = target;
    return out;
  }
  for (int it = 0; it < T; ++it) {
    const Eigen::VectorXd residual = target - out.point;  // -grad/2
    Eigen::Index jstar;
    (L.G.transpose() * residual).cwiseAbs().maxCoeff(&jstar);
    const double sgn = L.G.col(jstar).dot(residual) >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd v = sgn * L.scale * L.G.col(jstar);
    const Eigen::VectorXd dir = v - out.point;
    out.gap = 2.0 * residual.dot(dir);
    out.iterations = it + 1;
    if (out.gap <= 0.0) {
      out.gap = std::max(out.gap, 0.0);
      break;
    }
    const double denom = dir.squaredNorm();
    if (denom <= 0.0) break;
    const double step = std::clamp(residual.dot(dir) / denom, 0.0, 1.0);
    if (step <= 0.0) break;
    out.point += step * dir;
  }
  return out;
}

inline int default_fw_iters(double n) {
  return std::max(50, static_cast<int>(10.0 * n));
}

}  // namespace geodp
