#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "geodp/ellipsoid.hpp"
#include "geodp/errors.hpp"
#include "geodp/workload.hpp"

namespace geodp {

struct DecompositionLevel {
  Eigen::MatrixXd U;  // d x d_i, orthonormal columns
  Eigen::Index dim = 0;
  double radius = 0.0;  // max_j ||U^T a_j||_2
};

// Recursive orthogonal splitting of R^d along the singular directions of
// the enclosing ellipsoid: level 1 takes the small semi-axes, the
// recursion continues on the span of the large ones.
struct BaseDecomposition {
  std::vector<DecompositionLevel> levels;
  Eigen::Index d = 0;

  Eigen::Index k() const { return static_cast<Eigen::Index>(levels.size()); }
};

// Orthonormal basis V of range(A) plus the reduced workload V^T A.
// rank 0 (zero matrix) yields an empty V.
struct RowSpaceProjection {
  Eigen::MatrixXd V;        // d x r
  Eigen::MatrixXd reduced;  // r x N
  Eigen::Index rank = 0;
};

inline RowSpaceProjection row_space_projector(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = sv.size() ? sv[0] * std::max(A.rows(), A.cols()) * 1e-12 : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++r;
  RowSpaceProjection out;
  out.rank = r;
  out.V = svd.matrixU().leftCols(r);
  out.reduced = out.V.transpose() * A;
  return out;
}

inline RowSpaceProjection row_space_projector(const Workload& w) {
  return row_space_projector(w.A);
}

namespace detail {

// one recursion step: returns bases in the coordinates of the current space
inline void decompose_rec(const Eigen::MatrixXd& A, double eta, int depth,
                          std::vector<Eigen::MatrixXd>& bases) {
  const Eigen::Index d = A.rows();
  EllipsoidResult mee;
  try {
    mee = approx_mee(A, eta);
  } catch (const ConditioningError& e) {
    throw ConditioningError(std::string(e.what()) + " (recursion depth " +
                            std::to_string(depth) + ")");
  }
  if (d == 1) {
    bases.push_back(Eigen::MatrixXd::Ones(1, 1));
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mee.F, Eigen::ComputeFullU);
  const Eigen::MatrixXd& u = svd.matrixU();  // singular values descending
  const Eigen::Index split = d / 2;          // V keeps i <= floor(d/2)
  Eigen::MatrixXd U1 = u.rightCols(d - split);
  Eigen::MatrixXd V = u.leftCols(split);
  bases.push_back(std::move(U1));

  std::vector<Eigen::MatrixXd> sub;
  decompose_rec(V.transpose() * A, eta, depth + 1, sub);
  for (auto& Vi : sub) bases.push_back(V * Vi);
}

}  // namespace detail

inline BaseDecomposition decompose(const Eigen::MatrixXd& A, double eta = 0.05) {
  std::vector<Eigen::MatrixXd> bases;
  detail::decompose_rec(A, eta, 0, bases);

  BaseDecomposition dec;
  dec.d = A.rows();
  for (auto& U : bases) {
    DecompositionLevel lvl;
    lvl.dim = U.cols();
    lvl.radius = (U.transpose() * A).colwise().norm().maxCoeff();
    lvl.U = std::move(U);
    dec.levels.push_back(std::move(lvl));
  }
  return dec;
}

inline BaseDecomposition decompose(const Workload& w, double eta = 0.05) {
  return decompose(w.A, eta);
}

}  // namespace geodp
