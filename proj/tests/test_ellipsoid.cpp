#include <catch_amalgamated.hpp>

#include <cmath>

#include "geodp/ellipsoid.hpp"
#include "geodp/rng.hpp"
#include "geodp/workload.hpp"

using namespace geodp;

TEST_CASE("mee of the cross-polytope is the unit ball") {
  for (Eigen::Index d : {1, 2, 3, 5}) {
    EllipsoidResult r = approx_mee(Eigen::MatrixXd::Identity(d, d));
    REQUIRE(r.converged);
    // F F^T should be the identity: each vertex on the boundary
    REQUIRE((r.F * r.F.transpose() - Eigen::MatrixXd::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
  }
}

TEST_CASE("mee of diag(2,1) columns matches the grid-search oracle") {
  // Axis-aligned oracle: minimal-area ellipse diag(a,b) containing
  // (+-2, 0), (0, +-1) found by grid refinement over (a, b).
  double best_a = 0, best_b = 0, best_area = 1e300;
  for (double a = 1.0; a <= 3.0; a += 0.001)
    for (double b = 0.5; b <= 2.0; b += 0.001) {
      if (4.0 / (a * a) <= 1.0 + 1e-12 && 1.0 / (b * b) <= 1.0 + 1e-12) {
        if (a * b < best_area) {
          best_area = a * b;
          best_a = a;
          best_b = b;
        }
      }
    }
  REQUIRE(best_a == Catch::Approx(2.0).margin(2e-3));
  REQUIRE(best_b == Catch::Approx(1.0).margin(2e-3));

  Eigen::MatrixXd A = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  EllipsoidResult r = approx_mee(A, 0.01);
  Eigen::MatrixXd shape = r.F * r.F.transpose();
  REQUIRE(shape(0, 0) == Catch::Approx(best_a * best_a).epsilon(0.02));
  REQUIRE(shape(1, 1) == Catch::Approx(best_b * best_b).epsilon(0.02));
  REQUIRE(std::abs(shape(0, 1)) < 1e-6);
}

TEST_CASE("every column is contained after the final rescale") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const Eigen::Index N = d + 1 + trial % 7;
    Eigen::MatrixXd A(d, N);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < N; ++j) A(i, j) = rng.gaussian();
    EllipsoidResult r = approx_mee(A);
    for (Eigen::Index j = 0; j < N; ++j)
      REQUIRE(r.quadratic_form(A.col(j)) <= 1.0 + 1e-9);
    REQUIRE(r.C >= 1.0);
    REQUIRE(r.C <= 1.0 + 0.05 + 1e-6);  // eta-optimal when converged
    REQUIRE(r.converged);
  }
}

TEST_CASE("volume is near-optimal: at most (1+eta)^{d/2} of a reference") {
  // For random workloads compare against the ellipsoid found with a much
  // tighter eta; the ratio of volumes is bounded by the optimality factor.
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index d = 3;
    Eigen::MatrixXd A(d, 8);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) A(i, j) = rng.gaussian();
    const double loose = mee_volume_proxy(approx_mee(A, 0.05));
    const double tight = mee_volume_proxy(approx_mee(A, 1e-4, 2000000));
    REQUIRE(loose - tight <= 0.5 * d * std::log(1.06) + 1e-6);
    REQUIRE(loose - tight >= -1e-6);
  }
}

TEST_CASE("scaling equivariance") {
  Rng rng(7);
  Eigen::MatrixXd A(3, 6);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) A(i, j) = rng.gaussian();
  EllipsoidResult r1 = approx_mee(A, 0.01);
  EllipsoidResult r2 = approx_mee(3.0 * A, 0.01);
  Eigen::MatrixXd s1 = r1.F * r1.F.transpose();
  Eigen::MatrixXd s2 = r2.F * r2.F.transpose();
  REQUIRE((s2 - 9.0 * s1).cwiseAbs().maxCoeff() < 1e-8 * s2.cwiseAbs().maxCoeff());
}

TEST_CASE("rank deficiency is reported, not silently accepted") {
  Eigen::MatrixXd A(3, 4);
  A.setZero();
  A.row(0) << 1, 2, 3, 4;
  A.row(1) << 2, 4, 6, 8;
  A.row(2) << 0, 0, 0, 0;
  REQUIRE_THROWS_AS(approx_mee(A), RankError);
}

TEST_CASE("invalid eta is rejected") {
  REQUIRE_THROWS_AS(approx_mee(Eigen::MatrixXd::Identity(2, 2), 0.0), ConfigError);
}
