// Pre-build calibration: measures the constants that the committed header
// include/geodp/calibration.hpp freezes, by running the mechanisms against
// the brute-force oracles on the desk corpus. Run manually; paste the
// printed values (they already include headroom) into the header.

#include <cmath>
#include <cstdio>
#include <vector>

#include "geodp/bounds.hpp"
#include "geodp/discrepancy.hpp"
#include "geodp/harness.hpp"
#include "geodp/sparsemech.hpp"

using namespace geodp;

namespace {

std::vector<Workload> small_corpus() {
  std::vector<Workload> ws;
  for (Eigen::Index d : {1, 2, 4, 8}) ws.push_back(gen_workload("identity", d, d, 1));
  ws.push_back(make_workload(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix(), "diag23"));
  for (std::uint64_t s : {3ull, 4ull, 5ull}) {
    ws.push_back(gen_workload("random_sign", 4, 8, s));
    ws.push_back(gen_workload("random_counting", 6, 12, s));
  }
  ws.push_back(gen_workload("intervals", 8, 8, 1));
  ws.push_back(gen_workload("intervals", 6, 6, 1));
  return ws;
}

}  // namespace

int main() {
  const PrivacyParams pp(1.0, 1e-6);

  // --- near-optimality ratio constant (R_cal) and dense sandwich ---
  double r_cal = 0.0, sand = 0.0;
  for (const Workload& w : small_corpus()) {
    const BaseDecomposition dec = decompose(w.A);
    const double err = analytic_error(build_noise_spec(dec, pp));
    const double spec = speclb_bruteforce(w.A, static_cast<double>(w.d())).spec_lb;
    const double dense = dec_lowerbound(dec, pp).dec_lb;
    if (spec > 0.0) {
      r_cal = std::max(r_cal, err / spec / ratio_budget(w.d(), pp));
      sand = std::max(sand, dense / spec);
    }
  }
  std::printf("ratio_cal        measured %.4f  -> commit %.1f\n", r_cal,
              std::ceil(r_cal * 2.0 * 10.0) / 10.0);
  std::printf("sandwich_dense   measured %.4f  -> commit %.1f\n", sand,
              std::ceil(sand * 2.0 * 10.0) / 10.0);

  // --- herdisc sandwich constants ---
  double c_lo = 0.0, c_hi = 0.0, factor = 0.0;
  std::vector<Workload> hw;
  for (Eigen::Index d : {2, 4, 8}) hw.push_back(gen_workload("identity", d, d, 1));
  hw.push_back(gen_workload("intervals", 10, 5, 1));
  hw.push_back(gen_workload("intervals", 15, 8, 1));
  for (std::uint64_t s = 1; s <= 5; ++s)
    hw.push_back(hypergraph_instance(6, 10, true, s));
  for (const Workload& w : hw) {
    const double exact = *herdisc_bruteforce(w.A).herdisc_exact;
    const DiscrepancyReport r = herdisc_approx(w.A, pp);
    if (exact > 0.0) {
      c_lo = std::max(c_lo, r.lower_estimate / exact);
      c_hi = std::max(c_hi, exact / r.upper_estimate);
      factor = std::max(factor,
                        (r.upper_estimate / std::max(r.lower_estimate, 1e-12)) /
                            r.approx_factor_budget);
    }
  }
  std::printf("sandwich_lower   measured %.4f  -> commit %.1f\n", c_lo,
              std::ceil(c_lo * 2.0 * 10.0) / 10.0);
  std::printf("sandwich_upper   measured %.4f  -> commit %.2f\n", c_hi,
              std::ceil(c_hi * 2.0 * 100.0) / 100.0);
  std::printf("end-to-end sandwich factor / budget: %.4f (acceptance caps at 10)\n", factor);

  // --- median mechanism constant ---
  {
    const Workload w = gen_workload("random_counting", 16, 24, 7);
    const int L = 9;
    const WeightedWorkload ww = minimax_weights(w.A, pp);
    const PrivacyParams per(pp.epsilon / L, pp.delta / L);
    const Eigen::VectorXd diag = detail::weighted_cov_diag(w.A, ww.p, per);
    double rms = 0.0;
    for (Eigen::Index i = 0; i < w.d(); ++i)
      rms = std::max(rms, std::sqrt(diag[i] / std::max(ww.p[i], 1e-12)));
    const double yard = std::sqrt(2.0 * std::log(static_cast<double>(w.d()))) * rms;
    const Histogram x = make_histogram(Eigen::VectorXd::Zero(w.N()), 4.0);
    double mean = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      MechanismAnswer a = median_linf_mechanism(w.A, pp, x, L, 1000 + t);
      mean += a.noise.lpNorm<Eigen::Infinity>();
    }
    mean /= trials;
    std::printf("median_const     measured %.4f  -> commit %.1f\n", mean / yard,
                std::ceil(mean / yard * 1.5 * 10.0) / 10.0);
  }

  // --- simple-lse safety constant ---
  {
    const Workload w = gen_workload("random_counting", 32, 64, 9);
    const double n = 2.0;
    const double r = w.A.colwise().norm().maxCoeff();
    const double yard = 8.0 * n * r * r * pp.noise_scale() *
                        std::sqrt(std::log(static_cast<double>(w.N())));
    const Histogram x = make_histogram(Eigen::VectorXd::Zero(w.N()), n);
    double mean = 0.0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
      MechanismAnswer a = run_simple_lse(w.A, pp, x, 5000 + t);
      mean += (a.answer - w.A * x.x).squaredNorm();
    }
    mean /= trials;
    std::printf("simple_lse       measured %.4f  -> commit %.1f\n", mean / yard,
                std::ceil(mean / yard * 2.0 * 10.0) / 10.0);
  }
  return 0;
}
