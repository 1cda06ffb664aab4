#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "geodp/bounds.hpp"
#include "geodp/calibration.hpp"
#include "geodp/gaussmech.hpp"
#include "geodp/knorm.hpp"
#include "geodp/sparsemech.hpp"
#include "geodp/workload.hpp"

namespace geodp {

inline constexpr const char* kReportSchema = "geodp-report/1";
inline constexpr const char* kVersion = "geodp 1.0.0";

// Monte-Carlo estimate of err(A, n) = sup_x E||Ax - M(x)||^2 over the
// documented candidate set.
struct ErrorEstimate {
  std::string mechanism;
  std::string workload;
  double n = 0.0;
  int trials = 0;
  std::vector<double> candidate_mse;
  double max_mse = 0.0;     // the err estimate
  double std_error = 0.0;   // SE of the maximizing candidate's mean
  std::uint64_t seed = 0;
  double analytic = -1.0;   // cross-report for noise-oblivious mechanisms
};

// Candidate histograms: origin, the vertices +-n e_j of n B_1, and 32
// random nonnegative integer histograms with ||x||_1 = floor(n).
inline std::vector<Histogram> error_candidates(Eigen::Index N, double n,
                                               std::uint64_t seed) {
  std::vector<Histogram> out;
  out.push_back(make_histogram(Eigen::VectorXd::Zero(N), n));
  for (Eigen::Index j = 0; j < N; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
    e[j] = n;
    out.push_back(make_histogram(e, n));
    e[j] = -n;
    out.push_back(make_histogram(e, n));
  }
  const long balls = static_cast<long>(std::floor(n));
  Rng rng(seed, 31);
  for (int c = 0; c < 32; ++c) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    for (long b = 0; b < balls; ++b) x[rng.uniform_index(N)] += 1.0;
    out.push_back(make_histogram(std::move(x), n));
  }
  return out;
}

// Documented trial splitting rule: every trial seed is a pure function of
// (base seed, candidate index, trial index), so parallel and serial runs
// produce identical estimates.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t candidate, int trial) {
  Rng r(seed, 37);
  return r.child(candidate).child(static_cast<std::uint64_t>(trial)).next_u64();
}

inline ErrorEstimate evaluate_error(const Mechanism& mech, const std::string& mech_id,
                                    const Eigen::MatrixXd& A, double n, int trials,
                                    std::uint64_t seed, int threads = 1) {
  if (trials < 100) throw ConfigError("evaluate_error: trials must be >= 100");
  if (threads < 1) threads = 1;

  ErrorEstimate est;
  est.mechanism = mech_id;
  est.n = n;
  est.trials = trials;
  est.seed = seed;

  const std::vector<Histogram> cands = error_candidates(A.cols(), n, seed);
  std::size_t argmax = 0;
  std::vector<double> best_errs;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const Histogram& x = cands[c];
    const Eigen::VectorXd truth = A * x.x;
    std::vector<double> errs(trials);
    auto chunk = [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        const MechanismAnswer ans = mech(x, trial_seed(seed, c, t));
        errs[t] = (ans.answer - truth).squaredNorm();
      }
    };
    if (threads == 1) {
      chunk(0, trials);
    } else {
      std::vector<std::thread> pool;
      const int step = (trials + threads - 1) / threads;
      for (int w = 0; w < threads; ++w)
        pool.emplace_back(chunk, std::min(w * step, trials),
                          std::min((w + 1) * step, trials));
      for (auto& th : pool) th.join();
    }
    double mean = 0.0;
    for (double e : errs) mean += e;  // fixed-order reduction
    mean /= trials;
    est.candidate_mse.push_back(mean);
    if (mean > est.max_mse || c == 0) {
      est.max_mse = mean;
      argmax = c;
      best_errs = errs;
    }
  }
  double var = 0.0;
  for (double e : best_errs) var += (e - est.candidate_mse[argmax]) * (e - est.candidate_mse[argmax]);
  var /= std::max(1, trials - 1);
  est.std_error = std::sqrt(var / trials);
  return est;
}

// Mechanism registry for the CLI and the corpus runner. Decomposition and
// projection parameters are fixed per construction; all randomness flows
// from the per-call seed.
inline Mechanism make_mechanism(const std::string& id, const Eigen::MatrixXd& A,
                                const PrivacyParams& pp, int T = -1) {
  if (id == "gaussian") {
    NoiseSpec spec = build_noise_spec(decompose(A), pp);
    return [spec, A](const Histogram& x, std::uint64_t seed) {
      return run_gaussian(spec, A, x, seed);
    };
  }
  if (id == "lse") {
    NoiseSpec spec = build_noise_spec(decompose(A), pp);
    return [spec, A, T](const Histogram& x, std::uint64_t seed) {
      return run_lse(spec, A, x, seed, T);
    };
  }
  if (id == "simple-lse") {
    return [A, pp, T](const Histogram& x, std::uint64_t seed) {
      return run_simple_lse(A, pp, x, seed, T);
    };
  }
  if (id == "knorm") {
    return [A, pp, T](const Histogram& x, std::uint64_t seed) {
      return run_knorm_lse(A, pp, x, seed, T);
    };
  }
  if (id == "knorm-split") {
    return [A, pp, T](const Histogram& x, std::uint64_t seed) {
      return run_knorm_split(A, pp, x, seed, T);
    };
  }
  throw ConfigError("unknown mechanism: " + id);
}

inline nlohmann::json estimate_to_json(const ErrorEstimate& e) {
  nlohmann::json j{{"mechanism", e.mechanism}, {"workload", e.workload},
                   {"n", e.n},                 {"trials", e.trials},
                   {"max_mse", e.max_mse},     {"std_error", e.std_error},
                   {"seed", e.seed},           {"candidate_mse", e.candidate_mse}};
  if (e.analytic >= 0.0) j["analytic"] = e.analytic;
  return j;
}

inline nlohmann::json lowerbound_to_json(const LowerBoundReport& r) {
  nlohmann::json j{{"spec_lb", r.spec_lb}, {"det_lb", r.det_lb},
                   {"dec_lb", r.dec_lb},   {"mode", r.mode},
                   {"note", "up to universal constants"}};
  if (std::isfinite(r.n)) j["n"] = r.n;
  if (!r.spec_witness.subset.empty())
    j["spec_witness"] = {{"subset", r.spec_witness.subset}, {"k", r.spec_witness.k}};
  if (!r.det_witness.subset.empty())
    j["det_witness"] = {{"subset", r.det_witness.subset}, {"k", r.det_witness.k}};
  if (r.dec_level >= 0) j["dec_level"] = r.dec_level;
  return j;
}

struct CorpusResult {
  nlohmann::json bundle;
  bool assertions_ok = true;
};

// Corpus runner: for each workload and mechanism, a Monte-Carlo error
// estimate; plus lower bounds and ratios when requested. Everything in the
// bundle is a pure function of (config, seed).
inline CorpusResult run_corpus(const nlohmann::json& config) {
  if (!config.is_object()) throw InputError("corpus config: expected a JSON object");
  const std::uint64_t seed = config.value("seed", std::uint64_t{1});
  const int trials = config.value("trials", 200);
  const double eps = config.value("eps", 1.0);
  const double delta = config.value("delta", 1e-6);
  const double n = config.value("n", 4.0);
  const int threads = config.value("threads", 1);
  const bool want_bounds = config.value("lowerbounds", true);
  const PrivacyParams pp(eps, delta);
  const PrivacyParams pure(eps, 0.0);

  std::vector<Workload> workloads;
  for (const auto& wj : config.value("workloads", nlohmann::json::array())) {
    if (wj.contains("file")) {
      const std::string fmt = wj.value("format", "json");
      workloads.push_back(load_workload(
          wj["file"].get<std::string>(),
          fmt == "csv" ? WorkloadFormat::Csv : WorkloadFormat::Json));
    } else {
      workloads.push_back(gen_workload(wj.value("kind", "identity"),
                                       wj.value("d", 4), wj.value("N", 4),
                                       wj.value("seed", seed)));
    }
  }
  std::vector<std::string> mechs =
      config.value("mechanisms", std::vector<std::string>{"gaussian"});

  CorpusResult out;
  out.bundle = {{"schema", kReportSchema},
                {"version", kVersion},
                {"config", config},
                {"calibration",
                 {{"ratio_cal", cal::kRatioCal},
                  {"sandwich_lower", cal::kSandwichLower},
                  {"sandwich_upper", cal::kSandwichUpper},
                  {"median_const", cal::kMedianConst},
                  {"simple_lse_safety", cal::kSimpleLseSafety}}},
                {"knorm_note",
                 "pure-DP noise uses the plain K-norm density; the generalized "
                 "distribution is substituted out"},
                {"results", nlohmann::json::array()}};

  double worst_ratio = 0.0;
  double worst_error = 0.0;
  for (const Workload& w : workloads) {
    nlohmann::json entry{{"workload", w.label}, {"d", w.d()}, {"N", w.N()},
                         {"estimates", nlohmann::json::array()}};
    for (const std::string& id : mechs) {
      const bool is_pure = id == "knorm" || id == "knorm-split";
      const PrivacyParams& use = is_pure ? pure : pp;
      Mechanism mech = make_mechanism(id, w.A, use);
      ErrorEstimate est = evaluate_error(mech, id, w.A, n, trials, seed, threads);
      est.workload = w.label;
      if (id == "gaussian")
        est.analytic = analytic_error(build_noise_spec(decompose(w.A), pp));
      worst_error = std::max(worst_error, est.max_mse);
      entry["estimates"].push_back(estimate_to_json(est));
    }
    if (want_bounds) {
      const BaseDecomposition dec = decompose(w.A);
      LowerBoundReport lb = dec_lowerbound(dec, pp, n);
      entry["lowerbound"] = lowerbound_to_json(lb);
      const double err = analytic_error(build_noise_spec(dec, pp));
      if (lb.dec_lb > 0.0) {
        const double ratio = err / lb.dec_lb;
        entry["ratio"] = ratio;
        worst_ratio = std::max(worst_ratio, ratio);
      }
    }
    out.bundle["results"].push_back(std::move(entry));
  }

  for (const auto& a : config.value("assertions", nlohmann::json::array())) {
    const std::string type = a.value("type", "");
    const double v = a.value("value", 0.0);
    bool ok;
    if (type == "max_ratio")
      ok = worst_ratio <= v;
    else if (type == "max_error")
      ok = worst_error <= v;
    else
      throw InputError("corpus config: unknown assertion type '" + type + "'");
    if (!ok) out.assertions_ok = false;
  }
  out.bundle["assertions_ok"] = out.assertions_ok;
  return out;
}

}  // namespace geodp
