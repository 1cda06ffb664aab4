// geodp command line: generate workloads, inspect decompositions, run
// mechanisms, estimate worst-case error, compute lower bounds and
// discrepancy reports, and drive whole corpora from a config file.
//
// Exit codes: 0 ok, 2 assertion failure, 3 budget/infeasible, 4 input error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "geodp/bounds.hpp"
#include "geodp/decomposition.hpp"
#include "geodp/discrepancy.hpp"
#include "geodp/harness.hpp"
#include "geodp/knorm.hpp"
#include "geodp/sparsemech.hpp"

using nlohmann::json;

namespace {

geodp::WorkloadFormat parse_format(const std::string& f) {
  if (f == "csv") return geodp::WorkloadFormat::Csv;
  if (f == "json") return geodp::WorkloadFormat::Json;
  throw geodp::InputError("unknown format: " + f);
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw geodp::InputError("cannot open for writing: " + out_path);
    out << j.dump(2) << '\n';
  }
}

json answer_to_json(const geodp::MechanismAnswer& a) {
  json j{{"mechanism", a.mechanism},
         {"epsilon", a.pp.epsilon},
         {"delta", a.pp.delta},
         {"seed", a.seed},
         {"answer", std::vector<double>(a.answer.data(), a.answer.data() + a.answer.size())}};
  if (a.fw_gap > 0.0) j["fw_gap"] = a.fw_gap;
  if (a.noise_dual_norm > 0.0) j["noise_dual_norm"] = a.noise_dual_norm;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodp: near-optimal differentially private linear query release"};
  app.require_subcommand(1);

  // shared option storage
  std::string workload_path, format = "csv", out_path, hist_path, config_path;
  std::string kind = "identity", mech = "gaussian", mode = "bruteforce";
  std::uint64_t seed = 1;
  int d = 4, N = 4, trials = 200, threads = 1, T = -1, L = -1;
  int edges = 4, vertices = 6;
  bool colorable = true;
  double eps = 1.0, delta = 1e-6, n = 4.0, limit = 2e6;

  auto* gen = app.add_subcommand("gen", "generate a workload");
  gen->add_option("--kind", kind, "identity|random_sign|random_counting|intervals|marginals|hypergraph");
  gen->add_option("--d", d)->required();
  gen->add_option("--N", N)->required();
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path);
  gen->add_option("--format", format, "csv|json");

  auto* dec = app.add_subcommand("decompose", "base decomposition summary");
  dec->add_option("--workload", workload_path)->required();
  dec->add_option("--format", format);

  auto* run = app.add_subcommand("run", "run a mechanism once");
  run->add_option("--mech", mech, "gaussian|lse|simple-lse|knorm|knorm-split|median");
  run->add_option("--workload", workload_path)->required();
  run->add_option("--hist", hist_path, "histogram JSON ({n, x})")->required();
  run->add_option("--eps", eps);
  run->add_option("--delta", delta);
  run->add_option("--seed", seed);
  run->add_option("--T", T, "Frank-Wolfe iterations");
  run->add_option("--L", L, "median mechanism repetitions (odd)");
  run->add_option("--format", format);

  auto* ev = app.add_subcommand("evaluate", "Monte-Carlo worst-case error");
  ev->add_option("--mech", mech);
  ev->add_option("--workload", workload_path)->required();
  ev->add_option("--eps", eps);
  ev->add_option("--delta", delta);
  ev->add_option("--n", n);
  ev->add_option("--trials", trials);
  ev->add_option("--seed", seed);
  ev->add_option("--threads", threads);
  ev->add_option("--format", format);

  auto* lb = app.add_subcommand("lowerbound", "error lower bounds");
  lb->add_option("--workload", workload_path)->required();
  lb->add_option("--mode", mode, "bruteforce|decomposition");
  lb->add_option("--n", n);
  lb->add_option("--eps", eps);
  lb->add_option("--delta", delta);
  lb->add_option("--limit", limit, "subset enumeration budget");
  lb->add_option("--format", format);

  auto* hd = app.add_subcommand("herdisc", "hereditary discrepancy");
  hd->add_option("--workload", workload_path)->required();
  hd->add_option("--mode", mode, "exact|approx");
  hd->add_option("--eps", eps);
  hd->add_option("--delta", delta);
  hd->add_option("--format", format);

  auto* dc = app.add_subcommand("disc", "discrepancy of the full column set");
  dc->add_option("--workload", workload_path)->required();
  dc->add_option("--format", format);

  auto* gh = app.add_subcommand("gen-hypergraph", "3-uniform hypergraph incidence workload");
  gh->add_option("--edges", edges);
  gh->add_option("--vertices", vertices);
  gh->add_option("--colorable", colorable);
  gh->add_option("--seed", seed);
  gh->add_option("--out", out_path);
  gh->add_option("--format", format);

  auto* co = app.add_subcommand("corpus", "run a corpus config, emit a report bundle");
  co->add_option("--config", config_path)->required();
  co->add_option("--out", out_path);
  co->add_option("--seed", seed, "overrides the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      geodp::Workload w = geodp::gen_workload(kind, d, N, seed);
      if (out_path.empty())
        geodp::save_workload_csv(w, std::cout);
      else
        geodp::save_workload(w, out_path, parse_format(format));
      return 0;
    }
    if (*dec) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      geodp::BaseDecomposition bd = geodp::decompose(w.A);
      json levels = json::array();
      for (const auto& lvl : bd.levels)
        levels.push_back({{"dim", lvl.dim}, {"radius", lvl.radius}});
      emit({{"d", bd.d}, {"k", bd.k()}, {"levels", levels}}, "");
      return 0;
    }
    if (*run) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      geodp::Histogram x = geodp::load_histogram(hist_path);
      geodp::MechanismAnswer ans;
      if (mech == "median") {
        geodp::PrivacyParams pp(eps, delta);
        const int reps = L > 0 ? L : geodp::default_median_reps(w.d());
        ans = geodp::median_linf_mechanism(w.A, pp, x, reps, seed);
      } else {
        const bool pure = mech == "knorm" || mech == "knorm-split";
        geodp::PrivacyParams pp(eps, pure ? 0.0 : delta);
        ans = geodp::make_mechanism(mech, w.A, pp, T)(x, seed);
      }
      emit(answer_to_json(ans), "");
      return 0;
    }
    if (*ev) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      const bool pure = mech == "knorm" || mech == "knorm-split";
      geodp::PrivacyParams pp(eps, pure ? 0.0 : delta);
      geodp::ErrorEstimate est = geodp::evaluate_error(
          geodp::make_mechanism(mech, w.A, pp), mech, w.A, n, trials, seed, threads);
      est.workload = w.label;
      if (mech == "gaussian")
        est.analytic =
            geodp::analytic_error(geodp::build_noise_spec(geodp::decompose(w.A), pp));
      emit(geodp::estimate_to_json(est), "");
      return 0;
    }
    if (*lb) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      geodp::PrivacyParams pp(eps, delta);
      if (mode == "bruteforce") {
        geodp::LowerBoundReport spec = geodp::speclb_bruteforce(w.A, n, limit);
        geodp::LowerBoundReport det = geodp::detlb_bruteforce(w.A, n, limit);
        spec.det_lb = det.det_lb;
        spec.det_witness = det.det_witness;
        spec.dec_lb = geodp::dec_lowerbound(geodp::decompose(w.A), pp, n).dec_lb;
        emit(geodp::lowerbound_to_json(spec), "");
      } else if (mode == "decomposition") {
        emit(geodp::lowerbound_to_json(
                 geodp::dec_lowerbound(geodp::decompose(w.A), pp, n)),
             "");
      } else {
        throw geodp::InputError("lowerbound: unknown mode " + mode);
      }
      return 0;
    }
    if (*hd) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      if (mode == "exact" || mode == "bruteforce") {
        geodp::DiscrepancyReport r = geodp::herdisc_bruteforce(w.A);
        emit({{"herdisc", *r.herdisc_exact},
              {"witness_subset", r.witness_subset},
              {"note", "colorings come from brute force only"}},
             "");
      } else if (mode == "approx") {
        geodp::DiscrepancyReport r =
            geodp::herdisc_approx(w.A, geodp::PrivacyParams(eps, delta));
        emit({{"lower_estimate", r.lower_estimate},
              {"upper_estimate", r.upper_estimate},
              {"approx_factor_budget", r.approx_factor_budget},
              {"knorm_note", "generalized distribution substituted by the plain K-norm density"}},
             "");
      } else {
        throw geodp::InputError("herdisc: unknown mode " + mode);
      }
      return 0;
    }
    if (*dc) {
      geodp::Workload w = geodp::load_workload(workload_path, parse_format(format));
      geodp::DiscResult r = geodp::disc_bruteforce(w.A);
      std::vector<int> col(r.coloring.data(), r.coloring.data() + r.coloring.size());
      emit({{"disc", r.value}, {"coloring", col}}, "");
      return 0;
    }
    if (*gh) {
      geodp::Workload w = geodp::hypergraph_instance(edges, vertices, colorable, seed);
      if (out_path.empty())
        geodp::save_workload_csv(w, std::cout);
      else
        geodp::save_workload(w, out_path, parse_format(format));
      return 0;
    }
    if (*co) {
      std::ifstream in(config_path);
      if (!in) throw geodp::InputError("cannot open config: " + config_path);
      json config;
      try {
        in >> config;
      } catch (const json::exception& e) {
        throw geodp::InputError(std::string("config parse failure: ") + e.what());
      }
      if (co->count("--seed")) config["seed"] = seed;
      geodp::CorpusResult res = geodp::run_corpus(config);
      emit(res.bundle, out_path);
      return res.assertions_ok ? 0 : 2;
    }
  } catch (const geodp::BudgetError& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return 3;
  } catch (const geodp::RankError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const geodp::ConditioningError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const geodp::DimensionError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const geodp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
