#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "geodp/errors.hpp"
#include "geodp/rng.hpp"

namespace geodp {

// A set of d linear queries over a universe of N types. Columns a_1..a_N
// generate the sensitivity polytope K = sym{a_j} = A B_1.
struct Workload {
  Eigen::MatrixXd A;
  std::string label;
  bool counting = false;  // all entries in {0,1}
  bool bounded = false;   // all entries in [0,1]

  Eigen::Index d() const { return A.rows(); }
  Eigen::Index N() const { return A.cols(); }

  void validate() const {
    if (A.rows() < 1 || A.cols() < 1)
      throw InputError("workload '" + label + "': d and N must be >= 1");
    if (!A.allFinite())
      throw InputError("workload '" + label + "': non-finite entry");
  }

  void infer_flags() {
    counting = true;
    bounded = true;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double v = A(i, j);
        if (v != 0.0 && v != 1.0) counting = false;
        if (v < 0.0 || v > 1.0) bounded = false;
      }
  }
};

inline Workload make_workload(Eigen::MatrixXd A, std::string label) {
  Workload w{std::move(A), std::move(label)};
  w.validate();
  w.infer_flags();
  return w;
}

// Histogram x with declared l1 bound n. Validation is strict: an
// out-of-bound histogram is rejected, never clamped.
struct Histogram {
  Eigen::VectorXd x;
  double n = 0.0;
  bool integral = false;

  void validate() const {
    if (n < 0.0) throw InputError("histogram: n must be nonnegative");
    if (!x.allFinite()) throw InputError("histogram: non-finite entry");
    if (x.lpNorm<1>() > n * (1.0 + 1e-9) + 1e-30)
      throw InputError("histogram: ||x||_1 exceeds declared bound n");
  }

  void infer_flags() {
    integral = true;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] != std::floor(x[i])) integral = false;
  }
};

inline Histogram make_histogram(Eigen::VectorXd x, double n) {
  Histogram h{std::move(x), n};
  h.validate();
  h.infer_flags();
  return h;
}

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;  // 0 means pure DP

  PrivacyParams() = default;
  PrivacyParams(double eps, double del) : epsilon(eps), delta(del) {
    if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (delta < 0.0 || delta >= 1.0) throw ConfigError("delta must be in [0,1)");
  }

  // c(eps, delta) = (1 + sqrt(2 ln(1/delta))) / eps
  double noise_scale() const {
    if (delta <= 0.0) throw ConfigError("noise scale undefined for delta = 0");
    return (1.0 + std::sqrt(2.0 * std::log(1.0 / delta))) / epsilon;
  }
};

// ---------------------------------------------------------------------------
// Serialization. CSV uses 17 significant digits so decimal round-trips are
// lossless in practice; JSON relies on shortest-round-trip doubles.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void save_workload_csv(const Workload& w, std::ostream& out) {
  for (Eigen::Index i = 0; i < w.d(); ++i) {
    for (Eigen::Index j = 0; j < w.N(); ++j) {
      if (j) out << ',';
      out << format_double(w.A(i, j));
    }
    out << '\n';
  }
}

inline nlohmann::json workload_to_json(const Workload& w) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < w.d(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < w.N(); ++j) row.push_back(w.A(i, j));
    rows.push_back(std::move(row));
  }
  return {{"label", w.label}, {"d", w.d()}, {"N", w.N()}, {"rows", std::move(rows)}};
}

inline Workload workload_from_json(const nlohmann::json& j, const std::string& label_hint = "") {
  if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty())
    throw InputError("workload json: missing or empty 'rows'");
  const auto& rows = j["rows"];
  const Eigen::Index d = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index N = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd A(d, N);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != N)
      throw InputError("workload json: row " + std::to_string(i) + " has length " +
                       std::to_string(rows[i].size()) + ", expected " + std::to_string(N));
    for (Eigen::Index c = 0; c < N; ++c) A(i, c) = rows[i][c].get<double>();
  }
  std::string label = j.value("label", label_hint);
  return make_workload(std::move(A), std::move(label));
}

inline Workload load_workload_csv(std::istream& in, const std::string& label) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Eigen::Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InputError("csv parse failure at row " + std::to_string(lineno) + ", column " +
                         std::to_string(col) + ": '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("csv row " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("csv: no rows");
  Eigen::MatrixXd A(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rows[i][j];
  return make_workload(std::move(A), label);
}

enum class WorkloadFormat { Csv, Json };

inline Workload load_workload(const std::string& path, WorkloadFormat fmt) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open workload file: " + path);
  if (fmt == WorkloadFormat::Csv) return load_workload_csv(in, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("workload json parse failure in " + path + ": " + e.what());
  }
  return workload_from_json(j, path);
}

inline void save_workload(const Workload& w, const std::string& path, WorkloadFormat fmt) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path);
  if (fmt == WorkloadFormat::Csv)
    save_workload_csv(w, out);
  else
    out << workload_to_json(w).dump(2) << '\n';
}

inline nlohmann::json histogram_to_json(const Histogram& h) {
  nlohmann::json x = nlohmann::json::array();
  for (Eigen::Index i = 0; i < h.x.size(); ++i) x.push_back(h.x[i]);
  return {{"n", h.n}, {"x", std::move(x)}};
}

inline Histogram histogram_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("x"))
    throw InputError("histogram json: need fields 'n' and 'x'");
  Eigen::VectorXd x(j["x"].size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = j["x"][static_cast<std::size_t>(i)].get<double>();
  return make_histogram(std::move(x), j["n"].get<double>());
}

inline Histogram load_histogram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open histogram file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("histogram json parse failure: ") + e.what());
  }
  return histogram_from_json(j);
}

// ---------------------------------------------------------------------------
// Generators.

// 3-uniform hypergraph incidence matrix, one row per edge. With
// colorable=true the edges are drawn mixed under a hidden 2-coloring
// (a planted transversal), which forces herdisc <= 2.
inline Workload hypergraph_instance(Eigen::Index m_edges, Eigen::Index n_vertices,
                                    bool colorable, std::uint64_t seed) {
  if (n_vertices < 3) throw ConfigError("hypergraph: need at least 3 vertices");
  if (m_edges < 1) throw ConfigError("hypergraph: need at least 1 edge");
  Rng rng(seed, 71);
  std::vector<int> color(n_vertices, 1);
  if (colorable) {
    // both colors must be present or no mixed edge exists
    do {
      for (auto& c : color) c = rng.uniform() < 0.5 ? 1 : -1;
    } while (std::count(color.begin(), color.end(), 1) == 0 ||
             std::count(color.begin(), color.end(), -1) == 0);
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_edges, n_vertices);
  for (Eigen::Index e = 0; e < m_edges; ++e) {
    std::set<Eigen::Index> edge;
    do {
      edge.clear();
      while (static_cast<Eigen::Index>(edge.size()) < 3)
        edge.insert(static_cast<Eigen::Index>(rng.uniform_index(n_vertices)));
    } while (colorable &&
             std::abs(std::accumulate(edge.begin(), edge.end(), 0,
                                      [&](int s, Eigen::Index v) { return s + color[v]; })) == 3);
    for (Eigen::Index v : edge) A(e, v) = 1.0;
  }
  return make_workload(std::move(A), "hypergraph");
}

inline Workload gen_workload(const std::string& kind, Eigen::Index d, Eigen::Index N,
                             std::uint64_t seed) {
  if (d < 1 || N < 1) throw ConfigError("gen_workload: d and N must be >= 1");
  Rng rng(seed, 17);
  if (kind == "identity") {
    if (d != N) throw ConfigError("identity workload requires d == N");
    return make_workload(Eigen::MatrixXd::Identity(d, d), "identity");
  }
  if (kind == "random_sign") {
    Eigen::MatrixXd A(d, N);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < N; ++j) A(i, j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return make_workload(std::move(A), "random_sign");
  }
  if (kind == "random_counting") {
    Eigen::MatrixXd A(d, N);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < N; ++j) A(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    return make_workload(std::move(A), "random_counting");
  }
  if (kind == "intervals") {
    // rows enumerate contiguous ranges [lo, hi], ordered by lo then hi
    const Eigen::Index total = N * (N + 1) / 2;
    if (d > total)
      throw ConfigError("intervals: d may not exceed N(N+1)/2 = " + std::to_string(total));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, N);
    Eigen::Index row = 0;
    for (Eigen::Index lo = 0; lo < N && row < d; ++lo)
      for (Eigen::Index hi = lo; hi < N && row < d; ++hi, ++row)
        A.row(row).segment(lo, hi - lo + 1).setOnes();
    return make_workload(std::move(A), "intervals");
  }
  if (kind == "marginals") {
    Eigen::Index m = 0;
    while ((Eigen::Index(1) << m) < N) ++m;
    if ((Eigen::Index(1) << m) != N) throw ConfigError("marginals: N must be a power of 2");
    if (d != m) throw ConfigError("marginals: d must equal log2(N)");
    Eigen::MatrixXd A(d, N);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < N; ++j) A(i, j) = (j >> i) & 1 ? 1.0 : 0.0;
    return make_workload(std::move(A), "marginals");
  }
  if (kind == "hypergraph") {
    Workload w = hypergraph_instance(d, N, /*colorable=*/true, seed);
    return w;
  }
  throw ConfigError("unknown workload kind: " + kind);
}

}  // namespace geodp
