#pragma once

#include <cmath>
#include <cstdint>
#include <Eigen/Core>

namespace geodp {

// Counter-based generator: every draw is a pure function of (key, counter),
// so streams can be split deterministically and replayed in any order.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

  // Derive an independent child stream. Used as the documented trial
  // splitting rule: parallel and serial runs draw identical values.
  Rng child(std::uint64_t stream) const { return Rng(key_, stream + 1); }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  // uniform in (0,1)
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t m) { return next_u64() % m; }

  // Marsaglia polar method; second value cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = gaussian();
    return w;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Gamma with integer shape: sum of exponentials. Shapes here are always
  // small (dim + 1), so this is exact and cheap.
  double gamma_int(int shape, double rate) {
    double s = 0.0;
    for (int i = 0; i < shape; ++i) s += exponential(rate);
    return s;
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace geodp
