#ifndef VARHSMM_RANDOM_HPP
#define VARHSMM_RANDOM_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace varhsmm {

/// SplitMix64 (Steele, Lea & Flood 2014): a counter-based generator whose
/// k-th output is mix(seed + k * golden_gamma). Output streams are fully
/// determined by the seed on every platform, unlike the standard library's
/// distribution objects, so all variates below are derived by hand.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64/polar-normal/v1";

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  /// Index drawn from the (unnormalised, non-negative) weights by inverse CDF.
  template <typename Derived>
  int categorical(const Eigen::DenseBase<Derived>& weights) {
    const double total = weights.sum();
    const double u = uniform() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights(i) <= 0.0) continue;
      last_positive = static_cast<int>(i);
      acc += weights(i);
      if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
  }

  /// Independent generator for a sub-stream (e.g. one replicate of many).
  Rng split() { return Rng(next_u64()); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace varhsmm

#endif  // VARHSMM_RANDOM_HPP
