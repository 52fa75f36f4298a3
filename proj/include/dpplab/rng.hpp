#ifndef DPPLAB_RNG_HPP
#define DPPLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dpplab {

/// Counter-based stream: the i-th draw is a SplitMix64 finalization of
/// key + i·γ, with the key derived from (master seed, replica index). Draws
/// depend only on (seed, replica, position), never on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t master_seed, std::uint64_t replica = 0)
      : key_(mix(mix(master_seed ^ 0x6a09e667f3bcc909ULL) + mix(replica + 0xbb67ae8584caa73bULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGamma * ++counter_); }

  std::uint64_t position() const { return counter_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return double(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box–Muller (both variates used, fixed order).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_positive()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dpplab

#endif  // DPPLAB_RNG_HPP
