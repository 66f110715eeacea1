#pragma once

#include <cstdint>
#include <iterator>
#include <limits>
#include <utility>

namespace numgeo {

struct RngSeed {
  std::uint64_t value = 42;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output k of stream s under seed is a pure
/// function of (seed, s, k), so streams can be handed to any thread and the
/// sampled values never depend on scheduling. Integer and uniform outputs are
/// bit-identical across platforms; normal() goes through libm log/cos.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(RngSeed seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Unbiased integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal via Box-Muller.
  double normal() noexcept;

  template <std::random_access_iterator It>
  void shuffle(It first, It last) noexcept {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace numgeo
