#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace authentext {

/// Seed of the named sub-stream `stream` under the run-level seed `master`:
/// splitmix64(master XOR fnv1a64(stream)). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept;

/// Portable random source. std::mt19937_64's output sequence is fixed by the
/// standard; the distributions below are implemented here because the
/// standard library's are not reproducible across implementations.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::string_view stream)
      : engine_(derive_seed(master_seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace authentext
