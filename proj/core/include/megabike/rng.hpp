#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace megabike {

/// Seeded generator with platform-independent draws.
///
/// std::mt19937_64's output sequence is fixed by the standard, but the std
/// distributions are not, so the mapping to reals and ranges is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer on [0, n); n must be positive.
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  /// Independent stream derived from this generator's seed (not its state),
  /// so drawing from one substream never shifts another.
  Rng substream(std::string_view name, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

}  // namespace megabike
