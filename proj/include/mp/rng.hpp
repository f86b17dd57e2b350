#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mp {

/// Counter-based stream: every (seed, label, index) triple names an independent
/// SplitMix64 sequence, so results never depend on scheduling or thread count.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n); n >= 1.
  std::uint64_t below(std::uint64_t n);
  bool coin(double probability) { return uniform01() < probability; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Mixes a seed with a label and index into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

}  // namespace mp
