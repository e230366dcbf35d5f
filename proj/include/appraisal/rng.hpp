#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace appraisal {

// Deterministic random stream. All sampling primitives are implemented here
// rather than with <random> distributions, whose output sequences are
// implementation-defined; this keeps seeded runs bit-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm-up so that small consecutive seeds do not yield correlated
    // first outputs.
    next();
    next();
  }

  // Independent child stream identified by a label (and optional index).
  // Splitting does not advance this stream.
  Rng split(std::string_view label, std::uint64_t index = 0) const;

  std::uint64_t next_u64() { return next(); }

  // Uniform double in [0, 1).
  double uniform();

  // Standard normal via Box-Muller. Consumes two engine outputs per call.
  double normal();

  // Uniform integer in [0, n). n must be >= 1.
  std::uint64_t uniform_int(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i + 1));
      using std::swap;
      swap(items[i], items[j]);
    }
  }

  // Sample m distinct indices out of [0, n), in ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m);

 private:
  std::uint64_t next();

  std::uint64_t state_;
};

}  // namespace appraisal
