#pragma once

#include <cstdint>
#include <random>

namespace ecasim {

/// Seeded random stream. Independent streams of one run share the seed and
/// differ in `stream`, so traffic draws do not depend on backoff draws.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Exponential with the given rate (> 0); never returns 0.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecasim
