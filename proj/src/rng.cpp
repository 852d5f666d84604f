#include "ecasim/rng.hpp"

namespace ecasim {

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seeded(seed, stream)) {}

int Rng::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

double Rng::exponential(double rate) {
  std::exponential_distribution<double> dist(rate);
  double x = dist(engine_);
  while (x <= 0.0) x = dist(engine_);
  return x;
}

}  // namespace ecasim
