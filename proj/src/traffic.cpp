#include "ecasim/traffic.hpp"

#include <cassert>

namespace ecasim {

double sample_interarrival(double rate, Rng& rng) {
  assert(rate > 0.0);
  return rng.exponential(rate) * 1e6;
}

TrafficSource::TrafficSource(int node, ArrivalProcess process, std::int64_t payload_bits, Rng rng)
    : node_(node), process_(process), payload_bits_(payload_bits), rng_(std::move(rng)) {
  if (process_.kind == TrafficKind::Poisson && process_.rate > 0.0) {
    next_arrival_us_ = sample_interarrival(process_.rate, rng_);
  }
}

std::vector<Packet> TrafficSource::drain(double until_us, std::size_t queued, std::size_t capacity) {
  std::vector<Packet> out;
  if (saturated()) {
    for (std::size_t i = queued; i < capacity; ++i) out.push_back({node_, until_us, payload_bits_});
    return out;
  }
  while (next_arrival_us_ <= until_us) {
    out.push_back({node_, next_arrival_us_, payload_bits_});
    next_arrival_us_ += sample_interarrival(process_.rate, rng_);
  }
  return out;
}

double offered_load_bps(const SimConfig& c) {
  if (c.traffic == TrafficKind::Saturated) return std::numeric_limits<double>::infinity();
  return c.n_nodes * c.arrival_rate * static_cast<double>(c.timing.payload_bits);
}

}  // namespace ecasim
