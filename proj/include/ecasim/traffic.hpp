#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/rng.hpp"

namespace ecasim {

struct Packet {
  int source = 0;
  double enqueue_time_us = 0.0;  // arrival instant; the delay clock starts here
  std::int64_t payload_bits = 0;
};

struct ArrivalProcess {
  TrafficKind kind = TrafficKind::Poisson;
  double rate = 0.0;  // packets/s, Poisson only
};

/// Exponential inter-arrival time in microseconds, mean 1e6 / rate.
double sample_interarrival(double rate, Rng& rng);

/// Packet source of one node. Poisson sources generate arrivals in
/// continuous time; saturated sources keep the queue topped up.
class TrafficSource {
 public:
  TrafficSource(int node, ArrivalProcess process, std::int64_t payload_bits, Rng rng);

  /// Packets that arrived in (last drain, until_us], in arrival order and
  /// stamped with their exact instants. A saturated source instead returns
  /// `capacity - queued` packets stamped at `until_us`.
  std::vector<Packet> drain(double until_us, std::size_t queued, std::size_t capacity);

  /// Next Poisson arrival instant; +inf for saturated or zero-rate sources.
  double next_arrival_us() const { return next_arrival_us_; }
  bool saturated() const { return process_.kind == TrafficKind::Saturated; }

 private:
  int node_;
  ArrivalProcess process_;
  std::int64_t payload_bits_;
  Rng rng_;
  double next_arrival_us_ = std::numeric_limits<double>::infinity();
};

/// Aggregate offered load in bits/s: n_nodes * rate * payload_bits.
/// Infinite for saturated traffic.
double offered_load_bps(const SimConfig& c);

}  // namespace ecasim
