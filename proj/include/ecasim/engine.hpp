#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/metrics.hpp"
#include "ecasim/protocols.hpp"
#include "ecasim/rng.hpp"
#include "ecasim/traffic.hpp"

namespace ecasim {

struct EmptySlot {};

struct SuccessSlot {
  int transmitter = 0;
  std::vector<Packet> batch;
};

struct CollisionSlot {
  std::vector<int> transmitters;  // at least two, ascending
  std::int64_t longest_batch_bits = 0;
};

using SlotOutcome = std::variant<EmptySlot, SuccessSlot, CollisionSlot>;

SlotKind kind_of(const SlotOutcome& outcome);

struct SimClock {
  double now_us = 0.0;
  std::int64_t slot_index = 0;
};

/// DIFS + header + data + SIFS + header + ACK for a batch of `batch_bits`.
double exchange_duration(const TimingTable& t, std::int64_t batch_bits);

/// Real-time length of one slot. Collisions are charged as a failed full
/// exchange of the longest colliding batch, passed as `batch_bits`.
double slot_duration(const SlotOutcome& outcome, const TimingTable& t, std::int64_t batch_bits);

/// Complete state of one run. Members are public so tests can pose
/// arbitrary contention states; `make_state` builds a consistent one.
struct SimState {
  SimConfig config;
  ProtocolParams params;
  SimClock clock;
  std::vector<NodeState> nodes;
  std::vector<TrafficSource> sources;
  Rng backoff_rng;
  MetricsAccumulator metrics;

  bool done() const { return clock.slot_index >= config.sim_slots; }
};

/// Throws ConfigError when `config` is invalid.
SimState make_state(const SimConfig& config);

/// Runs one contention slot: arrivals due at the slot boundary are
/// enqueued, every active node with counter 0 transmits, the clock advances
/// by the outcome's duration and the transmitters' protocol callbacks run.
SlotOutcome advance_slot(SimState& s);

/// Finalizes the report and checks per-node packet conservation.
MetricsReport finish(const SimState& s);

/// Runs `config.sim_slots` slots. Runs of empty slots are advanced in one
/// step; the result is bit-identical to calling advance_slot repeatedly.
MetricsReport run_simulation(const SimConfig& config);

}  // namespace ecasim
