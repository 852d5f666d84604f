#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ecasim {

enum class Protocol { CsmaCa, CsmaEca };

std::string_view to_string(Protocol p);

enum class TrafficKind { Poisson, Saturated };

// How non-transmitting active nodes count down.
//   EverySlot: one decrement per slot, empty or busy (virtual-slot model).
//   IdleOnly:  decrement on Empty slots only; counters freeze while the
//              channel is busy.
enum class CountdownRule { EverySlot, IdleOnly };

enum class RejoinWindow { Exclusive, Inclusive };

// Denominator of the queue-empty ratio.
enum class TxDenominator { Attempts, Successes };

/// PHY/MAC timing. Durations in microseconds, rates in bits per microsecond.
struct TimingTable {
  double slot_empty_us = 9.0;
  double sifs_us = 16.0;
  double difs_us = 34.0;
  double phy_header_us = 20.0;
  double data_rate_bits_per_us = 54.0;
  double ack_rate_bits_per_us = 24.0;
  std::int64_t ack_bits = 112;
  std::int64_t payload_bits = 12000;
};

struct SimConfig {
  Protocol protocol = Protocol::CsmaCa;
  bool hysteresis = false;  // ECA only
  int n_nodes = 10;
  int cw_min = 16;
  int max_stage = 5;
  TrafficKind traffic = TrafficKind::Poisson;
  double arrival_rate = 100.0;  // packets/s per node
  int queue_capacity = 100;
  int max_aggregation = 1;
  std::int64_t sim_slots = 1'000'000;
  std::int64_t warmup_slots = 100'000;
  std::uint64_t seed = 1;
  TimingTable timing;
  CountdownRule countdown = CountdownRule::EverySlot;
  RejoinWindow rejoin_window = RejoinWindow::Exclusive;
  TxDenominator q_empty_denominator = TxDenominator::Attempts;
};

/// Invalid configuration. The message names the violated invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run violated one of its own consistency checks (e.g. a negative delay).
class InternalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const TimingTable& t);
void validate(const SimConfig& c);

/// Contention window at backoff stage k: cw_min * 2^k.
constexpr int contention_window(int cw_min, int stage) { return cw_min << stage; }

}  // namespace ecasim
