#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/protocols.hpp"
#include "ecasim/traffic.hpp"

namespace ecasim {

enum class SlotKind { Empty, Success, Collision };

struct NodeReport {
  // Post-warmup window.
  std::int64_t transmissions = 0;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t queue_empty_events = 0;
  std::int64_t drops = 0;
  std::int64_t delivered_bits = 0;
  std::int64_t delay_samples = 0;
  double mean_delay_s = std::numeric_limits<double>::quiet_NaN();
  // End-of-run snapshot.
  std::int64_t end_queue = 0;
  int end_stage = 0;
  // Whole run, for conservation checks.
  std::int64_t total_arrivals = 0;
  std::int64_t total_delivered = 0;
  std::int64_t total_drops = 0;
};

struct MetricsReport {
  double throughput_bps = 0.0;
  double mean_delay_s = std::numeric_limits<double>::quiet_NaN();  // NaN: no samples
  std::int64_t delay_samples = 0;
  double avg_end_queue = 0.0;
  double queue_empty_per_tx = 0.0;
  double avg_end_stage = 0.0;
  double collision_fraction = 0.0;
  std::int64_t drops = 0;
  std::int64_t transmissions = 0;
  double duration_s = 0.0;
  double offered_load_bps = 0.0;

  std::int64_t empty_slots = 0;
  std::int64_t success_slots = 0;
  std::int64_t collision_slots = 0;
  bool empty_run = false;         // no slot was counted
  bool no_transmissions = false;  // ratio denominators were zero

  std::vector<NodeReport> per_node;

  std::int64_t counted_slots() const { return empty_slots + success_slots + collision_slots; }
};

/// Per-run accumulator. The engine feeds it counted (post-warmup) slots
/// and every delivery; packets enqueued before the warmup boundary give no
/// delay sample.
class MetricsAccumulator {
 public:
  MetricsAccumulator(int n_nodes, TxDenominator denominator);

  /// Delay samples are taken only for packets enqueued at or after `t_us`.
  void open_window(double t_us);
  bool window_open() const { return window_open_; }

  void record_slot(SlotKind kind, double duration_us);
  void record_transmission(int node, TxOutcome outcome, bool queue_emptied);
  void record_drop(int node);
  /// Throws InternalFault when the ACK precedes an enqueue instant.
  void record_delivery(std::span<const Packet> batch, double ack_completion_us);

  MetricsReport finalize(std::span<const NodeState> nodes, double offered_load_bps) const;

  double duration_us() const { return duration_us_; }

 private:
  struct PerNode {
    std::int64_t transmissions = 0, successes = 0, collisions = 0, queue_empty_events = 0;
    std::int64_t drops = 0, delivered_bits = 0, delay_samples = 0;
    double delay_sum_us = 0.0;
  };

  TxDenominator denominator_;
  bool window_open_ = false;
  double window_start_us_ = std::numeric_limits<double>::infinity();
  std::int64_t slots_[3] = {0, 0, 0};
  double duration_us_ = 0.0;
  std::vector<PerNode> nodes_;
};

}  // namespace ecasim
