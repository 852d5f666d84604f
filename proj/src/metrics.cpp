#include "ecasim/metrics.hpp"

#include <fmt/format.h>

namespace ecasim {

MetricsAccumulator::MetricsAccumulator(int n_nodes, TxDenominator denominator)
    : denominator_(denominator), nodes_(static_cast<std::size_t>(n_nodes)) {}

void MetricsAccumulator::open_window(double t_us) {
  window_open_ = true;
  window_start_us_ = t_us;
}

void MetricsAccumulator::record_slot(SlotKind kind, double duration_us) {
  slots_[static_cast<int>(kind)] += 1;
  duration_us_ += duration_us;
}

void MetricsAccumulator::record_transmission(int node, TxOutcome outcome, bool queue_emptied) {
  auto& n = nodes_[static_cast<std::size_t>(node)];
  n.transmissions += 1;
  if (outcome == TxOutcome::Success) {
    n.successes += 1;
  } else {
    n.collisions += 1;
  }
  if (queue_emptied) n.queue_empty_events += 1;
}

void MetricsAccumulator::record_drop(int node) { nodes_[static_cast<std::size_t>(node)].drops += 1; }

void MetricsAccumulator::record_delivery(std::span<const Packet> batch, double ack_completion_us) {
  for (const Packet& p : batch) {
    if (ack_completion_us < p.enqueue_time_us) {
      throw InternalFault(fmt::format("negative delay: node {} packet enqueued at {} us, ACK at {} us",
                                      p.source, p.enqueue_time_us, ack_completion_us));
    }
    auto& n = nodes_[static_cast<std::size_t>(p.source)];
    if (window_open_) n.delivered_bits += p.payload_bits;
    if (p.enqueue_time_us >= window_start_us_) {
      n.delay_samples += 1;
      n.delay_sum_us += ack_completion_us - p.enqueue_time_us;
    }
  }
}

MetricsReport MetricsAccumulator::finalize(std::span<const NodeState> nodes, double offered_load_bps) const {
  MetricsReport r;
  r.empty_slots = slots_[0];
  r.success_slots = slots_[1];
  r.collision_slots = slots_[2];
  r.duration_s = duration_us_ * 1e-6;
  r.offered_load_bps = offered_load_bps;
  r.empty_run = r.counted_slots() == 0;
  r.collision_fraction =
      r.empty_run ? 0.0 : static_cast<double>(r.collision_slots) / static_cast<double>(r.counted_slots());

  std::int64_t delivered_bits = 0, q_empty = 0, successes = 0;
  double delay_sum_us = 0.0;
  double queue_sum = 0.0, stage_sum = 0.0;
  r.per_node.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const PerNode& acc = nodes_[i];
    NodeReport& out = r.per_node[i];
    out.transmissions = acc.transmissions;
    out.successes = acc.successes;
    out.collisions = acc.collisions;
    out.queue_empty_events = acc.queue_empty_events;
    out.drops = acc.drops;
    out.delivered_bits = acc.delivered_bits;
    out.delay_samples = acc.delay_samples;
    if (acc.delay_samples > 0) out.mean_delay_s = acc.delay_sum_us / static_cast<double>(acc.delay_samples) * 1e-6;
    if (i < nodes.size()) {
      out.end_queue = static_cast<std::int64_t>(nodes[i].queue.size());
      out.end_stage = nodes[i].backoff_stage;
      out.total_arrivals = nodes[i].counters.arrivals;
      out.total_delivered = nodes[i].counters.delivered;
      out.total_drops = nodes[i].counters.drops;
    }

    delivered_bits += acc.delivered_bits;
    q_empty += acc.queue_empty_events;
    successes += acc.successes;
    r.transmissions += acc.transmissions;
    r.drops += acc.drops;
    r.delay_samples += acc.delay_samples;
    delay_sum_us += acc.delay_sum_us;
    queue_sum += static_cast<double>(out.end_queue);
    stage_sum += out.end_stage;
  }

  if (!nodes_.empty()) {
    r.avg_end_queue = queue_sum / static_cast<double>(nodes_.size());
    r.avg_end_stage = stage_sum / static_cast<double>(nodes_.size());
  }
  if (r.delay_samples > 0) r.mean_delay_s = delay_sum_us / static_cast<double>(r.delay_samples) * 1e-6;
  if (r.duration_s > 0.0) r.throughput_bps = static_cast<double>(delivered_bits) / r.duration_s;

  const std::int64_t denom = denominator_ == TxDenominator::Attempts ? r.transmissions : successes;
  r.no_transmissions = denom == 0;
  r.queue_empty_per_tx = r.no_transmissions ? 0.0 : static_cast<double>(q_empty) / static_cast<double>(denom);
  return r;
}

}  // namespace ecasim
