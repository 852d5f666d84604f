#include "ecasim/protocols.hpp"

#include <algorithm>
#include <cassert>

namespace ecasim {

bool PacketQueue::push(const Packet& p) {
  if (full()) return false;
  items_.push_back(p);
  return true;
}

std::vector<Packet> PacketQueue::pop_front(std::size_t n) {
  n = std::min(n, items_.size());
  std::vector<Packet> out(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(n));
  items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::int64_t PacketQueue::head_bits(std::size_t n) const {
  n = std::min(n, items_.size());
  std::int64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) bits += items_[i].payload_bits;
  return bits;
}

ProtocolParams ProtocolParams::from(const SimConfig& c) {
  return {c.protocol, c.hysteresis, c.cw_min, c.max_stage, c.rejoin_window};
}

Backoff next_backoff_after_success(const ProtocolParams& p, int stage, Rng& rng) {
  assert(stage >= 0 && stage <= p.max_stage);
  if (p.protocol == Protocol::CsmaCa) return {0, rng.uniform_int(0, p.cw_min - 1)};
  if (p.hysteresis) return {stage, deterministic_backoff(contention_window(p.cw_min, stage))};
  return {0, deterministic_backoff(p.cw_min)};
}

Backoff next_backoff_after_collision(int stage, int max_stage, int cw_min, Rng& rng) {
  assert(stage >= 0 && stage <= max_stage);
  const int next = std::min(stage + 1, max_stage);
  return {next, rng.uniform_int(0, contention_window(cw_min, next) - 1)};
}

int rejoin_backoff(const ProtocolParams& p, Rng& rng) {
  const int hi = p.rejoin_window == RejoinWindow::Inclusive ? p.cw_min : p.cw_min - 1;
  return rng.uniform_int(0, hi);
}

TransmissionEffect after_transmission(NodeState& node, TxOutcome outcome, std::size_t batch_size,
                                      const ProtocolParams& p, Rng& rng, bool backlogged) {
  assert(node.active && batch_size >= 1 && batch_size <= node.queue.size());
  TransmissionEffect effect;
  node.counters.transmissions += 1;

  if (outcome == TxOutcome::Collision) {
    // The batch stays at the head of the queue for retransmission.
    node.counters.collisions += 1;
    const Backoff b = next_backoff_after_collision(node.backoff_stage, p.max_stage, p.cw_min, rng);
    node.backoff_stage = b.stage;
    node.backoff_counter = b.counter;
    return effect;
  }

  node.counters.successes += 1;
  effect.delivered = node.queue.pop_front(batch_size);
  node.counters.delivered += static_cast<std::int64_t>(effect.delivered.size());

  if (node.queue.empty() && !backlogged) {
    node.active = false;
    node.counters.queue_empty_events += 1;
    effect.left_contention = true;
    // The stage is reset now unless hysteresis keeps it for the rejoin.
    if (p.protocol == Protocol::CsmaCa || !p.hysteresis) node.backoff_stage = 0;
    node.backoff_counter = 0;
    return effect;
  }

  const Backoff b = next_backoff_after_success(p, node.backoff_stage, rng);
  node.backoff_stage = b.stage;
  node.backoff_counter = b.counter;
  return effect;
}

ArrivalResult on_packet_arrival(NodeState& node, const Packet& pkt, const ProtocolParams& p, Rng& rng) {
  node.counters.arrivals += 1;
  if (!node.queue.push(pkt)) {
    node.counters.drops += 1;
    return ArrivalResult::Dropped;
  }
  if (!node.active) {
    node.active = true;
    if (p.protocol == Protocol::CsmaCa || !p.hysteresis) node.backoff_stage = 0;
    node.backoff_counter = rejoin_backoff(p, rng);
  }
  return ArrivalResult::Queued;
}

}  // namespace ecasim
