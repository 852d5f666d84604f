#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/rng.hpp"
#include "ecasim/traffic.hpp"

namespace ecasim {

/// Bounded FIFO MAC queue.
class PacketQueue {
 public:
  explicit PacketQueue(std::size_t capacity = 0) : capacity_(capacity) {}

  bool push(const Packet& p);  // false when full
  std::vector<Packet> pop_front(std::size_t n);
  const Packet& front() const { return items_.front(); }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }

  /// Payload bits of the first min(size, n) packets.
  std::int64_t head_bits(std::size_t n) const;

 private:
  std::size_t capacity_;
  std::deque<Packet> items_;
};

// Whole-run counters of one node.
struct NodeCounters {
  std::int64_t arrivals = 0;
  std::int64_t drops = 0;
  std::int64_t delivered = 0;
  std::int64_t transmissions = 0;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t queue_empty_events = 0;
};

struct NodeState {
  int id = 0;
  bool active = false;  // in contention
  int backoff_counter = 0;
  int backoff_stage = 0;
  PacketQueue queue;
  NodeCounters counters;
};

struct ProtocolParams {
  Protocol protocol = Protocol::CsmaCa;
  bool hysteresis = false;
  int cw_min = 16;
  int max_stage = 5;
  RejoinWindow rejoin_window = RejoinWindow::Exclusive;

  static ProtocolParams from(const SimConfig& c);
};

struct Backoff {
  int stage = 0;
  int counter = 0;
  friend bool operator==(const Backoff&, const Backoff&) = default;
};

/// ceil(cw / 2) - 1: the fixed post-success backoff of CSMA/ECA.
constexpr int deterministic_backoff(int cw) { return (cw + 1) / 2 - 1; }

Backoff next_backoff_after_success(const ProtocolParams& p, int stage, Rng& rng);
Backoff next_backoff_after_collision(int stage, int max_stage, int cw_min, Rng& rng);

/// Counter drawn when an idle node rejoins contention.
int rejoin_backoff(const ProtocolParams& p, Rng& rng);

enum class TxOutcome { Success, Collision };

struct TransmissionEffect {
  std::vector<Packet> delivered;  // empty on collision
  bool left_contention = false;
};

/// Applies the result of a transmission attempt of `batch_size` packets.
/// `backlogged` marks a source that refills the queue immediately
/// (saturated traffic), so the node never leaves contention.
TransmissionEffect after_transmission(NodeState& node, TxOutcome outcome, std::size_t batch_size,
                                      const ProtocolParams& p, Rng& rng, bool backlogged = false);

enum class ArrivalResult { Queued, Dropped };

/// Enqueues `pkt`; an inactive node rejoins contention with a random counter.
ArrivalResult on_packet_arrival(NodeState& node, const Packet& pkt, const ProtocolParams& p, Rng& rng);

}  // namespace ecasim
