#include "ecasim/engine.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace ecasim {

SlotKind kind_of(const SlotOutcome& outcome) { return static_cast<SlotKind>(outcome.index()); }

double exchange_duration(const TimingTable& t, std::int64_t batch_bits) {
  return t.difs_us + t.phy_header_us + static_cast<double>(batch_bits) / t.data_rate_bits_per_us + t.sifs_us +
         t.phy_header_us + static_cast<double>(t.ack_bits) / t.ack_rate_bits_per_us;
}

double slot_duration(const SlotOutcome& outcome, const TimingTable& t, std::int64_t batch_bits) {
  if (std::holds_alternative<EmptySlot>(outcome)) return t.slot_empty_us;
  return exchange_duration(t, batch_bits);
}

SimState make_state(const SimConfig& config) {
  validate(config);
  SimState s{config,
             ProtocolParams::from(config),
             {},
             {},
             {},
             Rng(config.seed, 0),
             MetricsAccumulator(config.n_nodes, config.q_empty_denominator)};
  const ArrivalProcess process{config.traffic, config.arrival_rate};
  s.nodes.reserve(static_cast<std::size_t>(config.n_nodes));
  s.sources.reserve(static_cast<std::size_t>(config.n_nodes));
  for (int i = 0; i < config.n_nodes; ++i) {
    NodeState n;
    n.id = i;
    n.queue = PacketQueue(static_cast<std::size_t>(config.queue_capacity));
    s.nodes.push_back(std::move(n));
    s.sources.emplace_back(i, process, config.timing.payload_bits,
                           Rng(config.seed, static_cast<std::uint64_t>(i) + 1));
  }
  return s;
}

namespace {

bool counting(const SimState& s) { return s.clock.slot_index >= s.config.warmup_slots; }

void enqueue(SimState& s, NodeState& node, std::vector<Packet> packets) {
  for (const Packet& p : packets) {
    if (on_packet_arrival(node, p, s.params, s.backoff_rng) == ArrivalResult::Dropped && counting(s)) {
      s.metrics.record_drop(node.id);
    }
  }
}

// Work due at a slot boundary: open the metrics window and enqueue arrivals.
void begin_slot(SimState& s) {
  if (!s.metrics.window_open() && counting(s)) s.metrics.open_window(s.clock.now_us);
  const double now = s.clock.now_us;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    TrafficSource& src = s.sources[i];
    NodeState& node = s.nodes[i];
    const bool due = src.saturated() ? !node.queue.full() : src.next_arrival_us() <= now;
    if (due) enqueue(s, node, src.drain(now, node.queue.size(), node.queue.capacity()));
  }
}

std::size_t batch_size(const SimState& s, const NodeState& n) {
  return std::min(n.queue.size(), static_cast<std::size_t>(s.config.max_aggregation));
}

SlotOutcome contend(SimState& s) {
  std::vector<int> tx;
  for (const NodeState& n : s.nodes) {
    if (!n.active) continue;
    if (n.backoff_counter < 0) throw InternalFault(fmt::format("node {} has a negative backoff counter", n.id));
    if (n.backoff_counter == 0) tx.push_back(n.id);
  }

  const bool counted = counting(s);
  SlotOutcome outcome;
  std::int64_t bits = 0;
  if (tx.size() == 1) {
    bits = s.nodes[static_cast<std::size_t>(tx[0])].queue.head_bits(batch_size(s, s.nodes[static_cast<std::size_t>(tx[0])]));
    outcome = SuccessSlot{tx[0], {}};
  } else if (tx.size() >= 2) {
    for (int id : tx) {
      const NodeState& n = s.nodes[static_cast<std::size_t>(id)];
      bits = std::max(bits, n.queue.head_bits(batch_size(s, n)));
    }
    outcome = CollisionSlot{tx, bits};
  }

  const bool busy = !tx.empty();
  if (!busy || s.config.countdown == CountdownRule::EverySlot) {
    for (NodeState& n : s.nodes) {
      if (n.active && n.backoff_counter > 0) n.backoff_counter -= 1;
    }
  }

  const double dur = slot_duration(outcome, s.config.timing, bits);
  s.clock.now_us += dur;
  s.clock.slot_index += 1;
  if (counted) s.metrics.record_slot(kind_of(outcome), dur);

  const TxOutcome result = tx.size() == 1 ? TxOutcome::Success : TxOutcome::Collision;
  for (int id : tx) {
    NodeState& n = s.nodes[static_cast<std::size_t>(id)];
    TrafficSource& src = s.sources[static_cast<std::size_t>(id)];
    TransmissionEffect effect =
        after_transmission(n, result, batch_size(s, n), s.params, s.backoff_rng, src.saturated());
    if (counted) s.metrics.record_transmission(id, result, effect.left_contention);
    if (result == TxOutcome::Success) {
      s.metrics.record_delivery(effect.delivered, s.clock.now_us);
      std::get<SuccessSlot>(outcome).batch = std::move(effect.delivered);
    }
    if (src.saturated()) enqueue(s, n, src.drain(s.clock.now_us, n.queue.size(), n.queue.capacity()));
  }
  return outcome;
}

// Advances a run of consecutive empty slots that needs no per-slot node
// work. Stops at the first slot with a transmitter, a boundary with a due
// arrival, the warmup boundary or the end of the run. Returns slots advanced.
std::int64_t advance_idle(SimState& s) {
  int min_counter = std::numeric_limits<int>::max();
  for (const NodeState& n : s.nodes) {
    if (n.active) min_counter = std::min(min_counter, n.backoff_counter);
  }
  if (min_counter == 0) return 0;
  double next_arrival = std::numeric_limits<double>::infinity();
  for (const TrafficSource& src : s.sources) next_arrival = std::min(next_arrival, src.next_arrival_us());

  const double dur = s.config.timing.slot_empty_us;
  std::int64_t k = 0;
  while (true) {
    const bool counted = counting(s);
    s.clock.now_us += dur;
    s.clock.slot_index += 1;
    if (counted) s.metrics.record_slot(SlotKind::Empty, dur);
    ++k;
    if (k == min_counter || s.clock.now_us >= next_arrival || s.clock.slot_index == s.config.warmup_slots ||
        s.done()) {
      break;
    }
  }
  const int dec = static_cast<int>(k);
  for (NodeState& n : s.nodes) {
    if (n.active) n.backoff_counter -= dec;
  }
  return k;
}

}  // namespace

SlotOutcome advance_slot(SimState& s) {
  begin_slot(s);
  return contend(s);
}

MetricsReport finish(const SimState& s) {
  for (const NodeState& n : s.nodes) {
    const auto& c = n.counters;
    if (c.arrivals != c.delivered + c.drops + static_cast<std::int64_t>(n.queue.size())) {
      throw InternalFault(fmt::format("packet conservation violated at node {}: {} arrivals, {} delivered, "
                                      "{} dropped, {} queued",
                                      n.id, c.arrivals, c.delivered, c.drops, n.queue.size()));
    }
  }
  MetricsReport r = s.metrics.finalize(s.nodes, offered_load_bps(s.config));
  if (r.counted_slots() != s.config.sim_slots - s.config.warmup_slots) {
    throw InternalFault(fmt::format("slot conservation violated: {} counted slots, expected {}", r.counted_slots(),
                                    s.config.sim_slots - s.config.warmup_slots));
  }
  return r;
}

MetricsReport run_simulation(const SimConfig& config) {
  SimState s = make_state(config);
  while (!s.done()) {
    begin_slot(s);
    if (advance_idle(s) == 0) contend(s);
  }
  return finish(s);
}

}  // namespace ecasim
