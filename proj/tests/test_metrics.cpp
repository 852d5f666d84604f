#include <doctest.h>

#include <cmath>

#include "ecasim/engine.hpp"
#include "ecasim/metrics.hpp"

using namespace ecasim;

namespace {

std::vector<NodeState> nodes_with_queues(std::initializer_list<std::size_t> lengths) {
  std::vector<NodeState> out;
  int id = 0;
  for (std::size_t len : lengths) {
    NodeState n;
    n.id = id++;
    n.queue = PacketQueue(16);
    for (std::size_t i = 0; i < len; ++i) n.queue.push({n.id, 0.0, 12000});
    n.counters.arrivals = static_cast<std::int64_t>(len);
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

TEST_CASE("collision fraction is collisions over all counted slots") {
  MetricsAccumulator acc(1, TxDenominator::Attempts);
  for (int i = 0; i < 7; ++i) acc.record_slot(SlotKind::Empty, 9.0);
  for (int i = 0; i < 2; ++i) acc.record_slot(SlotKind::Success, 300.0);
  acc.record_slot(SlotKind::Collision, 300.0);
  const MetricsReport r = acc.finalize({}, 0.0);
  CHECK(r.collision_fraction == doctest::Approx(0.1));
  CHECK(r.duration_s == doctest::Approx(963e-6));
  CHECK_FALSE(r.empty_run);
}

TEST_CASE("all-success and empty runs") {
  MetricsAccumulator ok(1, TxDenominator::Attempts);
  for (int i = 0; i < 5; ++i) ok.record_slot(SlotKind::Success, 300.0);
  CHECK(ok.finalize({}, 0.0).collision_fraction == 0.0);

  const MetricsReport empty = MetricsAccumulator(2, TxDenominator::Attempts).finalize({}, 0.0);
  CHECK(empty.empty_run);
  CHECK(empty.collision_fraction == 0.0);
  CHECK(empty.no_transmissions);
  CHECK(empty.queue_empty_per_tx == 0.0);
  CHECK(empty.throughput_bps == 0.0);
}

TEST_CASE("delivery delay runs from enqueue to ACK completion") {
  MetricsAccumulator acc(1, TxDenominator::Attempts);
  acc.open_window(0.0);
  const std::vector<Packet> one{{0, 1000.0, 12000}};
  acc.record_delivery(one, 1500.0);
  auto r = acc.finalize({}, 0.0);
  CHECK(r.delay_samples == 1);
  CHECK(r.mean_delay_s == doctest::Approx(500e-6));

  // Aggregated packets share the ACK instant: samples 900, 800, 700 us.
  const std::vector<Packet> batch{{0, 100.0, 12000}, {0, 200.0, 12000}, {0, 300.0, 12000}};
  MetricsAccumulator agg(1, TxDenominator::Attempts);
  agg.open_window(0.0);
  agg.record_delivery(batch, 1000.0);
  r = agg.finalize({}, 0.0);
  CHECK(r.delay_samples == 3);
  CHECK(r.mean_delay_s == doctest::Approx(800e-6));
}

TEST_CASE("packets enqueued during warmup give no delay sample") {
  MetricsAccumulator acc(1, TxDenominator::Attempts);
  const std::vector<Packet> early{{0, 50.0, 12000}};
  const std::vector<Packet> late{{0, 150.0, 12000}};
  acc.open_window(100.0);
  acc.record_delivery(early, 400.0);
  acc.record_delivery(late, 700.0);
  const auto r = acc.finalize({}, 0.0);
  CHECK(r.delay_samples == 1);
  CHECK(r.mean_delay_s == doctest::Approx(550e-6));
}

TEST_CASE("negative delay is an internal fault") {
  MetricsAccumulator acc(1, TxDenominator::Attempts);
  acc.open_window(0.0);
  const std::vector<Packet> p{{0, 2000.0, 12000}};
  CHECK_THROWS_AS(acc.record_delivery(p, 1000.0), InternalFault);
}

TEST_CASE("end-of-run snapshots and the queue-empty ratio") {
  MetricsAccumulator acc(2, TxDenominator::Attempts);
  auto nodes = nodes_with_queues({0, 4});
  nodes[0].backoff_stage = 1;
  nodes[1].backoff_stage = 2;
  const auto r = acc.finalize(nodes, 0.0);
  CHECK(r.avg_end_queue == doctest::Approx(2.0));
  CHECK(r.avg_end_stage == doctest::Approx(1.5));

  MetricsAccumulator ratio(1, TxDenominator::Attempts);
  for (int i = 0; i < 100; ++i) ratio.record_transmission(0, TxOutcome::Success, i < 12);
  CHECK(ratio.finalize({}, 0.0).queue_empty_per_tx == doctest::Approx(0.12));
}

TEST_CASE("queue-empty denominator: attempts or successes") {
  for (auto denom : {TxDenominator::Attempts, TxDenominator::Successes}) {
    MetricsAccumulator acc(1, denom);
    for (int i = 0; i < 10; ++i) acc.record_transmission(0, TxOutcome::Success, i < 2);
    for (int i = 0; i < 10; ++i) acc.record_transmission(0, TxOutcome::Collision, false);
    const double expected = denom == TxDenominator::Attempts ? 0.1 : 0.2;
    CHECK(acc.finalize({}, 0.0).queue_empty_per_tx == doctest::Approx(expected));
  }
}

TEST_CASE("saturated run never empties a queue") {
  SimConfig c;
  c.traffic = TrafficKind::Saturated;
  c.n_nodes = 10;
  c.sim_slots = 100'000;
  c.warmup_slots = 1'000;
  CHECK(run_simulation(c).queue_empty_per_tx == 0.0);
}

TEST_CASE("report invariants over a load sweep") {
  const TimingTable t;
  for (auto p : {Protocol::CsmaCa, Protocol::CsmaEca}) {
    for (int agg : {1, 8}) {
      for (int n : {1, 4, 16, 40}) {
        SimConfig c;
        c.protocol = p;
        c.n_nodes = n;
        c.arrival_rate = 150.0;
        c.max_aggregation = agg;
        c.queue_capacity = 64;
        c.sim_slots = 400'000;
        c.warmup_slots = 20'000;
        c.seed = static_cast<std::uint64_t>(n);
        CAPTURE(n);
        CAPTURE(agg);
        const MetricsReport r = run_simulation(c);

        std::int64_t bits = 0;
        for (const auto& node : r.per_node) bits += node.delivered_bits;
        CHECK(r.throughput_bps * r.duration_s == doctest::Approx(static_cast<double>(bits)));
        CHECK(r.collision_fraction >= 0.0);
        CHECK(r.collision_fraction <= 1.0);
        CHECK(r.queue_empty_per_tx >= 0.0);
        CHECK(r.queue_empty_per_tx <= 1.0);
        CHECK(r.avg_end_stage >= 0.0);
        CHECK(r.avg_end_stage <= c.max_stage);

        const std::int64_t max_bits = agg * t.payload_bits;
        const double ceiling = static_cast<double>(max_bits) / (exchange_duration(t, max_bits) * 1e-6);
        CHECK(r.throughput_bps <= ceiling);
        if (r.delay_samples > 0) CHECK(r.mean_delay_s >= exchange_duration(t, t.payload_bits) * 1e-6 / 2);
      }
    }
  }
}
