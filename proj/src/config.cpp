#include "ecasim/config.hpp"

#include <bit>
#include <cmath>

namespace ecasim {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::CsmaCa:
      return "CSMA-CA";
    case Protocol::CsmaEca:
      return "CSMA-ECA";
  }
  return "?";
}

namespace {

void require(bool ok, const char* invariant) {
  if (!ok) throw ConfigError(invariant);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const TimingTable& t) {
  require(positive(t.slot_empty_us), "slot_empty_us > 0");
  require(positive(t.sifs_us), "sifs_us > 0");
  require(positive(t.difs_us), "difs_us > 0");
  require(positive(t.phy_header_us), "phy_header_us > 0");
  require(positive(t.data_rate_bits_per_us), "data_rate_bits_per_us > 0");
  require(positive(t.ack_rate_bits_per_us), "ack_rate_bits_per_us > 0");
  require(t.ack_bits > 0, "ack_bits > 0");
  require(t.payload_bits > 0, "payload_bits > 0");
  require(t.difs_us > t.sifs_us, "difs_us > sifs_us");
}

void validate(const SimConfig& c) {
  validate(c.timing);
  require(c.n_nodes >= 1, "n_nodes >= 1");
  require(c.cw_min >= 2 && std::has_single_bit(static_cast<unsigned>(c.cw_min)),
          "cw_min >= 2 and a power of two");
  require(c.max_stage >= 0, "max_stage >= 0");
  // CW(max_stage) must fit in an int.
  require(c.max_stage < 30 && (static_cast<long long>(c.cw_min) << c.max_stage) < (1LL << 30),
          "cw_min * 2^max_stage < 2^30");
  require(std::isfinite(c.arrival_rate) && c.arrival_rate >= 0.0, "arrival_rate >= 0");
  require(c.max_aggregation >= 1, "max_aggregation >= 1");
  require(c.queue_capacity >= c.max_aggregation, "queue_capacity >= max_aggregation");
  require(c.warmup_slots >= 0, "warmup_slots >= 0");
  require(c.warmup_slots < c.sim_slots, "warmup_slots < sim_slots");
  require(c.protocol == Protocol::CsmaEca || !c.hysteresis, "hysteresis requires CSMA-ECA");
}

}  // namespace ecasim
