#include "ecasim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "ecasim/engine.hpp"

namespace ecasim {

// ---------------------------------------------------------------------------
// Protocol variants

std::string ProtocolVariant::label() const {
  std::string s(to_string(protocol));
  if (hysteresis) s += "+hysteresis";
  if (max_aggregation) s += fmt::format("+agg={}", *max_aggregation);
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("'{}' is not a valid number", text));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

ProtocolVariant ProtocolVariant::parse(std::string_view text) {
  const auto parts = split(text, '+');
  ProtocolVariant v;
  if (parts[0] == "CSMA-CA") {
    v.protocol = Protocol::CsmaCa;
  } else if (parts[0] == "CSMA-ECA") {
    v.protocol = Protocol::CsmaEca;
  } else {
    throw ConfigError(fmt::format("unknown protocol '{}' (expected CSMA-CA or CSMA-ECA)", parts[0]));
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view opt = parts[i];
    if (opt == "hysteresis") {
      if (v.protocol != Protocol::CsmaEca) throw ConfigError("hysteresis requires CSMA-ECA");
      v.hysteresis = true;
    } else if (opt.starts_with("agg=")) {
      v.max_aggregation = parse_number<int>(opt.substr(4));
      if (*v.max_aggregation < 1) throw ConfigError("agg must be >= 1");
    } else {
      throw ConfigError(fmt::format("unknown protocol option '{}'", opt));
    }
  }
  return v;
}

SimConfig ProtocolVariant::apply(SimConfig base) const {
  base.protocol = protocol;
  base.hysteresis = hysteresis;
  if (max_aggregation) base.max_aggregation = *max_aggregation;
  return base;
}

SimConfig SweepSpec::run_config(const ProtocolVariant& v, int n_nodes, std::uint64_t seed) const {
  SimConfig c = v.apply(base);
  c.n_nodes = n_nodes;
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------
// Config file

ConfigKeyError::ConfigKeyError(std::string key, int line, const std::string& what)
    : ConfigError(line > 0 ? fmt::format("line {}: {}: {}", line, key, what)
                           : fmt::format("override {}: {}", key, what)),
      key_(std::move(key)),
      line_(line) {}

namespace {

struct KeyDef {
  const char* name;
  bool list;
  std::function<void(SweepSpec&, std::string_view)> set;
  std::function<std::string(const SweepSpec&)> get;
};

template <typename T>
std::string num(T v) {
  return fmt::format("{}", v);
}

#define ECASIM_SCALAR(key, field, type)                                               \
  KeyDef {                                                                            \
    key, false, [](SweepSpec& s, std::string_view v) { s.field = parse_number<type>(v); }, \
        [](const SweepSpec& s) { return num(s.field); }                               \
  }

template <typename E>
E parse_enum(std::string_view v, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [name, e] : names) {
    if (v == name) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw ConfigError(fmt::format("'{}' is not one of {}", v, allowed));
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> keys = {
      {"protocol", true,
       [](SweepSpec& s, std::string_view v) {
         for (auto item : split(v, ',')) s.protocols.push_back(ProtocolVariant::parse(item));
       },
       [](const SweepSpec& s) {
         std::string out;
         for (const auto& p : s.protocols) out += (out.empty() ? "" : ",") + p.label();
         return out;
       }},
      {"node_counts", true,
       [](SweepSpec& s, std::string_view v) {
         for (auto item : split(v, ',')) {
           const int n = parse_number<int>(item);
           if (n < 1) throw ConfigError("node counts must be >= 1");
           if (!s.node_counts.empty() && n <= s.node_counts.back()) {
             throw ConfigError(fmt::format("not strictly increasing ({} after {})", n, s.node_counts.back()));
           }
           s.node_counts.push_back(n);
         }
       },
       [](const SweepSpec& s) { return fmt::format("{}", fmt::join(s.node_counts, ",")); }},
      {"seeds", true,
       [](SweepSpec& s, std::string_view v) {
         for (auto item : split(v, ',')) s.seeds.push_back(parse_number<std::uint64_t>(item));
       },
       [](const SweepSpec& s) { return fmt::format("{}", fmt::join(s.seeds, ",")); }},
      {"output_dir", false, [](SweepSpec& s, std::string_view v) { s.output_dir = std::string(v); },
       [](const SweepSpec& s) { return s.output_dir.string(); }},
      {"traffic", false,
       [](SweepSpec& s, std::string_view v) {
         s.base.traffic = parse_enum<TrafficKind>(v, {{"poisson", TrafficKind::Poisson},
                                                      {"saturated", TrafficKind::Saturated}});
       },
       [](const SweepSpec& s) {
         return std::string(s.base.traffic == TrafficKind::Poisson ? "poisson" : "saturated");
       }},
      ECASIM_SCALAR("arrival_rate", base.arrival_rate, double),
      ECASIM_SCALAR("cw_min", base.cw_min, int),
      ECASIM_SCALAR("max_stage", base.max_stage, int),
      ECASIM_SCALAR("queue_capacity", base.queue_capacity, int),
      ECASIM_SCALAR("max_aggregation", base.max_aggregation, int),
      ECASIM_SCALAR("sim_slots", base.sim_slots, std::int64_t),
      ECASIM_SCALAR("warmup_slots", base.warmup_slots, std::int64_t),
      ECASIM_SCALAR("slot_empty_us", base.timing.slot_empty_us, double),
      ECASIM_SCALAR("sifs_us", base.timing.sifs_us, double),
      ECASIM_SCALAR("difs_us", base.timing.difs_us, double),
      ECASIM_SCALAR("phy_header_us", base.timing.phy_header_us, double),
      ECASIM_SCALAR("data_rate_bits_per_us", base.timing.data_rate_bits_per_us, double),
      ECASIM_SCALAR("ack_rate_bits_per_us", base.timing.ack_rate_bits_per_us, double),
      ECASIM_SCALAR("ack_bits", base.timing.ack_bits, std::int64_t),
      ECASIM_SCALAR("payload_bits", base.timing.payload_bits, std::int64_t),
      {"countdown", false,
       [](SweepSpec& s, std::string_view v) {
         s.base.countdown = parse_enum<CountdownRule>(
             v, {{"every_slot", CountdownRule::EverySlot}, {"idle_only", CountdownRule::IdleOnly}});
       },
       [](const SweepSpec& s) {
         return std::string(s.base.countdown == CountdownRule::EverySlot ? "every_slot" : "idle_only");
       }},
      {"rejoin_window", false,
       [](SweepSpec& s, std::string_view v) {
         s.base.rejoin_window = parse_enum<RejoinWindow>(
             v, {{"exclusive", RejoinWindow::Exclusive}, {"inclusive", RejoinWindow::Inclusive}});
       },
       [](const SweepSpec& s) {
         return std::string(s.base.rejoin_window == RejoinWindow::Exclusive ? "exclusive" : "inclusive");
       }},
      {"q_empty_denominator", false,
       [](SweepSpec& s, std::string_view v) {
         s.base.q_empty_denominator = parse_enum<TxDenominator>(
             v, {{"attempts", TxDenominator::Attempts}, {"successes", TxDenominator::Successes}});
       },
       [](const SweepSpec& s) {
         return std::string(s.base.q_empty_denominator == TxDenominator::Attempts ? "attempts" : "successes");
       }},
  };
  return keys;
}

#undef ECASIM_SCALAR

const KeyDef* find_key(std::string_view name) {
  if (name == "seed") name = "seeds";
  for (const KeyDef& k : key_table()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

struct Entry {
  std::string value;
  int line;  // 0 for overrides
};

std::pair<std::string, std::string> split_assignment(std::string_view text, int line) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigKeyError(std::string(trim(text)), line, "expected key = value");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

}  // namespace

SweepSpec parse_config(std::istream& in, std::span<const std::string> overrides) {
  // key -> entries in application order
  std::map<std::string, std::vector<Entry>> entries;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto [key, value] = split_assignment(line, line_no);
    const KeyDef* def = find_key(key);
    if (def == nullptr) throw ConfigKeyError(key, line_no, "unknown key");
    auto& list = entries[def->name];
    if (!def->list) list.clear();
    list.push_back({value, line_no});
  }
  for (const std::string& o : overrides) {
    auto [key, value] = split_assignment(o, 0);
    const KeyDef* def = find_key(key);
    if (def == nullptr) throw ConfigKeyError(key, 0, "unknown key");
    entries[def->name] = {{value, 0}};
  }

  SweepSpec spec;
  for (const KeyDef& def : key_table()) {
    auto it = entries.find(def.name);
    if (it == entries.end()) continue;
    for (const Entry& e : it->second) {
      try {
        def.set(spec, e.value);
      } catch (const ConfigKeyError&) {
        throw;
      } catch (const ConfigError& err) {
        throw ConfigKeyError(def.name, e.line, err.what());
      }
    }
  }

  auto line_of = [&](const std::string& key) {
    auto it = entries.find(key);
    return it == entries.end() || it->second.empty() ? 0 : it->second.back().line;
  };

  if (spec.node_counts.empty()) throw ConfigKeyError("node_counts", line_of("node_counts"), "required, non-empty");
  if (spec.protocols.empty()) {
    spec.protocols = {ProtocolVariant{Protocol::CsmaCa, false, std::nullopt},
                      ProtocolVariant{Protocol::CsmaEca, false, std::nullopt}};
  }
  if (spec.seeds.empty()) spec.seeds = {1};

  for (const ProtocolVariant& v : spec.protocols) {
    try {
      validate(spec.run_config(v, spec.node_counts.front(), spec.seeds.front()));
    } catch (const ConfigError& err) {
      // Blame the first key the invariant mentions.
      const std::string what = err.what();
      std::string key = "protocol";
      std::size_t best = std::string::npos;
      for (const KeyDef& def : key_table()) {
        const auto pos = what.find(def.name);
        if (pos < best) {
          best = pos;
          key = def.name;
        }
      }
      throw ConfigKeyError(key, line_of(key), fmt::format("{} (protocol {})", what, v.label()));
    }
  }
  return spec;
}

SweepSpec parse_config_file(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  return parse_config(in, overrides);
}

std::string format_config(const SweepSpec& spec) {
  std::string out;
  for (const KeyDef& def : key_table()) out += fmt::format("{} = {}\n", def.name, def.get(spec));
  return out;
}

// ---------------------------------------------------------------------------
// Sweep execution

unsigned default_workers() {
  if (const char* env = std::getenv("ECASIM_WORKERS")) {
    unsigned n = 0;
    const std::string_view v(env);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec == std::errc{} && ptr == v.data() + v.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResults run_sweep(const SweepSpec& spec, const RunFunction& run, unsigned workers) {
  struct Job {
    const ProtocolVariant* variant;
    int n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& v : spec.protocols) {
    for (int n : spec.node_counts) {
      for (auto seed : spec.seeds) jobs.push_back({&v, n, seed});
    }
  }

  std::vector<std::optional<MetricsReport>> reports(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        reports[i] = run(spec.run_config(*job.variant, job.n, job.seed));
      } catch (const std::exception& e) {
        errors[i] = e.what();
        abort.store(true);
      }
    }
  };

  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Jobs are claimed in index order, so every job before the first failure
  // has completed.
  SweepResults out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    if (!reports[i]) {
      out.failure = SweepFailure{job.variant->label(), job.n, job.seed,
                                 errors[i].empty() ? std::string("run did not complete") : errors[i]};
      break;
    }
    out.runs.push_back({job.variant->label(), job.n, job.seed, std::move(*reports[i])});
  }
  return out;
}

SweepResults run_sweep(const SweepSpec& spec) { return run_sweep(spec, run_simulation, default_workers()); }

}  // namespace ecasim
