#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/metrics.hpp"

namespace ecasim {

/// One protocol curve of a sweep, e.g. "CSMA-ECA+hysteresis" or
/// "CSMA-CA+agg=64".
struct ProtocolVariant {
  Protocol protocol = Protocol::CsmaCa;
  bool hysteresis = false;
  std::optional<int> max_aggregation;

  std::string label() const;
  static ProtocolVariant parse(std::string_view text);
  SimConfig apply(SimConfig base) const;

  friend bool operator==(const ProtocolVariant&, const ProtocolVariant&) = default;
};

struct SweepSpec {
  SimConfig base;
  std::vector<int> node_counts;
  std::vector<ProtocolVariant> protocols;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "results";

  SimConfig run_config(const ProtocolVariant& v, int n_nodes, std::uint64_t seed) const;
};

/// Configuration error tied to a key and the line that set it
/// (line 0 for command-line overrides).
class ConfigKeyError : public ConfigError {
 public:
  ConfigKeyError(std::string key, int line, const std::string& what);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Parses flat `key = value` text. List keys (protocol, node_counts, seeds)
/// accumulate over repeated lines; each `key=value` override replaces the
/// file's value. Unset keys keep their defaults; node_counts is required.
SweepSpec parse_config(std::istream& in, std::span<const std::string> overrides = {});
SweepSpec parse_config_file(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Every resolved key, one `key = value` per line, in parse_config syntax.
std::string format_config(const SweepSpec& spec);

struct RunResult {
  std::string protocol;
  int n_nodes = 0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct SweepFailure {
  std::string protocol;
  int n_nodes = 0;
  std::uint64_t seed = 0;
  std::string message;
};

/// Runs in (protocol, n, seed) key order. On failure `runs` holds every run
/// that precedes the failed one.
struct SweepResults {
  std::vector<RunResult> runs;
  std::optional<SweepFailure> failure;
};

using RunFunction = std::function<MetricsReport(const SimConfig&)>;

/// Worker-pool size: ECASIM_WORKERS when set, else hardware concurrency.
unsigned default_workers();

/// Executes |protocols| * |node_counts| * |seeds| independent runs on up to
/// `workers` threads. Output does not depend on the worker count.
SweepResults run_sweep(const SweepSpec& spec, const RunFunction& run, unsigned workers);
SweepResults run_sweep(const SweepSpec& spec);

}  // namespace ecasim
