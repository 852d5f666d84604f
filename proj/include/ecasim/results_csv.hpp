#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ecasim/metrics.hpp"
#include "ecasim/sweep.hpp"

namespace ecasim {

inline constexpr std::array<std::string_view, 13> kCsvColumns = {
    "protocol",          "n_nodes",       "seed",         "throughput_bps", "mean_delay_s",
    "avg_end_queue",     "q_empty_per_tx", "avg_end_stage", "collision_fraction", "drops",
    "transmissions",     "duration_s",    "offered_load_bps"};

/// Index of the first metric column (after protocol, n_nodes, seed).
inline constexpr std::size_t kFirstMetricColumn = 3;

/// Marker in the fourth column of the row that records an aborted run.
inline constexpr std::string_view kFailedMarker = "FAILED";

/// Metric columns of one report, formatted as written to the CSV.
std::vector<std::string> metric_fields(const MetricsReport& r);

/// Sample mean and standard deviation over seeds. NaN values (e.g. a
/// delay with no samples) are skipped.
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  /// Combines two disjoint sample sets.
  void merge(const SummaryStats& other);
  double sample_stddev() const;
};

/// Header, one row per run, and after each (protocol, n) cell its `mean`
/// and `stddev` rows. An aborted sweep ends with a failure marker row.
void write_csv(std::ostream& out, const SweepResults& results);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& in);

}  // namespace ecasim
