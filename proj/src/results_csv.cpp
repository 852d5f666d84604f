#include "ecasim/results_csv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace ecasim {

namespace {

std::vector<double> metric_values(const MetricsReport& r) {
  return {r.throughput_bps,
          r.mean_delay_s,
          r.avg_end_queue,
          r.queue_empty_per_tx,
          r.avg_end_stage,
          r.collision_fraction,
          static_cast<double>(r.drops),
          static_cast<double>(r.transmissions),
          r.duration_s,
          r.offered_load_bps};
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

}  // namespace

std::vector<std::string> metric_fields(const MetricsReport& r) {
  return {fmt_double(r.throughput_bps),
          fmt_double(r.mean_delay_s),
          fmt_double(r.avg_end_queue),
          fmt_double(r.queue_empty_per_tx),
          fmt_double(r.avg_end_stage),
          fmt_double(r.collision_fraction),
          fmt::format("{}", r.drops),
          fmt::format("{}", r.transmissions),
          fmt_double(r.duration_s),
          fmt_double(r.offered_load_bps)};
}

void SummaryStats::add(double x) {
  if (std::isnan(x)) return;
  merge(SummaryStats{1, x, 0.0});
}

void SummaryStats::merge(const SummaryStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(count + o.count);
  const double delta = o.mean - mean;
  // inf - inf: all samples share the infinite value
  const double shift = std::isfinite(delta) ? delta * static_cast<double>(o.count) / n : 0.0;
  const double m2_extra = std::isfinite(delta) ? delta * delta * static_cast<double>(count) *
                                                     static_cast<double>(o.count) / n
                                               : 0.0;
  mean += shift;
  m2 += o.m2 + m2_extra;
  count += o.count;
}

double SummaryStats::sample_stddev() const {
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(m2 / static_cast<double>(count - 1));
}

void write_csv(std::ostream& out, const SweepResults& results) {
  out << fmt::format("{}\n", fmt::join(kCsvColumns, ","));

  const auto& runs = results.runs;
  std::size_t i = 0;
  while (i < runs.size()) {
    // One (protocol, n) cell: consecutive runs sharing both keys.
    std::size_t j = i;
    std::vector<SummaryStats> stats;
    while (j < runs.size() && runs[j].protocol == runs[i].protocol && runs[j].n_nodes == runs[i].n_nodes) {
      const RunResult& r = runs[j];
      out << fmt::format("{},{},{},{}\n", r.protocol, r.n_nodes, r.seed, fmt::join(metric_fields(r.report), ","));
      const auto values = metric_values(r.report);
      stats.resize(values.size());
      for (std::size_t k = 0; k < values.size(); ++k) stats[k].add(values[k]);
      ++j;
    }
    const bool cell_complete = !results.failure || results.failure->protocol != runs[i].protocol ||
                               results.failure->n_nodes != runs[i].n_nodes;
    if (cell_complete) {
      std::vector<std::string> means, stddevs;
      for (const auto& s : stats) {
        means.push_back(fmt_double(s.count ? s.mean : std::numeric_limits<double>::quiet_NaN()));
        stddevs.push_back(fmt_double(s.sample_stddev()));
      }
      out << fmt::format("{},{},mean,{}\n", runs[i].protocol, runs[i].n_nodes, fmt::join(means, ","));
      out << fmt::format("{},{},stddev,{}\n", runs[i].protocol, runs[i].n_nodes, fmt::join(stddevs, ","));
    }
    i = j;
  }

  if (const auto& f = results.failure) {
    out << fmt::format("{},{},{},{},{}\n", f->protocol, f->n_nodes, f->seed, kFailedMarker, sanitize(f->message));
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      fields.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace ecasim
