#include "ecasim/figures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

namespace ecasim {

namespace {

struct FigureSpec {
  const char* title;
  const char* column;
  bool log_y;
};

constexpr FigureSpec kFigures[] = {
    {"Throughput vs. stations (bits/s)", "throughput_bps", false},
    {"Mean delay (s)", "mean_delay_s", false},
    {"Mean delay, log y (s)", "mean_delay_s", true},
    {"End-of-run queue length per node (packets)", "avg_end_queue", false},
    {"Fraction of slots with a collision", "collision_fraction", false},
    {"Queue-empty events per transmission", "q_empty_per_tx", false},
    {"End-of-run backoff stage per node", "avg_end_stage", false},
};

std::size_t column_index(const CsvTable& t, std::string_view name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw FigureError(fmt::format("results have no '{}' column", name));
  return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

std::string figure_data(const CsvTable& results, int figure) {
  if (figure < 1 || figure > 7) throw FigureError(fmt::format("figure must be 1..7, got {}", figure));
  const FigureSpec& fig = kFigures[figure - 1];
  if (results.rows.empty()) throw FigureError("results are empty");

  const std::size_t proto_col = column_index(results, "protocol");
  const std::size_t n_col = column_index(results, "n_nodes");
  const std::size_t seed_col = column_index(results, "seed");
  const std::size_t value_col = column_index(results, fig.column);
  const std::size_t load_col = column_index(results, "offered_load_bps");

  std::vector<std::string> series;
  std::set<int> node_counts;
  std::map<std::pair<std::string, int>, const std::vector<std::string>*> cells;
  for (const auto& row : results.rows) {
    if (row.size() <= std::max({proto_col, n_col, seed_col})) continue;
    int n = 0;
    try {
      n = std::stoi(row[n_col]);
    } catch (const std::exception&) {
      throw FigureError(fmt::format("bad n_nodes value '{}'", row[n_col]));
    }
    if (std::find(series.begin(), series.end(), row[proto_col]) == series.end()) series.push_back(row[proto_col]);
    node_counts.insert(n);
    if (row[seed_col] == "mean" && row.size() == results.header.size()) cells[{row[proto_col], n}] = &row;
  }

  for (const auto& s : series) {
    for (int n : node_counts) {
      if (!cells.contains({s, n})) throw FigureError(fmt::format("missing cell protocol={} n={}", s, n));
    }
  }

  std::string out = fmt::format("# Figure {}: {}\n", figure, fig.title);
  if (fig.log_y) out += "# scale: log-y\n";
  out += "# n";
  if (figure == 1) out += " offered_load_bps";
  for (const auto& s : series) out += " " + s;
  out += "\n";
  for (int n : node_counts) {
    out += fmt::format("{}", n);
    if (figure == 1) out += " " + (*cells.at({series.front(), n}))[load_col];
    for (const auto& s : series) out += " " + (*cells.at({s, n}))[value_col];
    out += "\n";
  }
  return out;
}

std::filesystem::path emit_figure_data(const CsvTable& results, int figure, const std::filesystem::path& out_dir) {
  const std::string text = figure_data(results, figure);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / fmt::format("fig{}.dat", figure);
  std::ofstream out(path);
  if (!out) throw FigureError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  return path;
}

}  // namespace ecasim
