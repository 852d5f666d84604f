#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecasim/engine.hpp"
#include "ecasim/figures.hpp"
#include "ecasim/results_csv.hpp"
#include "ecasim/sweep.hpp"

using namespace ecasim;

namespace {

SweepSpec parse(const std::string& text, std::vector<std::string> overrides = {}) {
  std::istringstream in(text);
  return parse_config(in, overrides);
}

std::string config_error(const std::string& text, std::vector<std::string> overrides = {}) {
  try {
    parse(text, std::move(overrides));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

std::string csv_of(const SweepResults& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

const char* kSmallSweep =
    "node_counts = 2,4,6\n"
    "protocol = CSMA-CA\n"
    "protocol = CSMA-ECA\n"
    "seeds = 1,2,3,4,5\n"
    "arrival_rate = 200\n"
    "sim_slots = 20000\n"
    "warmup_slots = 1000\n";

std::size_t count_rows(const std::string& csv, const std::string& needle) {
  std::size_t n = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) n += line.find(needle) != std::string::npos ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("minimal config takes defaults and echoes every resolved key") {
  const SweepSpec spec = parse("node_counts = 10\n");
  CHECK(spec.node_counts == std::vector<int>{10});
  CHECK(spec.seeds == std::vector<std::uint64_t>{1});
  REQUIRE(spec.protocols.size() == 2);
  CHECK(spec.protocols[0].label() == "CSMA-CA");
  CHECK(spec.protocols[1].label() == "CSMA-ECA");
  CHECK(spec.base.cw_min == 16);
  CHECK(spec.base.max_stage == 5);
  CHECK(spec.base.timing.slot_empty_us == 9.0);

  const std::string echo = format_config(spec);
  for (const char* key : {"protocol", "node_counts", "seeds", "output_dir", "traffic", "arrival_rate", "cw_min",
                          "max_stage", "queue_capacity", "max_aggregation", "sim_slots", "warmup_slots",
                          "slot_empty_us", "sifs_us", "difs_us", "phy_header_us", "data_rate_bits_per_us",
                          "ack_rate_bits_per_us", "ack_bits", "payload_bits", "countdown", "rejoin_window",
                          "q_empty_denominator"}) {
    CHECK_MESSAGE(echo.find(std::string(key) + " = ") != std::string::npos, key);
  }
  // The echo parses back to the same resolved values.
  CHECK(format_config(parse(echo)) == echo);
}

TEST_CASE("config errors name the key and line") {
  CHECK(config_error("node_counts = 10,5\n").find("line 1: node_counts: not strictly increasing") !=
        std::string::npos);
  CHECK(config_error("# comment\nnode_counts = 5\ncolour = red\n").find("line 3: colour: unknown key") !=
        std::string::npos);
  CHECK(config_error("node_counts = 5\ncw_min = abc\n").find("line 2: cw_min") != std::string::npos);
  CHECK(config_error("node_counts = 5\ncw_min = 24\n").find("line 2: cw_min") != std::string::npos);
  CHECK(config_error("node_counts = 5\nsim_slots = 10\nwarmup_slots = 10\n").find("line 3: warmup_slots") !=
        std::string::npos);
  CHECK(config_error("arrival_rate = 5\n").find("node_counts") != std::string::npos);
  CHECK(config_error("node_counts = 5\nprotocol = CSMA-CA+hysteresis\n").find("hysteresis") != std::string::npos);
  CHECK(config_error("node_counts = 5\n", {"bogus=1"}).find("override bogus: unknown key") != std::string::npos);
  CHECK(config_error("node_counts = 5\nthis line has no equals\n").find("line 2") != std::string::npos);
}

TEST_CASE("overrides take precedence over file values") {
  const SweepSpec spec = parse("node_counts = 5\nseed = 3\ncw_min = 32\n", {"seed=7", "cw_min=8"});
  CHECK(spec.seeds == std::vector<std::uint64_t>{7});
  CHECK(spec.base.cw_min == 8);
}

TEST_CASE("repeated list keys accumulate") {
  const SweepSpec spec =
      parse("node_counts = 5\nnode_counts = 10, 20\nprotocol = CSMA-ECA+hysteresis\nprotocol = CSMA-CA+agg=64\n");
  CHECK(spec.node_counts == std::vector<int>{5, 10, 20});
  REQUIRE(spec.protocols.size() == 2);
  CHECK(spec.protocols[0].hysteresis);
  CHECK(spec.protocols[1].max_aggregation == 64);
  CHECK(spec.protocols[1].label() == "CSMA-CA+agg=64");
  CHECK(ProtocolVariant::parse(spec.protocols[0].label()) == spec.protocols[0]);
}

TEST_CASE("sweep produces one row per run and mean/stddev rows per cell") {
  SweepSpec spec = parse(
      "node_counts = 2,4,6\nprotocol = CSMA-CA\nprotocol = CSMA-ECA\nseeds = 1,2,3,4,5\n"
      "arrival_rate = 200\nsim_slots = 20000\nwarmup_slots = 1000\n");
  const SweepResults results = run_sweep(spec, run_simulation, 1);
  CHECK(results.runs.size() == 30);
  CHECK_FALSE(results.failure);
  const std::string csv = csv_of(results);
  CHECK(count_rows(csv, ",mean,") == 6);
  CHECK(count_rows(csv, ",stddev,") == 6);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "protocol,n_nodes,seed,throughput_bps,mean_delay_s,avg_end_queue,q_empty_per_tx,avg_end_stage,"
        "collision_fraction,drops,transmissions,duration_s,offered_load_bps");
  const CsvTable table = [&] {
    std::istringstream in(csv);
    return read_csv(in);
  }();
  CHECK(table.rows.size() == 42);
}

TEST_CASE("sweep output is deterministic and independent of the worker count") {
  const SweepSpec spec = parse(kSmallSweep);
  const std::string sequential = csv_of(run_sweep(spec, run_simulation, 1));
  CHECK(sequential == csv_of(run_sweep(spec, run_simulation, 1)));
  CHECK(sequential == csv_of(run_sweep(spec, run_simulation, 4)));
}

TEST_CASE("offered-load column doubles with the node count") {
  const SweepSpec spec = parse("node_counts = 3,6\nprotocol = CSMA-CA\narrival_rate = 50\nsim_slots = 5000\n"
                               "warmup_slots = 10\n");
  const auto results = run_sweep(spec, run_simulation, 1);
  REQUIRE(results.runs.size() == 2);
  CHECK(results.runs[1].report.offered_load_bps == 2 * results.runs[0].report.offered_load_bps);
  std::istringstream in(csv_of(results));
  const CsvTable t = read_csv(in);
  std::vector<double> means;
  for (const auto& row : t.rows) {
    if (row[2] == "mean") means.push_back(std::stod(row.back()));
  }
  REQUIRE(means.size() == 2);
  CHECK(means[1] == 2 * means[0]);
}

TEST_CASE("a faulting run aborts the sweep and leaves a failure marker") {
  const SweepSpec spec = parse(kSmallSweep);
  const RunFunction faulty = [](const SimConfig& c) {
    if (c.protocol == Protocol::CsmaEca && c.n_nodes == 4 && c.seed == 2) throw InternalFault("negative delay");
    return run_simulation(c);
  };
  for (unsigned workers : {1u, 3u}) {
    const SweepResults results = run_sweep(spec, faulty, workers);
    REQUIRE(results.failure);
    CHECK(results.failure->protocol == "CSMA-ECA");
    CHECK(results.failure->n_nodes == 4);
    CHECK(results.failure->seed == 2);
    // CA: 15 runs, ECA n=2: 5 runs, ECA n=4: seed 1.
    CHECK(results.runs.size() == 21);
    const std::string csv = csv_of(results);
    CHECK(count_rows(csv, ",mean,") == 4);
    CHECK(csv.find("CSMA-ECA,4,2,FAILED,negative delay") != std::string::npos);
  }
}

TEST_CASE("summary statistics merge associatively") {
  SummaryStats all, left, right;
  const std::vector<double> xs{1.0, 4.0, 2.5, 7.0, 3.0};
  for (double x : xs) all.add(x);
  for (std::size_t i = 0; i < xs.size(); ++i) (i < 2 ? left : right).add(xs[i]);
  left.merge(right);
  CHECK(left.count == all.count);
  CHECK(left.mean == doctest::Approx(3.5));
  CHECK(left.sample_stddev() == doctest::Approx(all.sample_stddev()));
  CHECK(all.sample_stddev() == doctest::Approx(2.2360679775));

  SummaryStats with_nan;
  with_nan.add(std::numeric_limits<double>::quiet_NaN());
  with_nan.add(2.0);
  CHECK(with_nan.count == 1);
  CHECK(std::isnan(with_nan.sample_stddev()));
}

TEST_CASE("figure data copies the mean rows verbatim") {
  const SweepSpec spec = parse(kSmallSweep);
  const std::string csv = csv_of(run_sweep(spec, run_simulation, 1));
  std::istringstream in(csv);
  const CsvTable table = read_csv(in);

  const std::string fig1 = figure_data(table, 1);
  CHECK(fig1.find("# n offered_load_bps CSMA-CA CSMA-ECA\n") != std::string::npos);
  const std::string fig5 = figure_data(table, 5);
  CHECK(fig5.find("collision") != std::string::npos);
  CHECK(figure_data(table, 3).find("log-y") != std::string::npos);

  // Every number in a figure row is a field of a mean row of the same n.
  for (int fig = 1; fig <= 7; ++fig) {
    std::istringstream lines(figure_data(table, fig));
    std::string line;
    int data_rows = 0;
    while (std::getline(lines, line)) {
      if (line.starts_with("#")) continue;
      ++data_rows;
      std::istringstream fields(line);
      std::string n, value;
      fields >> n;
      while (fields >> value) {
        bool found = false;
        for (const auto& row : table.rows) {
          if (row[1] == n && row[2] == "mean" && std::find(row.begin(), row.end(), value) != row.end()) found = true;
        }
        CHECK_MESSAGE(found, "figure " << fig << " value " << value);
      }
    }
    CHECK(data_rows == 3);
  }
}

TEST_CASE("figure emission errors") {
  CsvTable empty;
  empty.header.assign(kCsvColumns.begin(), kCsvColumns.end());
  const auto dir = std::filesystem::temp_directory_path() / "ecasim_fig_test";
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_figure_data(empty, 1, dir), FigureError);
  CHECK_FALSE(std::filesystem::exists(dir / "fig1.dat"));

  const SweepSpec spec = parse(kSmallSweep);
  std::istringstream in(csv_of(run_sweep(spec, run_simulation, 1)));
  CsvTable table = read_csv(in);
  // Drop the mean row of (CSMA-ECA, 4).
  std::erase_if(table.rows, [](const auto& row) { return row[0] == "CSMA-ECA" && row[1] == "4" && row[2] == "mean"; });
  try {
    figure_data(table, 2);
    FAIL("expected a missing-cell error");
  } catch (const FigureError& e) {
    CHECK(std::string(e.what()) == "missing cell protocol=CSMA-ECA n=4");
  }
  CHECK_THROWS_AS(figure_data(table, 8), FigureError);

  std::istringstream again(csv_of(run_sweep(spec, run_simulation, 1)));
  const auto path = emit_figure_data(read_csv(again), 4, dir);
  CHECK(std::filesystem::exists(path));
  std::filesystem::remove_all(dir);
}
