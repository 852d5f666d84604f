// ecasim: run contention sweeps and emit plot data.
//
//   ecasim run --config sweep.conf [--override key=value ...] [--key=value ...]
//   ecasim figures --results results/results.csv --fig 1 --out plots
//   ecasim validate --config sweep.conf
//
// Exit codes: 0 success, 1 configuration error, 2 internal-consistency fault.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecasim/engine.hpp"
#include "ecasim/figures.hpp"
#include "ecasim/results_csv.hpp"
#include "ecasim/sweep.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kInternalFault = 2;

// "--key=value" extras become overrides.
std::vector<std::string> extras_to_overrides(const std::vector<std::string>& extras) {
  std::vector<std::string> out;
  for (const auto& e : extras) {
    if (!e.starts_with("--") || e.find('=') == std::string::npos) {
      throw ecasim::ConfigError(fmt::format("unexpected argument '{}'", e));
    }
    out.push_back(e.substr(2));
  }
  return out;
}

int cmd_run(const std::string& config, std::vector<std::string> overrides, const std::vector<std::string>& extras) {
  for (auto& o : extras_to_overrides(extras)) overrides.push_back(std::move(o));
  const ecasim::SweepSpec spec = ecasim::parse_config_file(config, overrides);

  std::filesystem::create_directories(spec.output_dir);
  {
    std::ofstream echo(spec.output_dir / "resolved.conf");
    echo << ecasim::format_config(spec);
  }

  const unsigned workers = ecasim::default_workers();
  std::cerr << fmt::format("running {} simulations on {} worker(s)\n",
                           spec.protocols.size() * spec.node_counts.size() * spec.seeds.size(), workers);
  const auto results = ecasim::run_sweep(spec, ecasim::run_simulation, workers);

  const auto csv_path = spec.output_dir / "results.csv";
  {
    std::ofstream csv(csv_path);
    ecasim::write_csv(csv, results);
  }
  if (results.failure) {
    const auto& f = *results.failure;
    std::cerr << fmt::format("run protocol={} n={} seed={} failed: {}\n", f.protocol, f.n_nodes, f.seed, f.message);
    std::cerr << fmt::format("partial results in {}\n", csv_path.string());
    return kInternalFault;
  }
  std::cerr << fmt::format("wrote {}\n", csv_path.string());
  return 0;
}

int cmd_figures(const std::string& results_path, int figure, const std::string& out_dir) {
  std::ifstream in(results_path);
  if (!in) throw ecasim::ConfigError(fmt::format("cannot open results file '{}'", results_path));
  const auto table = ecasim::read_csv(in);
  const auto path = ecasim::emit_figure_data(table, figure, out_dir);
  std::cerr << fmt::format("wrote {}\n", path.string());
  return 0;
}

int cmd_validate(const std::string& config) {
  const auto spec = ecasim::parse_config_file(config);
  std::cout << ecasim::format_config(spec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"802.11 CSMA/CA and CSMA/ECA contention simulator"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run a sweep and write results.csv to output_dir");
  run->add_option("--config", config, "sweep configuration file")->required();
  run->add_option("--override", overrides, "key=value, replaces the file value")->take_all();
  run->allow_extras();

  std::string results_path, out_dir;
  int figure = 0;
  auto* figs = app.add_subcommand("figures", "emit plot data for one figure");
  figs->add_option("--results", results_path, "results CSV")->required();
  figs->add_option("--fig", figure, "figure number")->required()->check(CLI::Range(1, 7));
  figs->add_option("--out", out_dir, "output directory")->required();

  auto* val = app.add_subcommand("validate", "check a configuration and print it fully resolved");
  val->add_option("--config", config, "sweep configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, overrides, run->remaining());
    if (*figs) return cmd_figures(results_path, figure, out_dir);
    if (*val) return cmd_validate(config);
  } catch (const ecasim::InternalFault& e) {
    std::cerr << "internal fault: " << e.what() << "\n";
    return kInternalFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
