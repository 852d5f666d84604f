#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ecasim/results_csv.hpp"

namespace ecasim {

class FigureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plot data for figure 1..7 built from the `mean` rows of a results table:
/// column `n`, then one column per protocol series (figure 1 also carries
/// the offered-load reference line). Values are copied verbatim from the CSV.
///
///   1 throughput, 2 delay, 3 delay (log-scale), 4 end-of-run queue size,
///   5 collision-slot fraction, 6 queue-empty events per transmission,
///   7 end-of-run backoff stage
///
/// Throws FigureError on an empty table or a missing (protocol, n) cell.
std::string figure_data(const CsvTable& results, int figure);

/// Writes figure_data to `out_dir/figN.dat` and returns the path. No file
/// is created on error.
std::filesystem::path emit_figure_data(const CsvTable& results, int figure, const std::filesystem::path& out_dir);

}  // namespace ecasim
