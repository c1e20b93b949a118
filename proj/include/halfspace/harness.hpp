#ifndef HALFSPACE_HARNESS_HPP
#define HALFSPACE_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfspace/config.hpp"

namespace halfspace {

/// One (sweep point, seed, mode) unit of work.
struct Cell {
  std::size_t index = 0;
  std::size_t sweep_point = 0;
  std::uint64_t trial_seed = 0;
  std::uint64_t cell_seed = 0;  // derive_seed(master, trial_seed)
  RunMode mode = RunMode::active;
  double epsilon = 0.0;
  std::size_t d = 0;
  std::size_t s = 0;
  double nu = 0.0;
};

/// Base point only, or the full sweep grid (each empty axis keeps the base value).
/// Order: sweep point, then seed, then mode.
std::vector<Cell> expand_cells(const RunConfig& cfg, bool sweep);

// One CSV row. `phase` is the phase index, or -1 for the final row.
struct ResultRow {
  int phase = 0;
  double angle = 0.0;
  double disagreement = 0.0;
  std::uint64_t labels = 0;
  std::uint64_t ex_calls = 0;
  double err = 0.0;
  double err_stderr = 0.0;
  std::size_t nnz = 0;
  double ledger_slack = 0.0;
  bool ledger_applicable = false;
  std::size_t hinge_violations = 0;
  std::size_t updates = 0;
  double wall_ms = 0.0;
};

struct CellResult {
  Cell cell;
  int phases = 0;  // K
  std::vector<ResultRow> rows;  // phase rows then the final row; final row only on error
  std::string error;
  std::uint64_t oracle_labels = 0;  // counter value after the run
  std::uint64_t oracle_ex_calls = 0;
  std::vector<double> u_tilde;
  std::vector<double> u;

  bool ok() const { return error.empty(); }
  const ResultRow& final_row() const { return rows.back(); }
};

/// Runs one cell end to end. Errors are captured in `error`, never thrown.
CellResult run_cell(const RunConfig& cfg, const Cell& cell);

/// Runs every cell on a pool of `workers` threads; results are in cell order.
std::vector<CellResult> run_cells(const RunConfig& cfg, const std::vector<Cell>& cells,
                                  std::size_t workers);

/// Column order of results.csv.
const std::vector<std::string>& csv_columns();

void write_csv(std::ostream& out, const RunConfig& cfg, const std::vector<CellResult>& results,
               bool include_wall_clock = true);

nlohmann::json summary_json(const RunConfig& cfg, const std::vector<CellResult>& results);

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> master_seed;
};

enum class Command { run, sweep, baseline };

/// Loads the config, runs the cells, writes results.csv and summary.json.
/// Returns 0 on success, 1 if any cell failed, 2 if the config is invalid.
int cli_execute(Command cmd, const CliOptions& opts, std::ostream& log);

/// Runs the diagnostic suites of the config and prints one line per suite.
/// Returns 0 if all pass, 1 on any failure, 2 if the config is invalid.
int cli_diag(const CliOptions& opts, std::ostream& log);

}  // namespace halfspace

#endif  // HALFSPACE_HARNESS_HPP
