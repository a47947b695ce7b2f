#pragma once

// Seeded experiment runner over (law, coupling, cost, a, t) cells, string
// tables for CSV/JSON output, and plot-data series for external plotting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coupled_levy/baselines.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/measures.hpp"
#include "coupled_levy/stats.hpp"

namespace coupled_levy {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  /// Array of objects; cells that parse as numbers are emitted as numbers.
  std::string to_json() const;
  std::string render(const std::string& format) const;  // "csv" or "json"
};

/// Reads a CSV document with a header line; quoted fields are supported.
Table parse_csv(const std::string& text);

struct NamedLaw {
  std::string name;
  Distribution1D law;
};

/// Each cell simulates X from 0 and Y from a over [0, t] with jump intensity
/// `rate`; all costs of a cell are evaluated on the same paths.
struct ExperimentConfig {
  std::vector<NamedLaw> distributions;
  std::vector<CouplingKind> couplings;
  std::vector<ConcaveCost> costs;
  std::vector<double> separations;
  std::vector<double> horizons;
  double rate = 1.0;
  std::size_t replicas = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path output;  // empty: standard output
  std::string format = "csv";
};

/// Config document:
///   {"distributions": [law | {"name", "law"} | "file.json"], "couplings": [..],
///    "costs": [cost | "file.json"], "separations": [..], "horizons": [..],
///    "rate", "replicas", "seed", "output", "format"}
/// Relative file names resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentRow {
  std::string distribution;
  CouplingKind coupling = CouplingKind::amr;
  std::string cost_form;
  double a = 0.0;
  double t = 0.0;
  Estimate estimate;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;  // per cell, shared by its cost rows
};

/// Validates every cell first (PreconditionError before any simulation), then
/// runs cells in order. Cell k uses streams (seed, k, replica).
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

/// Deterministic results: no timing columns.
Table results_table(const std::vector<ExperimentRow>& rows);
/// Wall time per row, kept apart so result files stay byte-identical.
Table timing_table(const std::vector<ExperimentRow>& rows);

/// Runs the experiment and writes results (and `<output>.timing.csv` when an
/// output path is set). Returns the process exit code: 0 success, 2 config
/// error, 3 precondition failure; messages go to stderr.
int run(const ExperimentConfig& config);

/// JSON {"kind", "series": [{"name", "points": [[x, y, y_err], ...]}]}.
///   cost_vs_t:      results table; x = t, one series per (law, coupling, cost, a)
///   survival_vs_tv: columns t, survival, std_error, tv; series survival and tv
///   f_alpha:        columns gamma, alpha, f; one series per gamma
/// Unknown kinds and missing columns throw ConfigError.
std::string emit_plot_data(const Table& results, const std::string& kind);

/// f(alpha) on an alpha grid over (0, 2] for each gamma, as a gamma, alpha, f,
/// preferred table.
Table f_alpha_table(const std::vector<double>& gammas, std::size_t alpha_points);

}  // namespace coupled_levy
