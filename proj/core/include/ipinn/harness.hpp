#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipinn/problems.hpp"
#include "ipinn/training.hpp"

namespace ipinn {

/// Everything persisted about one (problem, formulation, seed) cell.
struct RunReport {
  std::string problem;
  FormulationKind formulation = FormulationKind::Invariant;
  std::uint64_t seed = 0;
  TrainConfig config;
  std::string variable;  // network input: "t" or "H"

  std::vector<LossBreakdown> loss_history;
  LossBreakdown final_loss;

  std::vector<double> grid;   // evaluation grid in the input variable
  std::vector<double> times;  // reconstructed t at each grid point
  std::vector<double> sq_error;
  double mse = 0.0;
  double mse_excluded = 0.0;
  std::size_t n_excluded = 0;
  std::optional<std::pair<double, double>> excluded_window;

  double wall_time = 0.0;  // seconds

  bool failed = false;
  std::string failure;
  std::size_t failed_epoch = 0;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(std::string_view text);

RunReport read_report(const std::filesystem::path& path);

/// Subdirectory name of a cell, e.g. "logistic_invariant_seed0".
std::string cell_name(std::string_view problem, FormulationKind f, std::uint64_t seed);

/// Trains one cell and evaluates it on a 500-point grid. When `out_dir` is
/// given, writes report.json, weights.bin, error_series.csv and
/// error_series_plot.csv into out_dir/cell_name(...). A training abort
/// yields a report with failed = true (still persisted) instead of throwing.
/// Throws std::invalid_argument for an unknown problem before training.
RunReport run_cell(std::string_view problem, FormulationKind formulation, TrainConfig config,
                   const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct CellRequest {
  std::string problem;
  FormulationKind formulation = FormulationKind::Invariant;
  std::uint64_t seed = 0;
};

/// Runs cells on up to `jobs` worker threads; results are in request order.
std::vector<RunReport> run_cells(std::span<const CellRequest> cells, const TrainConfig& base,
                                 const std::optional<std::filesystem::path>& out_dir,
                                 std::size_t jobs = 1);

struct CellStats {
  std::string problem;
  FormulationKind formulation = FormulationKind::Invariant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mse;           // successful runs, in seed order
  std::vector<double> mse_excluded;
  std::size_t failed = 0;
  double mean = 0.0;
  double std = 0.0;                  // population standard deviation
  double mean_excluded = 0.0;
  double std_excluded = 0.0;
  double median = 0.0;
  double median_excluded = 0.0;
};

struct SummaryTable {
  std::vector<CellStats> cells;  // registry order, invariant before vanilla
  std::vector<std::string> missing;
};

double population_std(std::span<const double> xs);
double median(std::vector<double> xs);

SummaryTable summarize(std::span<const RunReport> reports,
                       std::span<const std::pair<std::string, FormulationKind>> requested = {});

/// Loads every report.json below `report_dir`. Throws std::runtime_error when
/// none is found.
SummaryTable summarize(const std::filesystem::path& report_dir,
                       std::span<const std::pair<std::string, FormulationKind>> requested = {});

void write_summary_csv(const SummaryTable& table, const std::filesystem::path& path);

/// Two-column CSV (input variable, squared error) with one header line.
/// With `cap`, values are clipped to *cap (the plot variant).
void emit_error_series(const RunReport& report, const std::filesystem::path& path,
                       std::optional<double> cap = std::nullopt);

inline constexpr double kPlotCap = 1e6;

/// Formats with 17 significant digits (round-trips through strtod).
std::string format_double(double v);

}  // namespace ipinn
