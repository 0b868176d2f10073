// Command-line driver for the PINN benchmark: run cells, summarize reports,
// export error series.

#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipinn/harness.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range " + text + " is empty");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    seeds.push_back(std::stoull(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

void print_table(const ipinn::SummaryTable& table) {
  std::printf("%-12s %-10s %5s %6s %14s %14s %14s\n", "problem", "form", "runs", "failed",
              "mse_mean", "mse_std", "mse_excl_mean");
  for (const auto& s : table.cells) {
    std::printf("%-12s %-10s %5zu %6zu %14.4e %14.4e %14.4e\n", s.problem.c_str(),
                ipinn::to_string(s.formulation).c_str(), s.seeds.size(), s.failed, s.mean, s.std,
                s.mean_excluded);
  }
  for (const auto& m : table.missing) std::printf("missing: %s\n", m.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant and vanilla physics-informed networks for ODE benchmarks"};
  app.require_subcommand(1);

  std::string problem = "all";
  std::string formulation = "both";
  std::string seeds_text = "0..4";
  ipinn::TrainConfig config;
  std::string out_dir = "runs";
  std::size_t jobs = 1;

  auto* run = app.add_subcommand("run", "Train (problem x formulation x seed) cells");
  run->add_option("--problem", problem, "schwarz|logistic|oscillator|exponential|system|all")
      ->capture_default_str();
  run->add_option("--formulation", formulation, "invariant|vanilla|both")->capture_default_str();
  run->add_option("--seeds", seeds_text, "Range a..b or comma list")->capture_default_str();
  run->add_option("--epochs", config.epochs, "Training epochs")->capture_default_str();
  run->add_option("--collocation", config.n_collocation, "Collocation points")
      ->capture_default_str();
  run->add_option("--alpha", config.alpha_ic, "Initial-condition loss weight")
      ->capture_default_str();
  run->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
  run->add_flag("--mean-reduction", config.mean_reduction,
                "Average the equation loss over collocation points");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "Cells trained in parallel")->capture_default_str();

  std::string in_dir;
  std::string csv_path;
  auto* summarize = app.add_subcommand("summarize", "Aggregate report.json files");
  summarize->add_option("--in", in_dir, "Directory containing run cells")->required();
  summarize->add_option("--csv", csv_path, "Summary CSV to write")->required();

  std::string report_path;
  bool plot = false;
  auto* series = app.add_subcommand("series", "Export the squared-error series of one report");
  series->add_option("--report", report_path, "report.json")->required();
  series->add_option("--csv", csv_path, "CSV to write")->required();
  series->add_flag("--plot", plot, "Cap values at 1e6");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<std::string> problems;
      if (problem == "all") {
        problems = ipinn::problem_names();
      } else {
        (void)ipinn::get_problem(problem);
        problems = {problem};
      }
      std::vector<ipinn::FormulationKind> forms;
      if (formulation == "both") {
        forms = {ipinn::FormulationKind::Invariant, ipinn::FormulationKind::Vanilla};
      } else {
        forms = {ipinn::parse_formulation(formulation)};
      }
      std::vector<ipinn::CellRequest> cells;
      for (const auto& p : problems) {
        for (auto f : forms) {
          for (auto s : parse_seeds(seeds_text)) cells.push_back({p, f, s});
        }
      }
      const auto reports = ipinn::run_cells(cells, config, out_dir, jobs);
      for (const auto& r : reports) {
        if (r.failed) {
          std::printf("%-28s FAILED at epoch %zu: %s\n",
                      ipinn::cell_name(r.problem, r.formulation, r.seed).c_str(), r.failed_epoch,
                      r.failure.c_str());
        } else {
          std::printf("%-28s mse %.4e  mse_excl %.4e  loss %.4e  %.1fs\n",
                      ipinn::cell_name(r.problem, r.formulation, r.seed).c_str(), r.mse,
                      r.mse_excluded, r.final_loss.total, r.wall_time);
        }
      }
      print_table(ipinn::summarize(reports));
    } else if (*summarize) {
      const auto table = ipinn::summarize(std::filesystem::path(in_dir));
      ipinn::write_summary_csv(table, csv_path);
      print_table(table);
    } else if (*series) {
      const auto report = ipinn::read_report(report_path);
      ipinn::emit_error_series(report, csv_path,
                               plot ? std::optional<double>(ipinn::kPlotCap) : std::nullopt);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
