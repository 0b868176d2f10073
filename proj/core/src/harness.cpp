#include "ipinn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace ipinn {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json vector_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(number(x));
  return arr;
}

std::vector<double> vector_from(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(read_number(x));
  return v;
}

json config_json(const TrainConfig& c) {
  json j = {
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"alpha_ic", c.alpha_ic},
      {"n_collocation", c.n_collocation},
      {"seed", c.seed},
      {"formulation", to_string(c.formulation)},
      {"mean_reduction", c.mean_reduction},
      {"hidden_layers", c.hidden_layers},
      {"hidden_width", c.hidden_width},
      {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8}}},
      {"init", "glorot_uniform"},
  };
  j["interval"] = c.interval ? json::array({c.interval->first, c.interval->second}) : json(nullptr);
  return j;
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.alpha_ic = j.at("alpha_ic").get<double>();
  c.n_collocation = j.at("n_collocation").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.formulation = parse_formulation(j.at("formulation").get<std::string>());
  c.mean_reduction = j.value("mean_reduction", false);
  c.hidden_layers = j.value("hidden_layers", std::size_t{5});
  c.hidden_width = j.value("hidden_width", std::size_t{40});
  if (j.contains("interval") && !j.at("interval").is_null()) {
    c.interval = std::pair{j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>()};
  }
  return c;
}

json loss_json(const LossBreakdown& l) {
  return json::array({number(l.equation_loss), number(l.ic_loss), number(l.total)});
}

LossBreakdown loss_from(const json& j) {
  return {read_number(j.at(0)), read_number(j.at(1)), read_number(j.at(2))};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_to_json(const TrainConfig& config) { return config_json(config).dump(2); }

TrainConfig config_from_json(std::string_view text) { return config_from(json::parse(text)); }

std::string report_to_json(const RunReport& r) {
  json j;
  j["problem"] = r.problem;
  j["formulation"] = to_string(r.formulation);
  j["seed"] = r.seed;
  j["config"] = config_json(r.config);
  j["variable"] = r.variable;
  json hist = json::array();
  for (const auto& l : r.loss_history) hist.push_back(loss_json(l));
  j["loss_history"] = std::move(hist);
  j["loss_history_columns"] = json::array({"equation_loss", "ic_loss", "total"});
  j["final_loss"] = loss_json(r.final_loss);
  j["grid"] = vector_json(r.grid);
  j["times"] = vector_json(r.times);
  j["sq_error"] = vector_json(r.sq_error);
  j["mse"] = number(r.mse);
  j["mse_excluded"] = number(r.mse_excluded);
  j["n_excluded"] = r.n_excluded;
  j["excluded_window"] = r.excluded_window
                             ? json::array({r.excluded_window->first, r.excluded_window->second})
                             : json(nullptr);
  j["wall_time"] = r.wall_time;
  j["failed"] = r.failed;
  j["failure"] = r.failure;
  j["failed_epoch"] = r.failed_epoch;
  return j.dump();
}

RunReport report_from_json(std::string_view text) {
  const json j = json::parse(text);
  RunReport r;
  r.problem = j.at("problem").get<std::string>();
  r.formulation = parse_formulation(j.at("formulation").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = config_from(j.at("config"));
  r.variable = j.at("variable").get<std::string>();
  for (const auto& l : j.at("loss_history")) r.loss_history.push_back(loss_from(l));
  r.final_loss = loss_from(j.at("final_loss"));
  r.grid = vector_from(j.at("grid"));
  r.times = vector_from(j.at("times"));
  r.sq_error = vector_from(j.at("sq_error"));
  r.mse = read_number(j.at("mse"));
  r.mse_excluded = read_number(j.at("mse_excluded"));
  r.n_excluded = j.at("n_excluded").get<std::size_t>();
  if (!j.at("excluded_window").is_null()) {
    r.excluded_window = std::pair{j.at("excluded_window").at(0).get<double>(),
                                  j.at("excluded_window").at(1).get<double>()};
  }
  r.wall_time = j.at("wall_time").get<double>();
  r.failed = j.at("failed").get<bool>();
  r.failure = j.at("failure").get<std::string>();
  r.failed_epoch = j.at("failed_epoch").get<std::size_t>();
  return r;
}

RunReport read_report(const std::filesystem::path& path) {
  return report_from_json(read_text(path));
}

std::string cell_name(std::string_view problem, FormulationKind f, std::uint64_t seed) {
  return std::string(problem) + "_" + to_string(f) + "_seed" + std::to_string(seed);
}

void emit_error_series(const RunReport& report, const std::filesystem::path& path,
                       std::optional<double> cap) {
  if (report.grid.size() != report.sq_error.size()) {
    throw std::invalid_argument("emit_error_series: grid and error sizes differ");
  }
  std::string out = (report.variable.empty() ? std::string("t") : report.variable) +
                    ",squared_error\r\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    double e = report.sq_error[i];
    if (cap && !(e <= *cap)) e = *cap;
    out += format_double(report.grid[i]) + "," + format_double(e) + "\r\n";
  }
  write_text(path, out);
}

RunReport run_cell(std::string_view problem_name, FormulationKind formulation, TrainConfig config,
                   const std::optional<std::filesystem::path>& out_dir) {
  const ProblemSpec problem = get_problem(problem_name);
  config.formulation = formulation;
  config.validate();

  RunReport r;
  r.problem = problem.name;
  r.formulation = formulation;
  r.seed = config.seed;
  r.config = config;
  r.variable = problem.formulation(formulation).variable;
  r.excluded_window = excluded_window(problem);

  std::optional<ParamSet> params;
  const auto start = std::chrono::steady_clock::now();
  try {
    TrainOutcome outcome = train(problem, config);
    r.loss_history = std::move(outcome.history);
    r.final_loss = outcome.final_loss;
    const Evaluation& ev = outcome.evaluation;
    r.grid = ev.grid;
    r.times = ev.times;
    r.sq_error = ev.sq_error;
    r.mse = ev.mse;
    r.mse_excluded = ev.mse_excluded;
    r.n_excluded = ev.n_excluded;
    params = std::move(outcome.params);
  } catch (const TrainingAborted& e) {
    r.failed = true;
    r.failure = e.what();
    r.failed_epoch = e.epoch();
    r.mse = std::numeric_limits<double>::quiet_NaN();
    r.mse_excluded = r.mse;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (out_dir) {
    const auto dir = *out_dir / cell_name(r.problem, formulation, r.seed);
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report_to_json(r));
    if (params) write_snapshot(dir / "weights.bin", *params, r.seed);
    if (!r.failed) {
      emit_error_series(r, dir / "error_series.csv");
      emit_error_series(r, dir / "error_series_plot.csv", kPlotCap);
    }
  }
  return r;
}

std::vector<RunReport> run_cells(std::span<const CellRequest> cells, const TrainConfig& base,
                                 const std::optional<std::filesystem::path>& out_dir,
                                 std::size_t jobs) {
  for (const auto& c : cells) (void)get_problem(c.problem);
  std::vector<RunReport> reports(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      TrainConfig cfg = base;
      cfg.seed = cells[i].seed;
      reports[i] = run_cell(cells[i].problem, cells[i].formulation, cfg, out_dir);
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return reports;
}

double population_std(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::size_t registry_index(const std::string& name) {
  const auto& names = problem_names();
  const auto it = std::find(names.begin(), names.end(), name);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

SummaryTable summarize(std::span<const RunReport> reports,
                       std::span<const std::pair<std::string, FormulationKind>> requested) {
  using Key = std::pair<std::size_t, int>;  // registry index, invariant = 0
  std::map<Key, std::vector<const RunReport*>> groups;
  for (const RunReport& r : reports) {
    groups[{registry_index(r.problem), r.formulation == FormulationKind::Invariant ? 0 : 1}]
        .push_back(&r);
  }

  SummaryTable table;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const RunReport* a, const RunReport* b) { return a->seed < b->seed; });
    CellStats s;
    s.problem = group.front()->problem;
    s.formulation = group.front()->formulation;
    for (const RunReport* r : group) {
      s.seeds.push_back(r->seed);
      if (r->failed) {
        ++s.failed;
        continue;
      }
      s.mse.push_back(r->mse);
      s.mse_excluded.push_back(r->mse_excluded);
    }
    s.mean = mean_of(s.mse);
    s.std = population_std(s.mse);
    s.mean_excluded = mean_of(s.mse_excluded);
    s.std_excluded = population_std(s.mse_excluded);
    s.median = median(s.mse);
    s.median_excluded = median(s.mse_excluded);
    table.cells.push_back(std::move(s));
  }
  for (const auto& [name, f] : requested) {
    const bool found = std::any_of(table.cells.begin(), table.cells.end(), [&](const CellStats& s) {
      return s.problem == name && s.formulation == f;
    });
    if (!found) table.missing.push_back(name + "/" + to_string(f));
  }
  return table;
}

SummaryTable summarize(const std::filesystem::path& report_dir,
                       std::span<const std::pair<std::string, FormulationKind>> requested) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(report_dir)) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(report_dir)) {
      if (e.is_regular_file() && e.path().filename() == "report.json") files.push_back(e.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("summarize: found 0 reports under " + report_dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunReport> reports;
  reports.reserve(files.size());
  for (const auto& f : files) reports.push_back(read_report(f));
  return summarize(reports, requested);
}

void write_summary_csv(const SummaryTable& table, const std::filesystem::path& path) {
  std::string out =
      "problem,formulation,runs,failed,mse_mean,mse_std,mse_median,"
      "mse_excluded_mean,mse_excluded_std,mse_excluded_median,seeds\r\n";
  for (const CellStats& s : table.cells) {
    std::string seeds;
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
      seeds += (i ? " " : "") + std::to_string(s.seeds[i]);
    }
    out += s.problem + "," + to_string(s.formulation) + "," + std::to_string(s.seeds.size()) + "," +
           std::to_string(s.failed) + "," + format_double(s.mean) + "," + format_double(s.std) +
           "," + format_double(s.median) + "," + format_double(s.mean_excluded) + "," +
           format_double(s.std_excluded) + "," + format_double(s.median_excluded) + ",\"" +
           seeds + "\"\r\n";
  }
  for (const std::string& m : table.missing) {
    const auto slash = m.find('/');
    out += m.substr(0, slash) + "," + m.substr(slash + 1) + ",0,0,,,,,,,\"\"\r\n";
  }
  write_text(path, out);
}

}  // namespace ipinn
