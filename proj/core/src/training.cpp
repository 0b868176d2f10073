#include "ipinn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ipinn/adjoint.hpp"

namespace ipinn {

void TrainConfig::validate() const {
  if (epochs > 0 && !(learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  }
  if (!(alpha_ic >= 0.0)) throw std::invalid_argument("TrainConfig: alpha_ic must be >= 0");
  if (n_collocation < 2) throw std::invalid_argument("TrainConfig: n_collocation must be >= 2");
  if (interval && !(interval->first < interval->second)) {
    throw std::invalid_argument("TrainConfig: interval must satisfy lo < hi");
  }
  if (hidden_layers == 0 || hidden_width == 0) {
    throw std::invalid_argument("TrainConfig: empty hidden layers");
  }
}

std::vector<double> sample_collocation(double lo, double hi, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_collocation: n must be >= 2");
  if (!(lo < hi)) throw std::invalid_argument("sample_collocation: lo must be < hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> pts;
  pts.reserve(n);
  pts.push_back(lo);
  while (pts.size() < n - 1) {
    const double x = dist(rng);
    if (x > lo && x < hi) pts.push_back(x);
  }
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(hi);
  return pts;
}

namespace {

std::string point_message(const Formulation& f, double x, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "residual at collocation point " << f.variable << " = " << x << ": " << what;
  return os.str();
}

double ic_value(const std::vector<Jet3>& at_lo, const IcTerm& term) {
  return at_lo.at(term.output)[term.order];
}

}  // namespace

LossBreakdown evaluate_loss(const Formulation& f, std::span<const double> points,
                            const JetField& field, double alpha_ic, bool mean_reduction) {
  LossBreakdown out;
  for (double x : points) {
    try {
      const auto outputs = field(x);
      for (const Jet3& r : f.residual.on_jets(x, outputs)) out.equation_loss += r[0] * r[0];
    } catch (const DomainError& e) {
      throw DomainError(point_message(f, x, e.what()));
    }
  }
  if (mean_reduction && !points.empty()) out.equation_loss /= static_cast<double>(points.size());
  const auto at_lo = field(f.lo);
  for (const IcTerm& term : f.ic) {
    const double d = ic_value(at_lo, term) - term.value;
    out.ic_loss += d * d;
  }
  out.total = out.equation_loss + alpha_ic * out.ic_loss;
  return out;
}

JetField network_field(const ParamSet& params) {
  return [&params](double x) { return mlp_forward(params, Jet3::variable(x)); };
}

LossBreakdown vanilla_loss(const ParamSet& params, const ProblemSpec& problem,
                           std::span<const double> points, double alpha_ic, bool mean_reduction) {
  return evaluate_loss(problem.vanilla, points, network_field(params), alpha_ic, mean_reduction);
}

LossBreakdown invariant_loss(const ParamSet& params, const ProblemSpec& problem,
                             std::span<const double> points, double alpha_ic,
                             bool mean_reduction) {
  return evaluate_loss(problem.invariant, points, network_field(params), alpha_ic,
                       mean_reduction);
}

LossGradient loss_and_gradient(const ParamSet& params, const Formulation& f,
                               std::span<const double> points, double alpha_ic,
                               bool mean_reduction) {
  const std::size_t n_pts = points.size();
  const std::size_t n_cols = n_pts + 1;  // last column is the initial point
  const std::size_t n_out = f.output_dim();
  if (params.layout().output_dim != n_out) {
    throw std::invalid_argument("loss_and_gradient: network output_dim does not match formulation");
  }

  std::vector<double> xs(points.begin(), points.end());
  xs.push_back(f.lo);
  const MlpBatch batch(params, xs, f.max_order);

  AdjointGraph graph;
  graph.reserve(n_cols * n_out * 16);
  std::vector<Var> leaves;
  leaves.reserve(n_cols * n_out);
  for (std::size_t p = 0; p < n_cols; ++p) {
    for (std::size_t o = 0; o < n_out; ++o) leaves.push_back(graph.leaf(batch.output(p, o)));
  }

  Var eq = graph.constant(0.0);
  for (std::size_t p = 0; p < n_pts; ++p) {
    std::span<const Var> outs(leaves.data() + p * n_out, n_out);
    try {
      for (const Var& r : f.residual.on_graph(points[p], outs)) eq = eq + sq(r);
    } catch (const DomainError& e) {
      throw DomainError(point_message(f, points[p], e.what()));
    }
  }
  if (mean_reduction && n_pts > 0) eq = eq * (1.0 / static_cast<double>(n_pts));

  Var ic = graph.constant(0.0);
  const std::size_t ic_base = n_pts * n_out;
  for (const IcTerm& term : f.ic) {
    ic = ic + sq(coef(leaves[ic_base + term.output], term.order) - term.value);
  }
  const Var total = eq + alpha_ic * ic;

  LossGradient out;
  out.loss.equation_loss = eq.value()[0];
  out.loss.ic_loss = ic.value()[0];
  out.loss.total = out.loss.equation_loss + alpha_ic * out.loss.ic_loss;

  const auto adj = graph.backward(total);
  const auto n = static_cast<Eigen::Index>(n_cols);
  Eigen::MatrixXd seed(static_cast<Eigen::Index>(n_out), (f.max_order + 1) * n);
  for (std::size_t p = 0; p < n_cols; ++p) {
    for (std::size_t o = 0; o < n_out; ++o) {
      const Jet3& a = adj[leaves[p * n_out + o].id];
      for (int k = 0; k <= f.max_order; ++k) {
        seed(static_cast<Eigen::Index>(o), k * n + static_cast<Eigen::Index>(p)) =
            a[static_cast<std::size_t>(k)];
      }
    }
  }
  out.gradient.assign(params.size(), 0.0);
  batch.backward(seed, out.gradient);
  return out;
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double lr) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: dimension mismatch");
  }
  ++state.step;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

std::optional<std::pair<double, double>> excluded_window(const ProblemSpec& problem) {
  if (problem.name == "schwarz") {
    constexpr double half = std::numbers::pi / 2.0;
    return std::pair{half - 0.05, half + 0.05};
  }
  return std::nullopt;
}

Evaluation evaluate(const ProblemSpec& problem, FormulationKind kind, const ParamSet& params,
                    std::size_t n_grid) {
  if (n_grid < 2) throw std::invalid_argument("evaluate: need at least 2 grid points");
  const Formulation& f = problem.formulation(kind);
  Evaluation ev;
  ev.grid.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    ev.grid[i] = f.lo + (f.hi - f.lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
  }
  ev.grid.back() = f.hi;

  const MlpBatch batch(params, ev.grid, 0);
  const auto window = excluded_window(problem);
  double sum = 0.0;
  double sum_kept = 0.0;
  std::size_t kept = 0;
  std::vector<double> values(f.output_dim());
  for (std::size_t i = 0; i < n_grid; ++i) {
    for (std::size_t o = 0; o < values.size(); ++o) values[o] = batch.output(i, o)[0];
    Reconstruction rec = f.reconstruct(ev.grid[i], values);
    std::vector<double> ref = problem.exact(rec.t);
    double err = 0.0;
    for (std::size_t c = 0; c < ref.size(); ++c) {
      const double d = rec.u[c] - ref[c];
      err += d * d;
    }
    ev.times.push_back(rec.t);
    ev.predicted.push_back(std::move(rec.u));
    ev.reference.push_back(std::move(ref));
    ev.sq_error.push_back(err);
    sum += err;
    const double t = ev.times.back();
    if (window && t > window->first && t < window->second) {
      ++ev.n_excluded;
    } else {
      sum_kept += err;
      ++kept;
    }
  }
  ev.mse = sum / static_cast<double>(n_grid);
  ev.mse_excluded = kept > 0 ? sum_kept / static_cast<double>(kept) : ev.mse;
  return ev;
}

MlpLayout layout_for(const Formulation& f, const TrainConfig& config) {
  return MlpLayout{1, config.hidden_layers, config.hidden_width, f.output_dim()};
}

TrainOutcome train(const ProblemSpec& problem, const TrainConfig& config) {
  config.validate();
  Formulation f = problem.formulation(config.formulation);
  if (config.interval) {
    f.lo = config.interval->first;
    f.hi = config.interval->second;
  }

  TrainOutcome out;
  out.params = init_mlp(layout_for(f, config), config.seed);
  out.collocation = sample_collocation(f.lo, f.hi, config.n_collocation, config.seed);
  out.history.reserve(config.epochs);

  AdamState adam(out.params.size());
  auto step_loss = [&](std::size_t epoch) {
    try {
      LossGradient lg =
          loss_and_gradient(out.params, f, out.collocation, config.alpha_ic, config.mean_reduction);
      if (!std::isfinite(lg.loss.total)) {
        std::string where = "loss is not finite";
        // locate the first point whose residual is not finite
        const JetField field = network_field(out.params);
        for (double x : out.collocation) {
          bool finite = true;
          for (const Jet3& r : f.residual.on_jets(x, field(x))) finite = finite && std::isfinite(r[0]);
          if (!finite) {
            std::ostringstream os;
            os.precision(17);
            os << "loss is not finite; first non-finite residual at " << f.variable << " = " << x;
            where = os.str();
            break;
          }
        }
        throw TrainingAborted(where + " (epoch " + std::to_string(epoch) + ")", epoch);
      }
      return lg;
    } catch (const DomainError& e) {
      throw TrainingAborted(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")", epoch);
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const LossGradient lg = step_loss(epoch);
    out.history.push_back(lg.loss);
    adam_step(out.params.flat(), lg.gradient, adam, config.learning_rate);
  }
  out.final_loss = step_loss(config.epochs).loss;

  out.evaluation = evaluate(problem, config.formulation, out.params);
  return out;
}

}  // namespace ipinn
