#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipinn/network.hpp"
#include "ipinn/problems.hpp"

namespace ipinn {

struct TrainConfig {
  std::size_t epochs = 3000;
  double learning_rate = 1e-3;
  double alpha_ic = 1.0;
  std::size_t n_collocation = 200;
  /// Overrides the formulation's interval when set.
  std::optional<std::pair<double, double>> interval;
  std::uint64_t seed = 0;
  FormulationKind formulation = FormulationKind::Invariant;
  /// Divide the equation loss by the number of collocation points.
  bool mean_reduction = false;
  std::size_t hidden_layers = 5;
  std::size_t hidden_width = 40;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct LossBreakdown {
  double equation_loss = 0.0;
  double ic_loss = 0.0;
  double total = 0.0;
};

/// Thrown by train() when the loss stops being finite or a residual leaves
/// its domain.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& what, std::size_t epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Sorted collocation points: lo, n - 2 uniform interior samples, hi.
std::vector<double> sample_collocation(double lo, double hi, std::size_t n, std::uint64_t seed);

/// Output jets of some model as a function of the input variable.
using JetField = std::function<std::vector<Jet3>(double x)>;

/// Loss of a formulation for arbitrary output jets; used to inject exact
/// solutions and as the reference route for the graph-based gradient.
/// Throws DomainError naming the offending point.
LossBreakdown evaluate_loss(const Formulation& f, std::span<const double> points,
                            const JetField& field, double alpha_ic,
                            bool mean_reduction = false);

/// Jet field of a parameter set (single-point forward pass).
JetField network_field(const ParamSet& params);

LossBreakdown vanilla_loss(const ParamSet& params, const ProblemSpec& problem,
                           std::span<const double> points, double alpha_ic,
                           bool mean_reduction = false);

LossBreakdown invariant_loss(const ParamSet& params, const ProblemSpec& problem,
                             std::span<const double> points, double alpha_ic,
                             bool mean_reduction = false);

struct LossGradient {
  LossBreakdown loss;
  std::vector<double> gradient;
};

/// Batched forward pass, loss recorded on an AdjointGraph, jet adjoints
/// propagated back through the network. The initial conditions are read at
/// f.lo.
LossGradient loss_and_gradient(const ParamSet& params, const Formulation& f,
                               std::span<const double> points, double alpha_ic,
                               bool mean_reduction = false);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double lr);

/// Reconstructed solution against the reference on a uniform grid of the
/// formulation's input variable.
struct Evaluation {
  std::vector<double> grid;      // network input (t or H)
  std::vector<double> times;     // reconstructed t
  std::vector<std::vector<double>> predicted;
  std::vector<std::vector<double>> reference;
  std::vector<double> sq_error;  // summed over solution components
  double mse = 0.0;
  /// Mean over points outside the problem's excluded window (equals mse
  /// when the problem has none).
  double mse_excluded = 0.0;
  std::size_t n_excluded = 0;
};

/// Window of t removed from Evaluation::mse_excluded: (pi/2 - 0.05, pi/2 + 0.05)
/// for "schwarz", none otherwise.
std::optional<std::pair<double, double>> excluded_window(const ProblemSpec& problem);

Evaluation evaluate(const ProblemSpec& problem, FormulationKind kind, const ParamSet& params,
                    std::size_t n_grid = 500);

struct TrainOutcome {
  ParamSet params;
  std::vector<LossBreakdown> history;  // loss before each update
  std::vector<double> collocation;
  LossBreakdown final_loss;
  Evaluation evaluation;
};

/// Full-batch Adam on fixed collocation points.
TrainOutcome train(const ProblemSpec& problem, const TrainConfig& config);

MlpLayout layout_for(const Formulation& f, const TrainConfig& config);

}  // namespace ipinn
