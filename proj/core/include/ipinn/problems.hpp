#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipinn/adjoint.hpp"
#include "ipinn/jet.hpp"
#include "ipinn/reference.hpp"

namespace ipinn {

// ---------------------------------------------------------------------------
// SL(2, R) acting on the dependent variable by Moebius transformations.

struct GroupElementSL2 {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 1.0;

  double det() const { return alpha * delta - beta * gamma; }
};

/// Throws std::invalid_argument unless |det - 1| < 1e-9.
GroupElementSL2 make_sl2(double alpha, double beta, double gamma, double delta);

GroupElementSL2 sl2_mul(const GroupElementSL2& a, const GroupElementSL2& b);
GroupElementSL2 sl2_inverse(const GroupElementSL2& g);

/// (alpha u + beta) / (gamma u + delta).
double sl2_act(const GroupElementSL2& g, double u);

/// A point of the third-order jet space: t and (u, u_t, u_tt, u_ttt).
struct Jet3Point {
  double t = 0.0;
  Jet3 u;
};

/// Prolonged action of g on (t, u, u_t, u_tt, u_ttt); t is unchanged.
/// Throws DomainError when gamma u + delta = 0.
Jet3Point sl2_prolong(const GroupElementSL2& g, const Jet3Point& z);

/// u_ttt/u_t - (3/2)(u_tt/u_t)^2. Throws DomainError when u_t = 0.
double schwarzian(const Jet3Point& z);

/// Right moving frame for the cross-section {u = 0, u_t = sign(u_t), u_tt = 0},
/// positive branch. Only u, u_t, u_tt of `z` are read.
/// Throws DomainError when u_t = 0.
GroupElementSL2 sl2_moving_frame(const Jet3Point& z);

/// Maurer-Cartan matrix of the Schwarz reconstruction equations,
/// row-major {{0, -sigma}, {sigma F / 2, 0}}; the left frame obeys
/// d(rho_bar)/dt = -rho_bar * nu.
std::array<double, 4> schwarz_maurer_cartan(double forcing, double sigma);

// ---------------------------------------------------------------------------
// Benchmark problems.

/// Residual of a formulation, evaluable either on plain jets (for checks and
/// oracle injection) or on an AdjointGraph (for training).
struct Residual {
  std::function<std::vector<Jet3>(double x, std::span<const Jet3> outputs)> on_jets;
  std::function<std::vector<Var>(double x, std::span<const Var> outputs)> on_graph;

  /// Wraps a generic callable `f(double x, std::span<const T> outputs) ->
  /// std::vector<T>` for T = Jet3 and T = Var.
  template <class F>
  static Residual from(F f) {
    return Residual{
        [f](double x, std::span<const Jet3> o) { return f(x, o); },
        [f](double x, std::span<const Var> o) { return f(x, o); },
    };
  }
};

/// Initial-condition target: coefficient `order` of output `output` at the
/// left end of the interval must equal `value`.
struct IcTerm {
  std::size_t output = 0;
  std::size_t order = 0;
  double value = 0.0;
};

/// Point of the original solution recovered from network outputs.
struct Reconstruction {
  double t = 0.0;
  std::vector<double> u;
};

struct Formulation {
  std::string variable;  // name of the network input: "t" or "H"
  std::vector<std::string> output_names;
  int max_order = 1;  // highest derivative read by the residual
  double lo = 0.0;
  double hi = 1.0;
  Residual residual;
  std::vector<IcTerm> ic;
  std::function<Reconstruction(double x, std::span<const double> values)> reconstruct;
  /// Exact outputs as jets in the input variable; empty if unavailable.
  std::function<std::vector<Jet3>(const Jet3& x)> exact_outputs;

  std::size_t output_dim() const { return output_names.size(); }
};

enum class FormulationKind { Invariant, Vanilla };

std::string to_string(FormulationKind f);
/// Accepts "invariant" and "vanilla"; throws std::invalid_argument otherwise.
FormulationKind parse_formulation(std::string_view s);

struct ProblemSpec {
  std::string name;
  std::size_t solution_dim = 1;
  std::vector<std::string> solution_names;
  Formulation vanilla;
  Formulation invariant;
  /// Explicit first-order form y' = f(x, y) of the invariant system.
  VectorField invariant_rhs;
  std::map<std::string, double> constants;

  const Formulation& formulation(FormulationKind k) const {
    return k == FormulationKind::Invariant ? invariant : vanilla;
  }
  /// Reference solution in the original variables.
  std::vector<double> exact(double t) const { return exact_eval(name, t); }
};

ProblemSpec schwarz_spec();
ProblemSpec logistic_spec();
ProblemSpec oscillator_spec();
ProblemSpec exponential_spec();
ProblemSpec system_spec();

/// Registry order: schwarz, logistic, oscillator, exponential, system.
const std::vector<std::string>& problem_names();

/// Throws std::invalid_argument for names not in problem_names().
ProblemSpec get_problem(std::string_view name);

}  // namespace ipinn
