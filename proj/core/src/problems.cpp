#include "ipinn/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>

namespace ipinn {

GroupElementSL2 make_sl2(double alpha, double beta, double gamma, double delta) {
  GroupElementSL2 g{alpha, beta, gamma, delta};
  if (!(std::fabs(g.det() - 1.0) < 1e-9)) {
    throw std::invalid_argument("make_sl2: determinant " + std::to_string(g.det()) + " is not 1");
  }
  return g;
}

GroupElementSL2 sl2_mul(const GroupElementSL2& a, const GroupElementSL2& b) {
  return {a.alpha * b.alpha + a.beta * b.gamma, a.alpha * b.beta + a.beta * b.delta,
          a.gamma * b.alpha + a.delta * b.gamma, a.gamma * b.beta + a.delta * b.delta};
}

GroupElementSL2 sl2_inverse(const GroupElementSL2& g) {
  return {g.delta, -g.beta, -g.gamma, g.alpha};
}

double sl2_act(const GroupElementSL2& g, double u) {
  const double den = g.gamma * u + g.delta;
  if (den == 0.0) throw DomainError("sl2_act: gamma u + delta = 0");
  return (g.alpha * u + g.beta) / den;
}

Jet3Point sl2_prolong(const GroupElementSL2& g, const Jet3Point& z) {
  const double u = z.u[0];
  const double u1 = z.u[1];
  const double u2 = z.u[2];
  const double u3 = z.u[3];
  const double s = g.gamma * u + g.delta;
  if (s == 0.0) throw DomainError("sl2_prolong: gamma u + delta = 0");
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s2 * s2;
  const double gm = g.gamma;
  return Jet3Point{
      z.t, Jet3{(g.alpha * u + g.beta) / s, u1 / s2, u2 / s2 - 2.0 * gm * u1 * u1 / s3,
                u3 / s2 - 6.0 * gm * u1 * u2 / s3 + 6.0 * gm * gm * u1 * u1 * u1 / s4}};
}

double schwarzian(const Jet3Point& z) {
  const double u1 = z.u[1];
  if (u1 == 0.0) throw DomainError("schwarzian: u_t = 0");
  const double r = z.u[2] / u1;
  return z.u[3] / u1 - 1.5 * r * r;
}

GroupElementSL2 sl2_moving_frame(const Jet3Point& z) {
  const double u = z.u[0];
  const double u1 = z.u[1];
  const double u2 = z.u[2];
  if (u1 == 0.0) throw DomainError("sl2_moving_frame: u_t = 0");
  const double a = std::fabs(u1);
  const double root = std::sqrt(a);
  const double root3 = a * root;
  return {1.0 / root, -u / root, u2 / (2.0 * root3), (2.0 * u1 * u1 - u * u2) / (2.0 * root3)};
}

std::array<double, 4> schwarz_maurer_cartan(double forcing, double sigma) {
  return {0.0, -sigma, 0.5 * sigma * forcing, 0.0};
}

std::string to_string(FormulationKind f) {
  return f == FormulationKind::Invariant ? "invariant" : "vanilla";
}

FormulationKind parse_formulation(std::string_view s) {
  if (s == "invariant") return FormulationKind::Invariant;
  if (s == "vanilla") return FormulationKind::Vanilla;
  throw std::invalid_argument("unknown formulation '" + std::string(s) + "'");
}

namespace {

template <class Span>
using elem_t = std::remove_cvref_t<typename Span::element_type>;

Reconstruction identity_reconstruct(double x, std::span<const double> values) {
  return {x, std::vector<double>(values.begin(), values.end())};
}

// erf((x + 1)/sqrt 2) as a jet: its derivative is sqrt(2/pi) exp(-(x+1)^2/2).
Jet3 erf_shifted_jet(const Jet3& x) {
  const Jet3 g = std::sqrt(2.0 / std::numbers::pi) * exp(-0.5 * sq(x + 1.0));
  return Jet3{erf((x[0] + 1.0) / std::numbers::sqrt2), g[0], g[1], g[2]};
}

}  // namespace

ProblemSpec schwarz_spec() {
  constexpr double forcing = 2.0;
  constexpr double sigma = 1.0;
  const auto nu = schwarz_maurer_cartan(forcing, sigma);

  ProblemSpec p;
  p.name = "schwarz";
  p.solution_names = {"u"};
  p.constants = {{"F", forcing}, {"sigma", sigma}};

  Formulation& v = p.vanilla;
  v.variable = "t";
  v.output_names = {"u"};
  v.max_order = 3;
  v.lo = 0.0;
  v.hi = std::numbers::pi;
  v.residual = Residual::from([](double, auto o) {
    using T = elem_t<decltype(o)>;
    const T u1 = coef(o[0], 1);
    const T u2 = coef(o[0], 2);
    const T u3 = coef(o[0], 3);
    return std::vector<T>{u3 / u1 - 1.5 * sq(u2 / u1) - forcing};
  });
  v.ic = {{0, 0, 0.0}, {0, 1, 1.0}, {0, 2, 0.0}};
  v.reconstruct = identity_reconstruct;
  v.exact_outputs = [](const Jet3& x) { return std::vector<Jet3>{sin(x) / cos(x)}; };

  // left moving frame rho_bar = (alpha, beta; gamma, delta) with
  // d(rho_bar)/dt + rho_bar nu = 0
  Formulation& inv = p.invariant;
  inv.variable = "t";
  inv.output_names = {"alpha", "beta", "gamma", "delta"};
  inv.max_order = 1;
  inv.lo = 0.0;
  inv.hi = std::numbers::pi;
  inv.residual = Residual::from([nu](double, auto o) {
    using T = elem_t<decltype(o)>;
    const T a = coef(o[0], 0), b = coef(o[1], 0), c = coef(o[2], 0), d = coef(o[3], 0);
    return std::vector<T>{
        coef(o[0], 1) + (a * nu[0] + b * nu[2]),
        coef(o[1], 1) + (a * nu[1] + b * nu[3]),
        coef(o[2], 1) + (c * nu[0] + d * nu[2]),
        coef(o[3], 1) + (c * nu[1] + d * nu[3]),
    };
  });
  const Jet3Point z0{0.0, Jet3{0.0, 1.0, 0.0, 0.0}};
  const GroupElementSL2 frame0 = sl2_inverse(sl2_moving_frame(z0));
  inv.ic = {{0, 0, frame0.alpha}, {1, 0, frame0.beta}, {2, 0, frame0.gamma}, {3, 0, frame0.delta}};
  inv.reconstruct = [](double x, std::span<const double> o) {
    const GroupElementSL2 g{o[0], o[1], o[2], o[3]};
    return Reconstruction{x, {sl2_act(g, 0.0)}};
  };
  inv.exact_outputs = [](const Jet3& x) {
    return std::vector<Jet3>{cos(x), sin(x), -sin(x), cos(x)};
  };

  p.invariant_rhs = [nu](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(4);
    dy << -(y(0) * nu[0] + y(1) * nu[2]), -(y(0) * nu[1] + y(1) * nu[3]),
        -(y(2) * nu[0] + y(3) * nu[2]), -(y(2) * nu[1] + y(3) * nu[3]);
    return dy;
  };
  return p;
}

ProblemSpec logistic_spec() {
  constexpr double u0 = 0.5;
  constexpr double t0 = 0.0;

  ProblemSpec p;
  p.name = "logistic";
  p.solution_names = {"u"};
  p.constants = {{"u0", u0}};

  Formulation& v = p.vanilla;
  v.variable = "t";
  v.output_names = {"u"};
  v.max_order = 1;
  v.lo = t0;
  v.hi = std::numbers::pi;
  v.residual = Residual::from([](double, auto o) {
    using T = elem_t<decltype(o)>;
    const T u = coef(o[0], 0);
    return std::vector<T>{coef(o[0], 1) - u * (1.0 - u)};
  });
  v.ic = {{0, 0, u0}};
  v.reconstruct = identity_reconstruct;
  v.exact_outputs = [](const Jet3& x) { return std::vector<Jet3>{1.0 / (1.0 + exp(-x))}; };

  Formulation& inv = p.invariant;
  inv.variable = "t";
  inv.output_names = {"epsilon"};
  inv.max_order = 1;
  inv.lo = t0;
  inv.hi = std::numbers::pi;
  inv.residual = Residual::from([](double, auto o) {
    using T = elem_t<decltype(o)>;
    return std::vector<T>{coef(o[0], 1)};
  });
  inv.ic = {{0, 0, (1.0 - u0) / u0 * std::exp(t0)}};
  inv.reconstruct = [](double t, std::span<const double> o) {
    return Reconstruction{t, {1.0 / (1.0 + o[0] * std::exp(-t))}};
  };
  inv.exact_outputs = [](const Jet3&) { return std::vector<Jet3>{Jet3::constant(1.0)}; };

  p.invariant_rhs = [](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
  return p;
}

ProblemSpec oscillator_spec() {
  constexpr double a = oscillator_reference::kExponent;
  constexpr double u0 = 1.0;
  constexpr double ut0 = 1.0;
  constexpr double t0 = 0.0;

  ProblemSpec p;
  p.name = "oscillator";
  p.solution_names = {"u"};
  p.constants = {{"a", a}, {"u0", u0}, {"ut0", ut0}};

  Formulation& v = p.vanilla;
  v.variable = "t";
  v.output_names = {"u"};
  v.max_order = 2;
  v.lo = t0;
  v.hi = oscillator_reference::kHi;
  v.residual = Residual::from([a](double t, auto o) {
    using T = elem_t<decltype(o)>;
    return std::vector<T>{coef(o[0], 2) + coef(o[0], 0) - std::sin(std::pow(t, a))};
  });
  v.ic = {{0, 0, u0}, {0, 1, ut0}};
  v.reconstruct = identity_reconstruct;

  Formulation& inv = p.invariant;
  inv.variable = "t";
  inv.output_names = {"alpha", "beta"};
  inv.max_order = 1;
  inv.lo = t0;
  inv.hi = oscillator_reference::kHi;
  inv.residual = Residual::from([a](double t, auto o) {
    using T = elem_t<decltype(o)>;
    const double forcing = std::sin(std::pow(t, a));
    return std::vector<T>{coef(o[0], 1) - forcing * std::cos(t),
                          coef(o[1], 1) + forcing * std::sin(t)};
  });
  inv.ic = {{0, 0, u0 * std::sin(t0) + ut0 * std::cos(t0)},
            {1, 0, u0 * std::cos(t0) - ut0 * std::sin(t0)}};
  inv.reconstruct = [](double t, std::span<const double> o) {
    return Reconstruction{t, {o[0] * std::sin(t) + o[1] * std::cos(t)}};
  };

  p.invariant_rhs = [a](double t, const Eigen::VectorXd&) {
    const double forcing = std::sin(std::pow(t, a));
    Eigen::VectorXd dy(2);
    dy << forcing * std::cos(t), -forcing * std::sin(t);
    return dy;
  };
  return p;
}

ProblemSpec exponential_spec() {
  const double c1 = std::exp(-5.0);
  constexpr double c2 = 0.0;
  constexpr double t0 = 0.0;
  constexpr double tf = 2.0;
  // exact solution u = (t + c1) ln(t + c1) - t + c2, so u_t = ln(t + c1)
  const double u0 = (t0 + c1) * std::log(t0 + c1) - t0 + c2;
  const double ut0 = std::log(t0 + c1);
  // epsilon(H) = epsilon_0 + H, so t(H) = e^{epsilon_0 + H}(1 - e^{-H}) = tf at
  // H = ln(1 + tf e^{-epsilon_0})
  const double h0 = 0.0;
  const double hf = std::log(1.0 + tf * std::exp(-ut0));

  ProblemSpec p;
  p.name = "exponential";
  p.solution_names = {"u"};
  p.constants = {{"c1", c1}, {"c2", c2}, {"H0", h0}, {"Hf", hf}, {"tf", tf}};

  Formulation& v = p.vanilla;
  v.variable = "t";
  v.output_names = {"u"};
  v.max_order = 2;
  v.lo = t0;
  v.hi = tf;
  v.residual = Residual::from([](double, auto o) {
    using T = elem_t<decltype(o)>;
    return std::vector<T>{coef(o[0], 2) - exp(-coef(o[0], 1))};
  });
  v.ic = {{0, 0, u0}, {0, 1, ut0}};
  v.reconstruct = identity_reconstruct;
  v.exact_outputs = [c1, c2](const Jet3& x) {
    const Jet3 s = x + c1;
    return std::vector<Jet3>{s * log(s) - x + c2};
  };

  Formulation& inv = p.invariant;
  inv.variable = "H";
  inv.output_names = {"I", "epsilon"};
  inv.max_order = 1;
  inv.lo = h0;
  inv.hi = hf;
  inv.residual = Residual::from([](double h, auto o) {
    using T = elem_t<decltype(o)>;
    return std::vector<T>{coef(o[0], 1) + coef(o[0], 0) - std::exp(-h) + 1.0,
                          coef(o[1], 1) - 1.0};
  });
  inv.ic = {{0, 0, std::exp(-ut0) * (u0 - t0 * ut0)}, {1, 0, ut0}};
  inv.reconstruct = [](double h, std::span<const double> o) {
    const double scale = std::exp(o[1]);
    const double w = 1.0 - std::exp(-h);
    return Reconstruction{scale * w, {scale * (o[0] + o[1] * w)}};
  };
  // I(H) = (H + I_0 + 1) e^{-H} - 1 and epsilon(H) = epsilon_0 + H
  const double i0 = inv.ic[0].value;
  inv.exact_outputs = [i0, ut0](const Jet3& h) {
    return std::vector<Jet3>{(h + (i0 + 1.0)) * exp(-h) - 1.0, h + ut0};
  };

  p.invariant_rhs = [](double h, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(2);
    dy << std::exp(-h) - 1.0 - y(0), 1.0;
    return dy;
  };
  return p;
}

ProblemSpec system_spec() {
  const double c = 1.0 / (std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5));
  const double k = 1.0 - c * erf(1.0 / std::numbers::sqrt2);

  ProblemSpec p;
  p.name = "system";
  p.solution_dim = 2;
  p.solution_names = {"u", "v"};
  p.constants = {{"c", c}, {"k", k}};

  Formulation& v = p.vanilla;
  v.variable = "t";
  v.output_names = {"u", "v"};
  v.max_order = 1;
  v.lo = 0.0;
  v.hi = 2.0;
  v.residual = Residual::from([](double t, auto o) {
    using T = elem_t<decltype(o)>;
    const T u = coef(o[0], 0);
    const T w = coef(o[1], 0);
    return std::vector<T>{coef(o[0], 1) + u - (t + 1.0) * w, coef(o[1], 1) - u + t * w};
  });
  v.ic = {{0, 0, 1.0}, {1, 0, 1.0}};
  v.reconstruct = identity_reconstruct;
  v.exact_outputs = [c, k](const Jet3& x) {
    const Jet3 e = erf_shifted_jet(x);
    const Jet3 u = std::sqrt(2.0 / std::numbers::pi) * c * exp(-0.5 * sq(x + 1.0)) +
                   c * (x * e) + k * x;
    return std::vector<Jet3>{u, c * e + k};
  };

  // the printed alpha_t = alpha (1 + t) fails substitution; the sign below is
  // the one forced by the original system and its erf solution
  Formulation& inv = p.invariant;
  inv.variable = "t";
  inv.output_names = {"alpha", "beta"};
  inv.max_order = 1;
  inv.lo = 0.0;
  inv.hi = 2.0;
  inv.residual = Residual::from([](double t, auto o) {
    using T = elem_t<decltype(o)>;
    const T al = coef(o[0], 0);
    return std::vector<T>{coef(o[0], 1) + al * (1.0 + t), coef(o[1], 1) - al};
  });
  inv.ic = {{0, 0, 1.0}, {1, 0, 1.0}};
  inv.reconstruct = [](double t, std::span<const double> o) {
    return Reconstruction{t, {o[0] + t * o[1], o[1]}};
  };
  inv.exact_outputs = [c, k](const Jet3& x) {
    return std::vector<Jet3>{exp(-x - 0.5 * sq(x)), c * erf_shifted_jet(x) + k};
  };

  p.invariant_rhs = [](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(2);
    dy << -y(0) * (1.0 + t), y(0);
    return dy;
  };
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"schwarz", "logistic", "oscillator", "exponential",
                                              "system"};
  return names;
}

ProblemSpec get_problem(std::string_view name) {
  if (name == "schwarz") return schwarz_spec();
  if (name == "logistic") return logistic_spec();
  if (name == "oscillator") return oscillator_spec();
  if (name == "exponential") return exponential_spec();
  if (name == "system") return system_spec();
  throw std::invalid_argument("unknown problem '" + std::string(name) +
                              "' (expected schwarz, logistic, oscillator, exponential or system)");
}

}  // namespace ipinn
