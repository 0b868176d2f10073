#include "ipinn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ipinn/jet.hpp"

namespace ipinn {

Trajectory rk4_solve(const VectorField& f, const Eigen::VectorXd& y0, double lo, double hi,
                     std::size_t n_steps) {
  if (n_steps == 0) throw std::invalid_argument("rk4_solve: n_steps must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("rk4_solve: empty interval");

  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.states.resize(static_cast<Eigen::Index>(n_steps + 1), y0.size());

  const double h = (hi - lo) / static_cast<double>(n_steps);
  Eigen::VectorXd y = y0;
  traj.times[0] = lo;
  traj.states.row(0) = y.transpose();
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = lo + static_cast<double>(i) * h;
    const Eigen::VectorXd k1 = f(t, y);
    const Eigen::VectorXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = i + 1 == n_steps ? hi : lo + static_cast<double>(i + 1) * h;
    if (!y.allFinite()) {
      throw std::runtime_error("rk4_solve: non-finite state at t = " + std::to_string(t_next));
    }
    traj.times[i + 1] = t_next;
    traj.states.row(static_cast<Eigen::Index>(i + 1)) = y.transpose();
  }
  return traj;
}

double erf(double x) {
  if (x < 0.0) return -erf(-x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  if (x < 2.5) {
    // erf x = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!, all terms positive
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
      term *= 2.0 * x2 / (2.0 * n + 1.0);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
  }

  // erfc x = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
  // evaluated with the modified Lentz algorithm.
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double erfc = std::exp(-x * x) / std::sqrt(std::numbers::pi) / f;
  return 1.0 - erfc;
}

namespace oscillator_reference {

const Trajectory& trajectory() {
  static const Trajectory traj = [] {
    const VectorField f = [](double t, const Eigen::VectorXd& y) {
      Eigen::VectorXd dy(2);
      dy << y(1), std::sin(std::pow(t, kExponent)) - y(0);
      return dy;
    };
    Eigen::VectorXd y0(2);
    y0 << 1.0, 1.0;
    return rk4_solve(f, y0, kLo, kHi, kSteps);
  }();
  return traj;
}

Eigen::Vector2d state_at(double t) {
  if (t < kLo || t > kHi) {
    throw std::out_of_range("oscillator reference: t = " + std::to_string(t) +
                            " outside [0, 10]");
  }
  const Trajectory& traj = trajectory();
  const double h = (kHi - kLo) / static_cast<double>(kSteps);
  auto i = static_cast<std::size_t>((t - kLo) / h);
  i = std::min(i, kSteps - 1);
  const double t0 = traj.times[i];
  const double t1 = traj.times[i + 1];
  const auto r0 = static_cast<Eigen::Index>(i);
  const double u0 = traj.states(r0, 0);
  const double v0 = traj.states(r0, 1);
  const double u1 = traj.states(r0 + 1, 0);
  const double v1 = traj.states(r0 + 1, 1);
  // derivative of u_t is u_tt = sin(t^a) - u
  const double a0 = std::sin(std::pow(t0, kExponent)) - u0;
  const double a1 = std::sin(std::pow(t1, kExponent)) - u1;

  const double dt = t1 - t0;
  const double s = (t - t0) / dt;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);

  Eigen::Vector2d out;
  out(0) = h00 * u0 + h10 * dt * v0 + h01 * u1 + h11 * dt * v1;
  out(1) = h00 * v0 + h10 * dt * a0 + h01 * v1 + h11 * dt * a1;
  return out;
}

}  // namespace oscillator_reference

std::vector<double> exact_eval(std::string_view problem, double t) {
  if (problem == "schwarz") {
    const double c = std::cos(t);
    if (std::fabs(c) < 1e-15) throw DomainError("schwarz: tan is singular at t = pi/2");
    return {std::sin(t) / c};
  }
  if (problem == "logistic") return {1.0 / (1.0 + std::exp(-t))};
  if (problem == "oscillator") return {oscillator_reference::state_at(t)(0)};
  if (problem == "exponential") {
    const double s = t + std::exp(-5.0);
    if (!(s > 0.0)) throw DomainError("exponential: t + c1 must be positive");
    return {s * std::log(s) - t};
  }
  if (problem == "system") {
    const double c = 1.0 / (std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5));
    const double k = 1.0 - c * erf(1.0 / std::numbers::sqrt2);
    const double e = erf((t + 1.0) / std::numbers::sqrt2);
    const double u = std::sqrt(2.0 / std::numbers::pi) * c * std::exp(-(t + 1.0) * (t + 1.0) / 2.0) +
                     c * t * e + k * t;
    const double v = c * e + k;
    return {u, v};
  }
  throw std::invalid_argument("unknown problem '" + std::string(problem) + "'");
}

}  // namespace ipinn
