#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string_view>
#include <vector>

namespace ipinn {

/// Solution samples on a grid; row i of `states` is the state at times[i].
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;

  std::size_t size() const { return times.size(); }
  Eigen::VectorXd state(std::size_t i) const { return states.row(static_cast<Eigen::Index>(i)).transpose(); }
};

using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Classical fourth-order Runge-Kutta on a uniform grid of n_steps steps
/// over [lo, hi]. Both endpoints are included in the returned trajectory.
/// Throws std::runtime_error naming the time at which the state became
/// non-finite.
Trajectory rk4_solve(const VectorField& f, const Eigen::VectorXd& y0, double lo, double hi,
                     std::size_t n_steps);

/// Error function. Series for |x| < 2.5, continued fraction for erfc beyond.
double erf(double x);

/// Exact (or high-resolution reference) solution of a benchmark problem at
/// time t. Returns u for scalar problems and (u, v) for "system".
/// Throws DomainError at t = pi/2 for "schwarz" and std::invalid_argument
/// for unknown names.
std::vector<double> exact_eval(std::string_view problem, double t);

namespace oscillator_reference {

inline constexpr double kExponent = 0.99;
inline constexpr double kLo = 0.0;
inline constexpr double kHi = 10.0;
inline constexpr std::size_t kSteps = 100000;

/// RK4 solution of u'' + u = sin(t^a), u(0) = u'(0) = 1, computed once.
const Trajectory& trajectory();

/// (u, u_t) at t by cubic Hermite interpolation of trajectory().
Eigen::Vector2d state_at(double t);

}  // namespace oscillator_reference

}  // namespace ipinn
