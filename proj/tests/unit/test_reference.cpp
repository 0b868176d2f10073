#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ipinn/jet.hpp"
#include "ipinn/reference.hpp"
#include "oracles.hpp"

using namespace ipinn;
using std::numbers::pi;

namespace {

double sine_error(std::size_t steps) {
  const VectorField f = [](double t, const Eigen::VectorXd&) {
    Eigen::VectorXd d(1);
    d(0) = std::cos(t);
    return d;
  };
  const auto tr = rk4_solve(f, Eigen::VectorXd::Zero(1), 0.0, 2.0, steps);
  return std::abs(tr.state(tr.size() - 1)(0) - std::sin(2.0));
}

double coupled_error(std::size_t steps) {
  // y'' = -y as a first-order system, y = cos t
  const VectorField f = [](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(2);
    d << y(1), -y(0);
    return d;
  };
  Eigen::VectorXd y0(2);
  y0 << 1, 0;
  const auto tr = rk4_solve(f, y0, 0.0, 3.0, steps);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    worst = std::max({worst, std::abs(tr.state(i)(0) - std::cos(t)), std::abs(tr.state(i)(1) + std::sin(t))});
  }
  return worst;
}

}  // namespace

TEST_CASE("rk4 examples") {
  const VectorField grow = [](double, const Eigen::VectorXd& y) { return y; };
  const auto tr = rk4_solve(grow, Eigen::VectorXd::Ones(1), 0.0, 1.0, 1000);
  CHECK(tr.size() == 1001);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 1.0);
  CHECK(std::abs(tr.state(1000)(0) - std::numbers::e) < 1e-10);

  const VectorField still = [](double, const Eigen::VectorXd& y) {
    return Eigen::VectorXd::Zero(y.size()).eval();
  };
  Eigen::VectorXd y0(3);
  y0 << 1, -2, 3;
  const auto flat = rk4_solve(still, y0, -1.0, 4.0, 17);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat.state(i) == y0);
}

TEST_CASE("rk4 rejects bad input and blow-up") {
  const VectorField grow = [](double, const Eigen::VectorXd& y) { return y; };
  CHECK_THROWS_AS(rk4_solve(grow, Eigen::VectorXd::Ones(1), 1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(rk4_solve(grow, Eigen::VectorXd::Ones(1), 0.0, 1.0, 0), std::invalid_argument);
  const VectorField blow = [](double, const Eigen::VectorXd& y) { return (y.array() * y.array()).matrix().eval(); };
  CHECK_THROWS(rk4_solve(blow, Eigen::VectorXd::Ones(1), 0.0, 5.0, 50));
}

TEST_CASE("rk4 empirical convergence order") {
  for (auto* err : {&sine_error, &coupled_error}) {
    double worst_dev = 0.0;
    for (std::size_t n = 16; n <= 128; n *= 2) {
      const double order = std::log2(err(n) / err(2 * n));
      MESSAGE("n = " << n << " order " << order);
      worst_dev = std::max(worst_dev, std::abs(order - 4.0));
    }
    CHECK(worst_dev <= 0.2);
  }
}

TEST_CASE("erf examples") {
  CHECK(ipinn::erf(0.0) == 0.0);
  CHECK(std::abs(ipinn::erf(1.0) - 0.842700792950) < 1e-12);
  CHECK(std::abs(ipinn::erf(1.0) - 0.8427007929497149) < 1e-15);
  // either side of the series / continued-fraction switch
  CHECK(std::abs(ipinn::erf(2.4) - 0.99931148610335492) < 1e-15);
  CHECK(std::abs(ipinn::erf(2.6) - 0.99976396558347065) < 1e-15);
  CHECK(std::abs(ipinn::erf(0.3) - 0.32862675945912742) < 1e-15);
  CHECK(ipinn::erf(40.0) == 1.0);
  CHECK(ipinn::erf(-40.0) == -1.0);
  CHECK(ipinn::erf(std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("erf is odd, monotone and matches quadrature") {
  double worst = 0.0;
  double prev = -1.0;
  for (int i = -600; i <= 600; ++i) {
    const double x = i / 100.0;
    const double v = ipinn::erf(x);
    CHECK(ipinn::erf(-x) == -v);
    CHECK(v >= prev);
    prev = v;
    const double quad =
        2.0 / std::sqrt(pi) *
        testing::gauss_legendre([](double s) { return std::exp(-s * s); }, 0.0, x, 32);
    worst = std::max({worst, std::abs(v - quad), std::abs(v - std::erf(x))});
  }
  MESSAGE("max |erf - oracle| = " << worst);
  CHECK(worst < 1e-12);
}

TEST_CASE("exact solutions") {
  CHECK(exact_eval("schwarz", pi / 4)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exact_eval("logistic", 0.0)[0] == 0.5);
  const double c1 = std::exp(-5.0);
  CHECK(exact_eval("exponential", 2.0)[0] ==
        doctest::Approx((2 + c1) * std::log(2 + c1) - 2).epsilon(1e-15));
  CHECK(exact_eval("system", 0.0).size() == 2);
  CHECK_THROWS_AS(exact_eval("schwarz", pi / 2), DomainError);
  CHECK_THROWS_AS(exact_eval("nope", 0.0), std::invalid_argument);
}

TEST_CASE("oscillator reference") {
  using namespace oscillator_reference;
  const auto& tr = trajectory();
  CHECK(tr.size() == kSteps + 1);
  CHECK(state_at(0.0)(0) == 1.0);
  CHECK(state_at(0.0)(1) == 1.0);
  CHECK(&trajectory() == &tr);  // cached

  // interpolation between nodes agrees with a fresh fine integration
  const VectorField f = [](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(2);
    d << y(1), std::sin(std::pow(t, kExponent)) - y(0);
    return d;
  };
  Eigen::VectorXd y0(2);
  y0 << 1, 1;
  for (double t : {0.37, 2.5000049, 7.77}) {
    const auto fine = rk4_solve(f, y0, 0.0, t, 200000);
    CHECK(std::abs(state_at(t)(0) - fine.state(fine.size() - 1)(0)) < 1e-8);
  }
  CHECK_THROWS(state_at(10.5));
}
