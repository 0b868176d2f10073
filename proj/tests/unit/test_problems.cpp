#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ipinn/problems.hpp"
#include "ipinn/reference.hpp"
#include "ipinn/training.hpp"
#include "oracles.hpp"

using namespace ipinn;
using std::numbers::pi;

namespace {

GroupElementSL2 random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (;;) {
    const double a = d(rng), b = d(rng), c = d(rng);
    if (std::abs(a) < 0.3) continue;
    // det = a*delta - b*c = 1
    return make_sl2(a, b, c, (1.0 + b * c) / a);
  }
}

// Distance in PSL(2): g and -g act identically on u, and the frame fixes the
// branch by the sign of alpha, so equivariance holds up to that sign.
double frame_distance(const GroupElementSL2& a, const GroupElementSL2& b) {
  auto d = [&](double s) {
    return std::max({std::abs(a.alpha - s * b.alpha), std::abs(a.beta - s * b.beta),
                     std::abs(a.gamma - s * b.gamma), std::abs(a.delta - s * b.delta)});
  };
  return std::min(d(1.0), d(-1.0));
}

Jet3Point random_jet_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {d(rng), Jet3{d(rng), 0.3 + std::abs(d(rng)), d(rng), d(rng)}};
}

std::vector<double> initial_state(const Formulation& f) {
  std::vector<double> y(f.output_dim(), 0.0);
  for (const IcTerm& ic : f.ic) {
    if (ic.order == 0) y[ic.output] = ic.value;
  }
  return y;
}

// Integrates the invariant system and returns the worst error of the
// reconstructed solution against the reference. Schwarz is compared through
// arctan modulo pi so that the pole does not dominate.
double reconstruction_error(const ProblemSpec& p, std::size_t steps) {
  const Formulation& f = p.invariant;
  const auto y0v = initial_state(f);
  const Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(y0v.data(), static_cast<Eigen::Index>(y0v.size()));
  const Trajectory tr = rk4_solve(p.invariant_rhs, y0, f.lo, f.hi, steps);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); i += 7) {
    const Eigen::VectorXd s = tr.state(i);
    const Reconstruction rec = f.reconstruct(tr.times[i], {s.data(), static_cast<std::size_t>(s.size())});
    if (p.name == "schwarz") {
      double d = std::atan(rec.u[0]) - tr.times[i];
      d -= pi * std::round(d / pi);
      worst = std::max(worst, std::abs(d));
      continue;
    }
    const auto ref = p.exact(rec.t);
    for (std::size_t c = 0; c < ref.size(); ++c) worst = std::max(worst, std::abs(rec.u[c] - ref[c]));
  }
  return worst;
}

}  // namespace

TEST_CASE("group operations") {
  std::mt19937_64 rng(1);
  const auto g = random_sl2(rng);
  const auto h = random_sl2(rng);
  CHECK(g.det() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sl2_mul(g, h).det() == doctest::Approx(1.0).epsilon(1e-12));
  const auto e = sl2_mul(g, sl2_inverse(g));
  CHECK(e.alpha == doctest::Approx(1.0));
  CHECK(std::abs(e.beta) < 1e-14);
  CHECK(std::abs(e.gamma) < 1e-14);
  CHECK(e.delta == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_sl2(1, 1, 1, 1), std::invalid_argument);
  // action composes like the matrix product
  CHECK(sl2_act(sl2_mul(g, h), 0.3) == doctest::Approx(sl2_act(g, sl2_act(h, 0.3))).epsilon(1e-12));
}

TEST_CASE("prolonged action examples") {
  const Jet3Point z{0.4, Jet3{0.2, 1.3, -0.7, 2.2}};
  const auto same = sl2_prolong(GroupElementSL2{}, z);
  CHECK(same.t == z.t);
  CHECK(same.u == z.u);

  const auto shifted = sl2_prolong(make_sl2(1, 1, 0, 1), Jet3Point{0.0, Jet3{0, 1, 0, 0}});
  CHECK(shifted.t == 0.0);
  CHECK(shifted.u == Jet3{1, 1, 0, 0});
}

TEST_CASE("prolonged action is the chain rule of the Moebius map") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_sl2(rng);
    const auto z = random_jet_point(rng);
    const Jet3 u = z.u;
    // same Moebius map evaluated with jet arithmetic
    const Jet3 want = (g.alpha * u + g.beta) / (g.gamma * u + g.delta);
    const auto got = sl2_prolong(g, z).u;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("schwarzian examples") {
  CHECK(schwarzian({pi / 4, Jet3{1, 2, 4, 16}}) == doctest::Approx(2.0).epsilon(1e-15));
  // same numbers from jet arithmetic on tan
  const Jet3 t = Jet3::variable(pi / 4);
  CHECK(schwarzian({pi / 4, sin(t) / cos(t)}) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(schwarzian({0.3, Jet3::variable(0.3)}) == 0.0);
  CHECK_THROWS_AS(schwarzian({0.0, Jet3{1, 0, 1, 1}}), DomainError);
}

TEST_CASE("schwarzian is SL(2)-invariant (100 random elements)") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = random_sl2(rng);
    const auto z = random_jet_point(rng);
    worst = std::max(worst, std::abs(schwarzian(sl2_prolong(g, z)) - schwarzian(z)));
  }
  MESSAGE("max |dI| = " << worst);
  CHECK(worst < 1e-8);
}

TEST_CASE("moving frame: identity, normalization and equivariance") {
  const auto e = sl2_moving_frame({0.0, Jet3{0, 1, 0, 0}});
  CHECK(e.alpha == 1.0);
  CHECK(e.beta == 0.0);
  CHECK(e.gamma == 0.0);
  CHECK(e.delta == 1.0);

  std::mt19937_64 rng(99);
  double worst_norm = 0.0;
  double worst_equi = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto z = random_jet_point(rng);
    const auto rho = sl2_moving_frame(z);
    CHECK(rho.det() == doctest::Approx(1.0).epsilon(1e-12));
    const auto n = sl2_prolong(rho, z).u;
    worst_norm = std::max({worst_norm, std::abs(n[0]), std::abs(n[1] - 1.0), std::abs(n[2])});
    // third coefficient of the normalized jet is the Schwarzian
    CHECK(n[3] == doctest::Approx(schwarzian(z)).epsilon(1e-9).scale(1.0));

    // right frame: rho(g z) = rho(z) g^{-1}
    const auto g = random_sl2(rng);
    const auto lhs = sl2_moving_frame(sl2_prolong(g, z));
    worst_equi = std::max(worst_equi, frame_distance(lhs, sl2_mul(rho, sl2_inverse(g))));
  }
  MESSAGE("normalization " << worst_norm << ", equivariance " << worst_equi);
  CHECK(worst_norm < 1e-10);
  CHECK(worst_equi < 1e-8);
}

TEST_CASE("schwarz problem") {
  const auto p = schwarz_spec();
  CHECK(p.invariant.output_dim() == 4);
  CHECK(p.vanilla.max_order == 3);
  CHECK(p.invariant.hi == pi);
  // ICs are the identity frame
  REQUIRE(p.invariant.ic.size() == 4);
  CHECK(p.invariant.ic[0].value == 1.0);
  CHECK(p.invariant.ic[1].value == 0.0);
  CHECK(p.invariant.ic[2].value == 0.0);
  CHECK(p.invariant.ic[3].value == 1.0);

  const auto nu = schwarz_maurer_cartan(2.0, 1.0);
  CHECK(nu == std::array<double, 4>{0.0, -1.0, 1.0, 0.0});

  const double t = pi / 4;
  const std::vector<double> frame{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
  CHECK(p.invariant.reconstruct(t, frame).u[0] == doctest::Approx(1.0).epsilon(1e-15));

  // analytic frame annihilates the residuals and keeps unit determinant
  for (double s = 0.0; s <= pi; s += 0.1) {
    const auto outs = p.invariant.exact_outputs(Jet3::variable(s));
    for (const Jet3& r : p.invariant.residual.on_jets(s, outs)) CHECK(std::abs(r[0]) < 1e-15);
    CHECK(outs[0][0] * outs[3][0] - outs[1][0] * outs[2][0] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("determinant is conserved along the integrated reconstruction") {
  const auto p = schwarz_spec();
  Eigen::VectorXd y0(4);
  y0 << 1, 0, 0, 1;
  const auto tr = rk4_solve(p.invariant_rhs, y0, 0.0, pi, 2000);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto y = tr.state(i);
    worst = std::max(worst, std::abs(y(0) * y(3) - y(1) * y(2) - 1.0));
  }
  MESSAGE("max |det - 1| = " << worst);
  CHECK(worst < 1e-9);
}

TEST_CASE("logistic problem") {
  const auto p = logistic_spec();
  CHECK(p.invariant.ic.at(0).value == 1.0);
  CHECK(p.exact(0.0)[0] == 0.5);
  CHECK(p.exact(pi)[0] == doctest::Approx(0.9585761678336372).epsilon(1e-15));
  CHECK(p.invariant.reconstruct(pi, std::vector<double>{1.0}).u[0] ==
        doctest::Approx(0.9585761678336372).epsilon(1e-15));
}

TEST_CASE("oscillator problem") {
  const auto p = oscillator_spec();
  CHECK(p.invariant.ic.at(0).value == 1.0);
  CHECK(p.invariant.ic.at(1).value == 1.0);
  CHECK(p.invariant.reconstruct(0.0, std::vector<double>{1.0, 1.0}).u[0] == 1.0);
  CHECK(p.exact(0.0)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.vanilla.hi == 10.0);

  // the reconstruction map turns the (alpha, beta) ODE into u_tt + u = sin(t^a):
  // integrate the invariant system and compare against the vanilla reference
  Eigen::VectorXd y0(2);
  y0 << 1, 1;
  const auto tr = rk4_solve(p.invariant_rhs, y0, 0.0, 10.0, 100000);
  for (double t : {1.0, 5.0, 10.0}) {
    const auto i = static_cast<std::size_t>(std::llround(t * 10000));
    const auto s = tr.state(i);
    const double u = p.invariant.reconstruct(t, {s.data(), 2}).u[0];
    CHECK(std::abs(u - p.exact(t)[0]) < 1e-6);
  }
}

TEST_CASE("exponential problem") {
  const auto p = exponential_spec();
  const double c1 = std::exp(-5.0);
  CHECK(p.vanilla.ic.at(0).value == doctest::Approx(-5.0 * c1).epsilon(1e-15));
  CHECK(p.vanilla.ic.at(1).value == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(p.invariant.ic.at(0).value == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(p.invariant.ic.at(1).value == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(p.invariant.lo == 0.0);
  CHECK(p.invariant.hi == doctest::Approx(5.696510491782079).epsilon(1e-14));
  CHECK(p.vanilla.hi == 2.0);
  CHECK(p.exact(2.0)[0] == doctest::Approx(-0.6022859656579078).epsilon(1e-14));

  // the parametric map hits t = 2 at H_f and is increasing on the interval
  const auto at_end = p.invariant.exact_outputs(Jet3::constant(p.invariant.hi));
  const auto rec = p.invariant.reconstruct(p.invariant.hi, std::vector<double>{at_end[0][0], at_end[1][0]});
  CHECK(rec.t == doctest::Approx(2.0).epsilon(1e-13));
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double h = p.invariant.hi * i / 200.0;
    const auto o = p.invariant.exact_outputs(Jet3::constant(h));
    const double t = p.invariant.reconstruct(h, std::vector<double>{o[0][0], o[1][0]}).t;
    CHECK(t > prev);
    prev = t;
  }
  CHECK(p.invariant.reconstruct(0.0, std::vector<double>{-5.0, -5.0}).t == 0.0);
}

TEST_CASE("system problem") {
  const auto p = system_spec();
  const double c = p.constants.at("c");
  // c sqrt(2/pi) = e^{1/2}
  CHECK(c * std::sqrt(2.0 / pi) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
  CHECK(p.exact(0.0)[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.exact(0.0)[0] == doctest::Approx(1.0).epsilon(1e-15));
  // frozen values of the closed form
  CHECK(p.exact(0.5)[0] == doctest::Approx(1.2250530920458986).epsilon(1e-13));
  CHECK(p.exact(1.0)[1] == doctest::Approx(1.5616593588061344).epsilon(1e-13));
  CHECK(p.exact(2.0)[0] == doctest::Approx(3.3185171918859593).epsilon(1e-13));

  // alpha = exp(-t - t^2/2) equals c sqrt(2/pi) exp(-(t+1)^2/2)
  for (double t = 0.0; t <= 2.0; t += 0.25) {
    CHECK(std::exp(-t - t * t / 2) ==
          doctest::Approx(c * std::sqrt(2.0 / pi) * std::exp(-(t + 1) * (t + 1) / 2)).epsilon(1e-14));
  }

  // reconstructed (u, v) from the analytic frame satisfies the original system
  for (int i = 0; i < 50; ++i) {
    const double t = 2.0 * i / 49.0;
    const auto o = p.invariant.exact_outputs(Jet3::variable(t));
    const Jet3 u = o[0] + Jet3::variable(t) * o[1];
    const Jet3& v = o[1];
    CHECK(std::abs(u[1] + u[0] - (t + 1) * v[0]) < 1e-9);
    CHECK(std::abs(v[1] - u[0] + t * v[0]) < 1e-9);
  }
}

TEST_CASE("exact outputs annihilate the residuals of every formulation") {
  for (const auto& name : problem_names()) {
    const auto p = get_problem(name);
    for (auto kind : {FormulationKind::Invariant, FormulationKind::Vanilla}) {
      const Formulation& f = p.formulation(kind);
      if (!f.exact_outputs) continue;  // oscillator has no closed form
      std::vector<double> pts;
      for (int i = 0; i < 60; ++i) {
        const double x = f.lo + (f.hi - f.lo) * (i + 0.5) / 60.0;
        if (name == "schwarz" && std::abs(x - pi / 2) < 0.1) continue;
        pts.push_back(x);
      }
      const JetField exact = [&](double x) { return f.exact_outputs(Jet3::variable(x)); };
      const auto loss = evaluate_loss(f, pts, exact, 1.0);
      INFO(name << " " << to_string(kind));
      CHECK(loss.equation_loss < 1e-10);
      CHECK(loss.ic_loss < 1e-20);
    }
  }
}

TEST_CASE("reconstruction consistency for all five problems") {
  for (const auto& name : problem_names()) {
    const auto p = get_problem(name);
    const double err = reconstruction_error(p, name == "oscillator" ? 100000 : 20000);
    INFO(name << " max error " << err);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("registry") {
  CHECK(problem_names().size() == 5);
  CHECK_THROWS_AS(get_problem("lorenz"), std::invalid_argument);
  CHECK(parse_formulation("vanilla") == FormulationKind::Vanilla);
  CHECK_THROWS_AS(parse_formulation("both"), std::invalid_argument);
  for (const auto& name : problem_names()) {
    const auto p = get_problem(name);
    CHECK(p.name == name);
    CHECK(p.solution_dim == p.exact(p.vanilla.lo).size());
    // both formulations reconstruct to the same initial solution
    const auto y0 = initial_state(p.invariant);
    const auto rec = p.invariant.reconstruct(p.invariant.lo, y0);
    const auto ref = p.exact(rec.t);
    for (std::size_t c = 0; c < ref.size(); ++c) CHECK(rec.u[c] == doctest::Approx(ref[c]).epsilon(1e-12));
  }
}
