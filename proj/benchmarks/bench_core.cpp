#include <benchmark/benchmark.h>

#include <numbers>

#include "ipinn/adjoint.hpp"
#include "ipinn/training.hpp"

using namespace ipinn;

static void BM_JetTanh(benchmark::State& state) {
  Jet3 x{0.3, 1.1, -0.4, 0.2};
  for (auto _ : state) {
    x = tanh(x) + 0.3;
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_JetTanh);

static void BM_PointForward(benchmark::State& state) {
  const auto p = init_mlp(MlpLayout{1, 5, 40, 4}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(p, Jet3::variable(0.7)));
}
BENCHMARK(BM_PointForward);

// Batched forward over n points at the given derivative order.
static void BM_BatchForward(benchmark::State& state) {
  const auto p = init_mlp(MlpLayout{1, 5, 40, 4}, 0);
  const auto xs = sample_collocation(0.0, std::numbers::pi, static_cast<std::size_t>(state.range(0)), 1);
  const int order = static_cast<int>(state.range(1));
  for (auto _ : state) {
    MlpBatch batch(p, xs, order);
    benchmark::DoNotOptimize(batch.output(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchForward)->Args({200, 1})->Args({200, 3})->Args({500, 0});

// One training epoch's worth of work: loss, tape, backward.
static void BM_LossAndGradient(benchmark::State& state) {
  const auto& name = problem_names()[static_cast<std::size_t>(state.range(0))];
  const auto problem = get_problem(name);
  const auto kind = state.range(1) == 0 ? FormulationKind::Invariant : FormulationKind::Vanilla;
  const Formulation& f = problem.formulation(kind);
  const auto p = init_mlp(MlpLayout{1, 5, 40, f.output_dim()}, 0);
  const auto pts = sample_collocation(f.lo, f.hi, 200, 0);
  state.SetLabel(name + "/" + to_string(kind));
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(p, f, pts, 1.0));
}
BENCHMARK(BM_LossAndGradient)->ArgsProduct({{0, 1, 2, 3, 4}, {0, 1}})->Unit(benchmark::kMicrosecond);

static void BM_AdamStep(benchmark::State& state) {
  auto p = init_mlp(MlpLayout{1, 5, 40, 4}, 0);
  std::vector<double> g(p.size(), 1e-3);
  AdamState s(p.size());
  for (auto _ : state) adam_step(p.flat(), g, s, 1e-3);
}
BENCHMARK(BM_AdamStep);
BENCHMARK_MAIN();
