#include <benchmark/benchmark.h>

#include <numeric>

#include "biharm/adapt.hpp"

using namespace biharm;

namespace {

void BM_AssembleStiffness(benchmark::State& state) {
  const DgSpace space(Mesh::unit_square(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(space, {}));
  state.counters["dofs"] = static_cast<double>(space.dim());
}
BENCHMARK(BM_AssembleStiffness)->Args({3, 2})->Args({5, 2})->Args({3, 3})->Unit(benchmark::kMillisecond);

void BM_EllipticSolve(benchmark::State& state) {
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(static_cast<int>(state.range(0))), 2);
  const EllipticOperator op(space, {});
  const SpaceFunction f = [](Point p) { return p.x * (1 - p.x) * p.y; };
  for (auto _ : state) benchmark::DoNotOptimize(solve_elliptic(op, f));
}
BENCHMARK(BM_EllipticSolve)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_EllipticEstimator(benchmark::State& state) {
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(static_cast<int>(state.range(0))), 2);
  const EllipticOperator op(space, {});
  const SpaceFunction f = [](Point p) { return p.x * (1 - p.x) * p.y; };
  const FeFunction u = solve_elliptic(op, f);
  for (auto _ : state) benchmark::DoNotOptimize(elliptic_estimate(u, f, op.penalty()).total());
}
BENCHMARK(BM_EllipticEstimator)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Bisection(benchmark::State& state) {
  const Mesh m = Mesh::unit_square(static_cast<int>(state.range(0)));
  std::vector<int> marked(m.n_elements() / 10);
  std::iota(marked.begin(), marked.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(bisect(m, marked));
}
BENCHMARK(BM_Bisection)->Arg(4)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_TimeStep(benchmark::State& state) {
  const Problem p = Problem::manufactured(solution_u1());
  Discretization d;
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(static_cast<int>(state.range(0))), 2);
  const Evolution evo(p, d, l2_project(space, p.initial), 0.0);
  for (auto _ : state) {
    const SolvedStep s = evo.solve(evo.mesh(), 0.01);
    benchmark::DoNotOptimize(evo.estimate(s));
  }
}
BENCHMARK(BM_TimeStep)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
