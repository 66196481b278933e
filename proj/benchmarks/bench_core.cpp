#include <benchmark/benchmark.h>

#include <random>

#include "mlopt/grid_transfer.hpp"
#include "mlopt/quadratic_problem.hpp"
#include "mlopt/solver.hpp"
#include "mlopt/tomography.hpp"

using namespace mlopt;

namespace {

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

static void BM_Restrict(benchmark::State& state) {
  const Grid2D grid(int(state.range(0)));
  const TransferPair t = build_full_weighting(grid);
  const Vector v = random_vector(grid.size(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(t.restrict(v));
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_Restrict)->Arg(64)->Arg(256)->Arg(1024);

static void BM_Prolong(benchmark::State& state) {
  const Grid2D grid(int(state.range(0)));
  const TransferPair t = build_full_weighting(grid);
  const Vector v = random_vector(t.coarse_dim(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(t.prolong(v));
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_Prolong)->Arg(64)->Arg(256)->Arg(1024);

static void BM_BuildProjector(benchmark::State& state) {
  const Grid2D grid(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_projector(grid, 0.1));
}
BENCHMARK(BM_BuildProjector)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ProjectorApply(benchmark::State& state) {
  const Grid2D grid(int(state.range(0)));
  const Projector p = build_projector(grid, 0.1);
  const Vector x = random_vector(grid.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(Vector(p.a * x));
  state.counters["nnz"] = double(p.a.nonZeros());
}
BENCHMARK(BM_ProjectorApply)->Arg(64)->Arg(256);

static void BM_HuberGradient(benchmark::State& state) {
  TomographySetup s;
  s.side = int(state.range(0));
  s.levels = 1;
  const TomographyProblem p = build_huber_tv_problem(s);
  const Objective& f = p.hierarchy.raw_objective(LevelIndex(0));
  const Vector y = random_vector(f.dim(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(y));
}
BENCHMARK(BM_HuberGradient)->Arg(64)->Arg(256);

static void BM_MultilevelStep(benchmark::State& state) {
  TomographySetup s;
  s.side = int(state.range(0));
  s.levels = 3;
  const TomographyProblem p = build_huber_tv_problem(s);
  SolverConfig c;
  c.levels = 3;
  c.record_wall_time = false;
  MultilevelSolver solver(p.hierarchy, c);
  SolverState st = solver.initial_state(p.y0);
  for (auto _ : state) {
    if (st.k >= 50) {
      state.PauseTiming();
      st = solver.initial_state(p.y0);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(solver.step(st));
  }
}
BENCHMARK(BM_MultilevelStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_QuadraticSolve(benchmark::State& state) {
  const QuadraticProblem q = build_quadratic_problem({int(state.range(0)), 3, 1});
  SolverConfig c;
  c.levels = 3;
  c.coarse_solver = CoarseSolve::exact_quadratic;
  c.tol_rel = 1e-8;
  c.max_outer = 2000;
  c.record_wall_time = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_multilevel(q.y0, q.hierarchy, c));
}
BENCHMARK(BM_QuadraticSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
