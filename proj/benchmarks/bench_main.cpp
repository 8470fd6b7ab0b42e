#include <benchmark/benchmark.h>

#include <random>

#include "thermvisc/config.hpp"
#include "thermvisc/materials.hpp"
#include "thermvisc/operators.hpp"
#include "thermvisc/solver.hpp"

using namespace thermvisc;

namespace {

SimConfig tg_config(int d, int n) {
  SimConfig c;
  c.grid.d = d;
  c.grid.n = n;
  c.initial.velocity = "taylor_green";
  c.initial.theta = "bump";
  return c;
}

void BM_ThetaStar(benchmark::State& st) {
  const MaterialTable m = reference_material();
  const EnergyInversion inv(m, EpsilonSet{});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e(0.1, 10.0), psi(0.0, 5.0);
  double acc = 0.0;
  for (auto _ : st) acc += inv.theta_star_psi(e(rng), psi(rng));
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ThetaStar);

template <int D>
void BM_Rates(benchmark::State& st) {
  Solver<D> sol(tg_config(D, static_cast<int>(st.range(0))));
  const State<D> s = sol.initial_state().state;
  typename Solver<D>::Rates r;
  for (auto _ : st) {
    sol.rates(s, r);
    benchmark::DoNotOptimize(r.v.raw().data());
  }
}
BENCHMARK(BM_Rates<2>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_Rates<3>)->Arg(16)->Arg(32);

template <int D>
void BM_Projection(benchmark::State& st) {
  const Grid<D> g(static_cast<int>(st.range(0)), 1.0);
  SpectralSolver<D> sp(g);
  Field v(D, g.npts());
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (double& x : v.raw()) x = nd(rng);
  for (auto _ : st) {
    sp.project(v);
    benchmark::DoNotOptimize(v.raw().data());
  }
}
BENCHMARK(BM_Projection<2>)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Projection<3>)->Arg(32)->Arg(64);

template <int D>
void BM_Step(benchmark::State& st) {
  SimConfig c = tg_config(D, static_cast<int>(st.range(0)));
  c.stepper = st.range(1) ? Stepper::imex : Stepper::explicit_rk2;
  Solver<D> sol(c);
  State<D> s = sol.initial_state().state;
  const double dt = sol.stable_dt(s);
  for (auto _ : st) sol.step(s, dt);
}
BENCHMARK(BM_Step<2>)->Args({64, 0})->Args({64, 1})->Args({128, 0});
BENCHMARK(BM_Step<3>)->Args({16, 0})->Args({32, 0});

}  // namespace
BENCHMARK_MAIN();
