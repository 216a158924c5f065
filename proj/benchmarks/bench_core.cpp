#include <benchmark/benchmark.h>

#include "nlqm/dsl.hpp"
#include "nlqm/energy.hpp"
#include "nlqm/evolve.hpp"
#include "nlqm/models.hpp"
#include "nlqm/states.hpp"
#include "nlqm/variational.hpp"

using namespace nlqm;

namespace {

Grid grid_of(const benchmark::State& state) {
  return make_grid(-16, 16, static_cast<std::size_t>(state.range(0)));
}

void BM_Parse(benchmark::State& state) {
  const std::string text = lstar().density_text;
  for (auto _ : state) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_Parse);

void BM_EvaluateDensity(benchmark::State& state) {
  const Grid g = grid_of(state);
  const MadelungField s = reference_gaussian(g);
  const ModelSpec m = homogeneous_general();
  const DensityExpr e = m.density();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(e, m.params, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateDensity)->Arg(513)->Arg(2049)->Arg(8193);

void BM_EulerLagrange(benchmark::State& state) {
  const Grid g = grid_of(state);
  const MadelungField s = reference_gaussian(g);
  const ModelSpec m = lstar();
  for (auto _ : state) {
    benchmark::DoNotOptimize(el_derivative(m, Field::R, s));
    benchmark::DoNotOptimize(el_derivative(m, Field::S, s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerLagrange)->Arg(513)->Arg(2049)->Arg(8193);

void BM_EnergyReport(benchmark::State& state) {
  const Grid g = grid_of(state);
  const MadelungField s = coherent({1.0, 0.0, 1.0, 1.0, 0.7}, g);
  const ScalarField V = sho_potential(g);
  const ModelSpec m = staruszkiewicz();
  for (auto _ : state) benchmark::DoNotOptimize(energy_report(m, s, V));
}
BENCHMARK(BM_EnergyReport)->Arg(513)->Arg(2049)->Arg(8193);

void BM_HomogeneityDefect(benchmark::State& state) {
  const Grid g = grid_of(state);
  const MadelungField s = reference_gaussian(g);
  const ModelSpec m = homogeneous_general();
  for (auto _ : state) benchmark::DoNotOptimize(homogeneity_defect(m, s));
}
BENCHMARK(BM_HomogeneityDefect)->Arg(2049);

void BM_Gateaux(benchmark::State& state) {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  const ModelSpec m = q3();
  const DensityExpr e = m.density();
  const std::size_t j = probe_nodes(s).front();
  for (auto _ : state) benchmark::DoNotOptimize(gateaux(e, m.params, Field::R, s, j, 1e-6));
}
BENCHMARK(BM_Gateaux);

void BM_EvolveStep(benchmark::State& state) {
  const Grid g = grid_of(state);
  EvolutionConfig c;
  c.dt = 1e-5;
  const Evolver ev(phase_power(0.01, 2), g, c);
  MadelungField s = gaussian({1.0, 0.0, 0.0, 0.1}, g);
  for (auto _ : state) {
    s = ev.step(s);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvolveStep)->Arg(513)->Arg(2049);

}  // namespace

BENCHMARK_MAIN();
