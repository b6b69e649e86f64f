#include <benchmark/benchmark.h>

#include "qee/criterion.hpp"
#include "qee/oracle.hpp"
#include "qee/rng.hpp"
#include "qee/witness.hpp"

namespace {

using namespace qee;

void BM_HermitianEig(benchmark::State& state) {
  Rng rng(1);
  const ComplexMatrix h = random_hermitian(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->RangeMultiplier(2)->Range(4, 128);

void BM_ConditionalEvolution(benchmark::State& state) {
  const GeneratedModel g =
      build_random_model(static_cast<std::size_t>(state.range(0)), ModelClass::generic, 2);
  const EnvironmentState env = analyze_environment(g.rho_env);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_evolution(g.model, env, 1.0));
}
BENCHMARK(BM_ConditionalEvolution)->RangeMultiplier(2)->Range(4, 128);

void BM_Verdict(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GeneratedModel g = build_random_model(n, ModelClass::generic, 3);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const ConditionalEvolution cond = conditional_evolution(g.model, env, 1.0);
  const QubitState q = QubitState::plus();
  for (auto _ : state) benchmark::DoNotOptimize(verdict(q, env, cond));
}
BENCHMARK(BM_Verdict)->RangeMultiplier(2)->Range(2, 64);

void BM_VerdictSeparable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GeneratedModel g = build_random_model(n, ModelClass::block_preserving, 4);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const ConditionalEvolution cond = conditional_evolution(g.model, env, 1.0);
  const QubitState q = QubitState::plus();
  for (auto _ : state) benchmark::DoNotOptimize(verdict(q, env, cond));
}
BENCHMARK(BM_VerdictSeparable)->RangeMultiplier(2)->Range(2, 64);

void BM_LabFrameWitness(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GeneratedModel g = build_random_model(n, ModelClass::random_unitary, 5);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q = QubitState::plus();
  for (auto _ : state) benchmark::DoNotOptimize(env_change_witness(g.model, q, env, 1.0));
}
BENCHMARK(BM_LabFrameWitness)->RangeMultiplier(2)->Range(2, 32);

void BM_BatteryChunk(benchmark::State& state) {
  oracle::BatteryOptions opt;
  opt.count = 30;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(oracle::equivalence_battery(opt));
  state.SetItemsProcessed(state.iterations() * 120);
}
BENCHMARK(BM_BatteryChunk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
