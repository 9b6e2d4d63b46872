#include <benchmark/benchmark.h>

#include "fcba/allocation_solver.hpp"
#include "fcba/experiment.hpp"

#ifdef FCBA_HAVE_OPENMP
#include <omp.h>
#endif

using namespace fcba;

namespace {

ExperimentConfig config(std::int64_t k, const char* policy) {
  ExperimentConfig c;
  c.generator.k = static_cast<std::size_t>(k);
  c.policies = {Policy::parse(policy)};
  c.budget = 10 * k;
  c.macro_reps = 200;
  c.seed = 1;
  return c;
}

void BM_ExperimentSerial(benchmark::State& state, const char* policy) {
  const auto c = config(state.range(0), policy);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(c));
  state.SetItemsProcessed(state.iterations() * c.macro_reps);
}

void BM_ExperimentParallel(benchmark::State& state, const char* policy) {
  const auto c = config(state.range(0), policy);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, threads));
  state.SetItemsProcessed(state.iterations() * c.macro_reps);
}

void thread_args(benchmark::internal::Benchmark* b) {
  int max_threads = 1;
#ifdef FCBA_HAVE_OPENMP
  max_threads = omp_get_max_threads();
#endif
  for (std::int64_t k : {10, 50})
    for (int t = 1; t <= max_threads; t *= 2) b->Args({k, t});
}

void BM_SolveVEll(benchmark::State& state) {
  InstanceSpec s;
  s.k = static_cast<std::size_t>(state.range(0));
  const auto inst = generate_instance(s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_v_ell(inst, 1000.0, 0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ExperimentSerial, ocba, "OCBA")->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ExperimentParallel, ocba, "OCBA")->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ExperimentSerial, fcba0, "FCBA0")->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ExperimentParallel, fcba0, "FCBA0")->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveVEll)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
