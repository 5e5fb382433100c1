// Serial references against the OpenMP kernels: vertex batch solves, lemma
// pair verification and the p sweep.
#include <benchmark/benchmark.h>

#include "lpoa/analysis.hpp"
#include "lpoa/experiment.hpp"

namespace {

using namespace lpoa;

// Vertices of an intermediate outer approximation of example1-q3.
const std::vector<Vector>& batch_vertices() {
  static const std::vector<Vector> verts = [] {
    RunConfig cfg;
    cfg.problem_key = "example1-q3";
    cfg.epsilon = 1e-3;
    cfg.max_iterations = 20;
    return run(cfg).final_polytope->vertices();
  }();
  return verts;
}

const std::vector<DeviationPair>& bench_pairs() {
  static const std::vector<DeviationPair> pairs = [] {
    RunConfig cfg;
    cfg.problem_key = "example1-q3";
    cfg.epsilon = 0.01;
    cfg.record_pairs = true;
    return build_deviation_pairs(run(cfg).support_pairs, 0.1);
  }();
  return pairs;
}

void BM_SolveBatchSerial(benchmark::State& state) {
  const auto prob = make_problem("example1-q3");
  const NormExponent ne(2.0);
  for (auto _ : state) {
    SubproblemCache cache;
    benchmark::DoNotOptimize(solve_batch_serial(prob, batch_vertices(), ne, {}, cache));
  }
  state.counters["vertices"] = static_cast<double>(batch_vertices().size());
}
BENCHMARK(BM_SolveBatchSerial)->Unit(benchmark::kMillisecond);

void BM_SolveBatchParallel(benchmark::State& state) {
  const auto prob = make_problem("example1-q3");
  const NormExponent ne(2.0);
  for (auto _ : state) {
    SubproblemCache cache;
    benchmark::DoNotOptimize(solve_batch(prob, batch_vertices(), ne, {}, cache));
  }
  state.counters["vertices"] = static_cast<double>(batch_vertices().size());
}
BENCHMARK(BM_SolveBatchParallel)->Unit(benchmark::kMillisecond);

void BM_SeparationSerial(benchmark::State& state) {
  const auto lc = make_lemma_constants(NormExponent(2.0), 3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_separation(bench_pairs(), lc, Execution::Serial));
  state.counters["pairs"] = static_cast<double>(bench_pairs().size());
}
BENCHMARK(BM_SeparationSerial)->Unit(benchmark::kMillisecond);

void BM_SeparationParallel(benchmark::State& state) {
  const auto lc = make_lemma_constants(NormExponent(2.0), 3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_separation(bench_pairs(), lc, Execution::Parallel));
  state.counters["pairs"] = static_cast<double>(bench_pairs().size());
}
BENCHMARK(BM_SeparationParallel)->Unit(benchmark::kMillisecond);

SweepOptions small_sweep() {
  SweepOptions opt;
  opt.problem_key = "example1-q2";
  opt.p_values = {1.5, 2.0, 3.0, 4.0};
  opt.epsilon = 1e-3;
  opt.jobs = 4;
  return opt;
}

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(small_sweep()));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_SweepParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(small_sweep()));
}
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
