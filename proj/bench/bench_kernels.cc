// Copyright 2026 The Pandora Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels against their serial references. Run with
// PANDORA_THREADS or OMP_NUM_THREADS to vary the thread count.

#include <benchmark/benchmark.h>

#include "pandora/instance.h"
#include "pandora/oracle.h"
#include "pandora/policies.h"
#include "pandora/relaxation.h"
#include "pandora/rng.h"
#include "pandora/verify.h"

namespace {

using namespace pandora;

PandoraInstance bench_instance(std::size_t boxes) {
  RandomStream rng(7, boxes, kGeneratorStream);
  return random_instance(boxes, 6, {1.0, 2.0}, {0.0, 5.0}, 0.3, rng);
}

struct Fixture {
  SolveResult solved;
  Fixture() {
    SolverOptions o;
    o.iterations = 200;
    solved = solve_cp(bench_instance(5), o);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Oracle(benchmark::State& state) {
  const auto inst = bench_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_partially_adaptive(inst));
}

void BM_OracleSerial(benchmark::State& state) {
  const auto inst = bench_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_partially_adaptive_serial(inst));
}

void BM_EvaluatePolicy(benchmark::State& state) {
  const auto& f = fixture();
  const PolicyRunner runner(f.solved.discretized.rounded, f.solved.solution, PolicySpec{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_per_scenario(runner, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_EvaluatePolicySerial(benchmark::State& state) {
  const auto& f = fixture();
  const PolicyRunner runner(f.solved.discretized.rounded, f.solved.solution, PolicySpec{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_per_scenario_serial(runner, static_cast<std::size_t>(state.range(0)), 1));
  }
}

FScanSpec scan_spec(std::int64_t steps) {
  FScanSpec spec;
  spec.c_max = 100.0;
  spec.beta_max = 100.0;
  spec.steps = static_cast<std::size_t>(steps);
  return spec;
}

void BM_ScanF(benchmark::State& state) {
  const auto spec = scan_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_F(spec));
}

void BM_ScanFSerial(benchmark::State& state) {
  const auto spec = scan_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_F_serial(spec));
}

void BM_GoodBad(benchmark::State& state) {
  const auto& f = fixture();
  const auto& d = f.solved.discretized;
  const auto alloc = derive_allocation(f.solved.solution, scenario_shifts(d, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(good_bad_experiment(
        d, f.solved.solution, alloc, 0, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_GoodBadSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto& d = f.solved.discretized;
  const auto alloc = derive_allocation(f.solved.solution, scenario_shifts(d, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(good_bad_experiment_serial(
        d, f.solved.solution, alloc, 0, static_cast<std::size_t>(state.range(0)), 1));
  }
}

}  // namespace

BENCHMARK(BM_Oracle)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OracleSerial)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluatePolicy)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluatePolicySerial)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanF)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanFSerial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GoodBad)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GoodBadSerial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
