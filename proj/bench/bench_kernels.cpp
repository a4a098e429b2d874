// Serial reference vs OpenMP for the two data-parallel kernels.
#include <benchmark/benchmark.h>

#include "cspi/gaussian_oracle.hpp"
#include "cspi/hs_engine.hpp"

using namespace cspi;

namespace {

const NormalHamiltonian kDeep = NormalHamiltonian::bose_hubbard(-1.0, 1.0);

void monte_carlo(benchmark::State& state, kernels::Execution exec) {
  HsOptions opt;
  opt.execution = exec;
  const TimeGrid grid(1.0, 64);
  for (auto _ : state) {
    const auto est = hs_partition_mc(kDeep, grid, OrderingIndex::normal(),
                                     SliceFactorScheme::ExactProduct, state.range(0), 7, opt);
    benchmark::DoNotOptimize(est.value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void tensor_grid(benchmark::State& state, kernels::Execution exec) {
  QuadratureSpec spec;
  spec.scheme = QuadratureScheme::TensorGrid;
  spec.nodes = static_cast<int>(state.range(0));
  spec.execution = exec;
  spec.tol = 1.0;  // timing only: accept whatever the doubling checks find
  const TimeGrid grid(1.0, 1);
  for (auto _ : state) {
    const auto est = quadrature_partition_small_n(kDeep, grid, spec);
    benchmark::DoNotOptimize(est.value);
  }
}

void hs_expectation(benchmark::State& state, kernels::Execution exec) {
  HsOptions opt;
  opt.execution = exec;
  opt.nodes = static_cast<int>(state.range(0));
  const TimeGrid grid(1.0, 3);
  for (auto _ : state) {
    const auto est = hs_expectation_quadrature(kDeep, grid, OrderingIndex::normal(),
                                               SliceFactorScheme::ItoCorrected, 1e-8, opt);
    benchmark::DoNotOptimize(est.value);
  }
}

}  // namespace

BENCHMARK_CAPTURE(monte_carlo, serial, kernels::Execution::Serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(monte_carlo, openmp, kernels::Execution::Parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tensor_grid, serial, kernels::Execution::Serial)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tensor_grid, openmp, kernels::Execution::Parallel)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(hs_expectation, serial, kernels::Execution::Serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(hs_expectation, openmp, kernels::Execution::Parallel)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
