#include <benchmark/benchmark.h>

#include "orbitlab/operators.hpp"
#include "orbitlab/seqspace.hpp"

namespace {

using namespace orbitlab;

void BM_DistInterval(benchmark::State& state) {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(static_cast<std::size_t>(state.range(0)));
  const SeqVec a = apply_power(op, 17, ones);
  const SeqVec b = apply_power(op, 4096, ones);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist_interval(a, b));
  }
}
BENCHMARK(BM_DistInterval)->Arg(48)->Arg(120);

void BM_DiagonalPowerVector(benchmark::State& state) {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(static_cast<std::size_t>(state.range(0)));
  std::int64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonal_power_vector(op, ones, k));
    k = k * 3 + 1;
    if (k > (std::int64_t(1) << 60)) k = 1;
  }
}
BENCHMARK(BM_DiagonalPowerVector)->Arg(48)->Arg(120);

void BM_Example1ClosedForm(benchmark::State& state) {
  const Example1Operator op(1.0);
  std::int64_t p = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(example1_orbit_distance(op, p, 2 * p + 1));
    p = (p + 97) % (1 << 20);
  }
}
BENCHMARK(BM_Example1ClosedForm);

}  // namespace
