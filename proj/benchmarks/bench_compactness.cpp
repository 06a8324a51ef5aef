#include <benchmark/benchmark.h>

#include "orbitlab/families.hpp"

namespace {

using namespace orbitlab;

void BM_GreedyNetExample1(benchmark::State& state) {
  const Example1Operator op(1.0);
  const std::size_t horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    PointFamily fam = example1_orbit_family(op, horizon);  // fresh cache per run
    benchmark::DoNotOptimize(greedy_net(fam, 1.0, horizon, 512));
  }
}
BENCHMARK(BM_GreedyNetExample1)->Arg(256)->Arg(1024);

void BM_VerdictDiagonalOrbit(benchmark::State& state) {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  AnalysisConfig cfg;
  cfg.horizons = {256, 512, 1024};
  for (auto _ : state) {
    PointFamily fam = diagonal_orbit_family(op, ones, cfg.horizons.back());
    benchmark::DoNotOptimize(verdict(fam, cfg));
  }
}
BENCHMARK(BM_VerdictDiagonalOrbit);

}  // namespace
