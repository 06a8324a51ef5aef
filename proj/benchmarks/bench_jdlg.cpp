#include <benchmark/benchmark.h>

#include <Eigen/QR>

#include "orbitlab/jdlg.hpp"
#include "orbitlab/random.hpp"

namespace {

using namespace orbitlab;

Eigen::MatrixXcd random_power_bounded(Rng& rng, int dim) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian_complex();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd u = qr.householderQ();
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(dim, dim);
  const int p = dim / 2;
  block.topLeftCorner(p, p) = u.topLeftCorner(p, p);  // not unitary; rescale
  Eigen::MatrixXcd up = block.topLeftCorner(p, p);
  block.topLeftCorner(p, p) = up * (1.0 / up.operatorNorm());
  Eigen::MatrixXcd n(dim - p, dim - p);
  for (int i = 0; i < dim - p; ++i)
    for (int j = 0; j < dim - p; ++j) n(i, j) = rng.gaussian_complex();
  block.bottomRightCorner(dim - p, dim - p) = n * (0.5 / n.operatorNorm());
  return block;
}

void BM_JdlgProject(benchmark::State& state) {
  Rng rng(7);
  const int dim = static_cast<int>(state.range(0));
  const MatrixOperator T(random_power_bounded(rng, dim));
  for (auto _ : state) {
    benchmark::DoNotOptimize(jdlg_project(T));
  }
}
BENCHMARK(BM_JdlgProject)->Arg(8)->Arg(16)->Arg(32);

void BM_CesaroClosedForm(benchmark::State& state) {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cesaro_mean(op, ones, 4096));
  }
}
BENCHMARK(BM_CesaroClosedForm);

}  // namespace
