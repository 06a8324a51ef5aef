#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "orbitlab/jdlg.hpp"
#include "orbitlab/operators.hpp"
#include "orbitlab/random.hpp"

using namespace orbitlab;

namespace {

Eigen::MatrixXcd random_unitary(Rng& rng, int dim) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian_complex();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0));
  }
  return q;
}

Eigen::MatrixXcd random_similarity(Rng& rng, int dim, double cond) {
  const Eigen::MatrixXcd q1 = random_unitary(rng, dim);
  const Eigen::MatrixXcd q2 = random_unitary(rng, dim);
  Eigen::VectorXd sv(dim);
  for (int i = 0; i < dim; ++i) sv(i) = rng.uniform(1.0 / std::sqrt(cond), std::sqrt(cond));
  return q1 * sv.asDiagonal() * q2.adjoint();
}

double max_principal_angle(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qa(a), qb(b);
  const Eigen::MatrixXcd qa_t = qa.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXcd qb_t = qb.householderQ() * Eigen::MatrixXcd::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(qa_t.adjoint() * qb_t);
  return std::acos(std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0));
}

}  // namespace

TEST_CASE("check_power_bounded: identity") {
  const SpectralSplit split = check_power_bounded(MatrixOperator(
      Eigen::MatrixXcd::Identity(3, 3)));
  REQUIRE(split.peripheral.size() == 1);
  CHECK(split.peripheral[0].algebraic_multiplicity == 3);
  CHECK(split.peripheral[0].geometric_multiplicity == 3);
  CHECK(split.stable_spectral_radius == 0.0);
}

TEST_CASE("check_power_bounded: Jordan block rejected") {
  Eigen::MatrixXcd j(2, 2);
  j << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_WITH_AS(check_power_bounded(MatrixOperator(j)),
                       doctest::Contains("defective"), Error);
}

TEST_CASE("check_power_bounded: near-nilpotent residual is ambiguous") {
  Eigen::MatrixXcd j(2, 2);
  j << Complex(1, 0), Complex(1e-8, 0), Complex(0, 0), Complex(1, 0);
  try {
    check_power_bounded(MatrixOperator(j));
    FAIL("expected TOL_AMBIGUOUS");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TolAmbiguous);
  }
}

TEST_CASE("check_power_bounded: spectral radius above the disk") {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(2, 2) * Complex(1.001, 0.0);
  try {
    check_power_bounded(MatrixOperator(t));
    FAIL("expected NOT_POWER_BOUNDED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPowerBounded);
  }
}

TEST_CASE("check_power_bounded: construct-then-recover spectrum") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = std::polar(1.0, theta);
    d(1, 1) = Complex(0.3, 0.0);
    d(2, 2) = Complex(0.7, 0.0);
    const Eigen::MatrixXcd s = random_similarity(rng, 3, 5.0);
    const SpectralSplit split = check_power_bounded(MatrixOperator(s * d * s.inverse()));
    REQUIRE(split.peripheral.size() == 1);
    CHECK(std::abs(split.peripheral[0].lambda - d(0, 0)) <= 1e-7);
    CHECK(split.stable_spectral_radius == doctest::Approx(0.7).epsilon(1e-8));
  }
}

TEST_CASE("jdlg_project: diagonal spectrum gives the coordinate projection") {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
  t(0, 0) = Complex(1, 0);
  t(1, 1) = Complex(0.5, 0);
  const MatrixJdlgSplit split = jdlg_project(MatrixOperator(t));
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
  expected(0, 0) = Complex(1, 0);
  CHECK((split.P - expected).norm() <= 1e-12);
  CHECK_FALSE(split.doubly_power_bounded);
}

TEST_CASE("jdlg_project: identity") {
  const MatrixJdlgSplit split = jdlg_project(MatrixOperator(
      Eigen::MatrixXcd::Identity(3, 3)));
  CHECK((split.P - Eigen::MatrixXcd::Identity(3, 3)).norm() <= 1e-12);
  CHECK(split.st_basis.cols() == 0);
  CHECK(split.doubly_power_bounded);
  CHECK(split.power_bound.M == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("jdlg_project: construct-then-recover subspaces and projection") {
  Rng rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 2;
    const int s = 1 + static_cast<int>(rng.uniform_index(3));
    const int d = p + s;
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(d, d);
    block.topLeftCorner(p, p) = random_unitary(rng, p);
    Eigen::MatrixXcd n(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) n(i, j) = rng.gaussian_complex();
    block.bottomRightCorner(s, s) = n * (0.4 / std::max(1e-12, n.operatorNorm()));
    const Eigen::MatrixXcd S = random_similarity(rng, d, 8.0);
    const Eigen::MatrixXcd S_inv = S.inverse();
    const MatrixOperator T(S * block * S_inv);

    const MatrixJdlgSplit split = jdlg_project(T);
    CHECK(split.idempotency_residual <= 1e-10);
    CHECK(split.commutation_residual <= 1e-10);

    Eigen::MatrixXcd proj_block = Eigen::MatrixXcd::Zero(d, d);
    proj_block.topLeftCorner(p, p) = Eigen::MatrixXcd::Identity(p, p);
    const Eigen::MatrixXcd P_true = S * proj_block * S_inv;
    CHECK((split.P - P_true).norm() <= 1e-8);

    CHECK(max_principal_angle(split.rv_basis, S.leftCols(p)) <= 1e-7);
    CHECK(max_principal_angle(split.st_basis, S.rightCols(s)) <= 1e-7);
  }
}

TEST_CASE("jdlg_project: stable part decays under the projection complement") {
  Rng rng(107);
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(4, 4);
  block.topLeftCorner(2, 2) = random_unitary(rng, 2);
  Eigen::MatrixXcd n(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n(i, j) = rng.gaussian_complex();
  // Spectral radius pinned to 0.95: the slow-decay end of the contract.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(n, false);
  block.bottomRightCorner(2, 2) = n * (0.95 / es.eigenvalues().cwiseAbs().maxCoeff());
  const Eigen::MatrixXcd S = random_similarity(rng, 4, 6.0);
  const MatrixOperator T(S * block * S.inverse());
  const MatrixJdlgSplit split = jdlg_project(T);
  const Eigen::MatrixXcd IP = Eigen::MatrixXcd::Identity(4, 4) - split.P;
  const Eigen::MatrixXcd T512 = matrix_power(T, 512);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.gaussian_complex();
    CHECK((T512 * (IP * v)).norm() <= 1e-6 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("jdlg_project: doubly power-bounded iff no stable part") {
  Rng rng(109);
  const Eigen::MatrixXcd u = random_unitary(rng, 3);
  const Eigen::MatrixXcd s = random_similarity(rng, 3, 4.0);
  const MatrixJdlgSplit split = jdlg_project(MatrixOperator(s * u * s.inverse()));
  CHECK(split.doubly_power_bounded);
  CHECK(split.st_basis.cols() == 0);
}

TEST_CASE("diagonal_jdlg: mask split for the gallery operator") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const DiagonalJdlgSplit split = diagonal_jdlg(op, 48);
  CHECK(split.doubly_power_bounded);
  CHECK(split.power_bound.M == 1.0);
  CHECK(split.not_all_vectors_aap);
  CHECK(split.probe.verdict == ErgodicityVerdict::NotMeanErgodic);

  // P is the identity on c0 ...
  const SeqVec e3 = SeqVec::basis(48, 3);
  const SeqVec pe3 = project(split, e3);
  CHECK(pe3.head == e3.head);

  // ... including on (T - I) 1, which has exact limit 0 ...
  const SeqVec ones = SeqVec::ones(48);
  const SeqVec d1 = diagonal_power_diff_vector(op, ones, 1, 0);
  const SeqVec pd1 = project(split, d1);
  CHECK(pd1.head == d1.head);

  // ... and undefined at 1 itself (limit 1 != 0).
  CHECK_THROWS_AS(project(split, ones), Error);
}

TEST_CASE("diagonal_jdlg rejects non-unimodular rules") {
  const DiagonalOperator bad = DiagonalOperator::explicit_rule(
      {Complex(0.5, 0.0)}, Complex(1.0, 0.0), 0.1);
  CHECK_THROWS_AS(diagonal_jdlg(bad, 8), Error);
}

TEST_CASE("stable_part_convergence: trivially zero for the diagonal mask") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const DiagonalJdlgSplit split = diagonal_jdlg(op, 16);
  const ConvergenceReport rep = stable_part_convergence(op, split, SeqVec::ones(16), 32, 1e-12);
  CHECK(rep.verdict == ConvergenceVerdict::Converged);
  CHECK(rep.final_residual == 0.0);
}

TEST_CASE("stable_part_convergence: exact geometric decay") {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
  t(0, 0) = Complex(1, 0);
  t(1, 1) = Complex(0.5, 0);
  const MatrixOperator T(t);
  const MatrixJdlgSplit split = jdlg_project(T);
  Eigen::VectorXcd x(2);
  x << Complex(0, 0), Complex(1, 0);
  const ConvergenceReport rep = stable_part_convergence(T, split, x, 32, 1e-6);
  CHECK(rep.verdict == ConvergenceVerdict::Converged);
  for (std::size_t n = 1; n <= rep.residuals.size(); ++n)
    CHECK(rep.residuals[n - 1] == doctest::Approx(std::ldexp(1.0, -int(n))).epsilon(1e-10));
}

TEST_CASE("stable_part_convergence: fitted rate tracks the stable radius") {
  Rng rng(113);
  const double r = 0.8;
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(4, 4);
  block.topLeftCorner(2, 2) = random_unitary(rng, 2);
  block.bottomRightCorner(2, 2) = r * random_unitary(rng, 2);  // radius exactly r
  const Eigen::MatrixXcd S = random_similarity(rng, 4, 5.0);
  const MatrixOperator T(S * block * S.inverse());
  const MatrixJdlgSplit split = jdlg_project(T);
  Eigen::VectorXcd x(4);
  for (int i = 0; i < 4; ++i) x(i) = rng.gaussian_complex();
  const ConvergenceReport rep = stable_part_convergence(T, split, x, 128, 1e-6);
  CHECK(rep.verdict == ConvergenceVerdict::Converged);
  CHECK(std::abs(rep.fitted_rate - r) <= 0.05 * r);
}

TEST_CASE("cesaro_mean: identity-like explicit rule returns x") {
  const DiagonalOperator id = DiagonalOperator::explicit_rule(
      std::vector<Complex>(8, Complex(1.0, 0.0)), Complex(1.0, 0.0), 0.0);
  const SeqVec x = SeqVec::ones(8);
  const SeqVec mean = cesaro_mean(id, x, 64);
  for (std::size_t n = 0; n < 8; ++n) CHECK(mean.head[n] == x.head[n]);
}

TEST_CASE("cesaro_mean: alternating coordinate vanishes at even N") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(8);
  for (const std::uint64_t n : {2u, 4u, 16u, 256u}) {
    const SeqVec mean = cesaro_mean(op, ones, n);
    CHECK(mean.head[0] == Complex(0.0, 0.0));  // exact: a_0^N = 1 for even N
  }
}

TEST_CASE("cesaro_mean: tail limit is exactly one, so the norm floor is 1") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  for (const std::uint64_t n : {16u, 64u, 1024u, 4096u}) {
    const SeqVec mean = cesaro_mean(op, ones, n);
    REQUIRE(mean.tail.kind == TailKind::ConvergentLimit);
    CHECK(mean.tail.limit == Complex(1.0, 0.0));
    CHECK(norm_lower_with_limit(mean) >= 1.0);
  }
}

TEST_CASE("cesaro_mean: closed form equals direct summation") {
  const DiagonalOperator op = DiagonalOperator::dyadic(3);
  const SeqVec ones = SeqVec::ones(32);
  for (const std::uint64_t n : {1u, 2u, 7u, 64u, 1024u}) {
    const SeqVec closed = cesaro_mean(op, ones, n);
    const SeqVec direct = cesaro_mean_direct(op, ones, n);
    for (std::size_t c = 0; c < 32; ++c)
      CHECK(std::abs(closed.head[c] - direct.head[c]) <= 1e-10);
  }
}

TEST_CASE("mean_ergodicity_probe: identity matrix is mean ergodic") {
  const MatrixOperator id(Eigen::MatrixXcd::Identity(3, 3));
  Eigen::VectorXcd x(3);
  x << Complex(1, 0), Complex(0, 2), Complex(-1, 1);
  const ErgodicityReport rep = mean_ergodicity_probe(id, x, {4, 8, 16, 32});
  CHECK(rep.verdict == ErgodicityVerdict::MeanErgodic);
  CHECK(rep.max_pairwise_hi == 0.0);
}

TEST_CASE("mean_ergodicity_probe: dyadic gallery refuses a limit") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  const std::vector<std::uint64_t> n_list{16, 64, 256, 1024, 4096};
  const ErgodicityReport rep = mean_ergodicity_probe(op, ones, n_list);
  CHECK(rep.verdict == ErgodicityVerdict::NotMeanErgodic);
  CHECK(rep.norm_floor >= 1.0);
  CHECK(rep.ker_dim_head == 0);

  // |coordinate 1 of A_N 1| = |i^N - 1| / (N sqrt 2) <= 2 / (N sqrt 2).
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const SeqVec mean = cesaro_mean(op, ones, n_list[i]);
    const double bound = 2.0 / (static_cast<double>(n_list[i]) * std::numbers::sqrt2);
    CHECK(std::abs(mean.head[1]) <= bound + 1e-12);
  }
}

TEST_CASE("mean_ergodicity_probe: rejects malformed N lists") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(8);
  CHECK_THROWS_AS(mean_ergodicity_probe(op, ones, {4, 8, 16}), Error);
  CHECK_THROWS_AS(mean_ergodicity_probe(op, ones, {4, 8, 8, 16}), Error);
}
