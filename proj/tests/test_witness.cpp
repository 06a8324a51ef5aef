#include <doctest.h>

#include <cmath>
#include <numbers>

#include "orbitlab/families.hpp"
#include "orbitlab/random.hpp"
#include "orbitlab/report_json.hpp"
#include "orbitlab/witness.hpp"

using namespace orbitlab;

namespace {

struct DyadicFixture {
  DiagonalOperator op = DiagonalOperator::dyadic(1);
  DiagonalJdlgSplit split = diagonal_jdlg(op, 48);
  SeqVec x = SeqVec::ones(48);
  WitnessConfig cfg;

  DyadicFixture() {
    cfg.m_target = 8;
    cfg.seed = 7;
  }
};

}  // namespace

TEST_CASE("pbig_extract: dyadic gallery separates with the margin formula") {
  DyadicFixture f;
  const PbigResult pbig = pbig_extract(f.op, f.split, f.x, f.cfg);
  CHECK(pbig.orbit_verdict.verdict == CompactnessClass::NotCompactEvidence);
  CHECK(pbig.diff_verdict.verdict == CompactnessClass::CompactCertified);
  CHECK(pbig.stable_convergence.verdict == ConvergenceVerdict::Converged);
  CHECK(pbig.delta0 == doctest::Approx(0.5 * pbig.orbit_verdict.delta));
  CHECK(pbig.delta == doctest::Approx(0.9 * pbig.delta0));
  CHECK(pbig.delta >= 0.6364);  // the spec's floor, surpassed by the 2-equilateral orbit
  CHECK(pbig.trimmed_prefix == 0);  // I - P = 0: the Cauchy trimming is vacuous
  CHECK(pbig.stream.is_range());
}

TEST_CASE("pbig_extract: compact orbits yield NO_SEPARATION") {
  const MatrixOperator T(Eigen::MatrixXcd::Identity(3, 3));
  const MatrixJdlgSplit split = jdlg_project(T);
  Eigen::VectorXcd x(3);
  x << Complex(1, 0), Complex(0, 1), Complex(2, -1);
  WitnessConfig cfg;
  try {
    pbig_extract(T, split, x, cfg);
    FAIL("expected NO_SEPARATION");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSeparation);
  }
}

TEST_CASE("pbig_extract: mth-root vector leaves the domain of P") {
  // (T - I) 1 has tail limit b - 1 != 0 for b = -1, so the difference orbit
  // cannot be verified a.a.p. and the pipeline refuses.
  const DiagonalOperator op =
      DiagonalOperator::dyadic_with_prefactor(1, RootOfUnity::make(1, 2));
  const DiagonalJdlgSplit split = diagonal_jdlg(op, 48);
  WitnessConfig cfg;
  try {
    pbig_extract(op, split, SeqVec::ones(48), cfg);
    FAIL("expected PROJECTION_UNAVAILABLE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProjectionUnavailable);
  }
}

TEST_CASE("multap_refine: empty list is vacuous") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  IndexStream stream;
  stream.range_end = 1 << 20;
  const MultapResult r = multap_refine(op, {}, stream, 0.25, 7, 1 << 20);
  CHECK(r.status == SearchStatus::Completed);
  REQUIRE(r.refined.size() >= 2);
  CHECK(r.refined[1] - r.refined[0] >= 7);
}

TEST_CASE("multap_refine: zero vectors move nowhere") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  IndexStream stream;
  stream.range_end = 1 << 20;
  const std::vector<SeqVec> zeros{SeqVec::zero(16), SeqVec::zero(16)};
  const MultapResult r = multap_refine(op, zeros, stream, 1e-9, 5, 1 << 20);
  CHECK(r.status == SearchStatus::Completed);
  CHECK(r.achieved_tol == 0.0);
}

TEST_CASE("multap_refine: identity operator on an explicit subsequence") {
  const DiagonalOperator id = DiagonalOperator::explicit_rule(
      std::vector<Complex>(16, Complex(1.0, 0.0)), Complex(1.0, 0.0), 0.0);
  IndexStream stream;
  stream.explicit_list = {0, 3, 6, 9, 12, 15};
  const std::vector<SeqVec> vecs{SeqVec::ones(16)};
  const MultapResult r = multap_refine(id, vecs, stream, 1e-9, 3, 1 << 10);
  CHECK(r.status == SearchStatus::Completed);
  REQUIRE(r.refined.size() >= 2);
  CHECK(r.refined[1] - r.refined[0] >= 3);
  CHECK(r.achieved_tol <= 1e-9);
}

TEST_CASE("multap_refine: dyadic alignment cross-checked by exhaustive scan") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  const std::vector<SeqVec> aap{diagonal_power_diff_vector(op, ones, 1, 0)};
  IndexStream stream;
  stream.range_end = std::uint64_t(1) << 16;
  const double tol = std::ldexp(1.0, -8);
  const MultapResult r = multap_refine(op, aap, stream, tol, 1, stream.range_end);
  REQUIRE(r.status == SearchStatus::Completed);
  REQUIRE(r.refined.size() >= 2);
  const std::uint64_t gap = r.refined[1] - r.refined[0];
  CHECK(r.achieved_tol <= tol);

  // Exhaustive oracle: the returned gap qualifies, and its move matches a
  // direct evaluation over the full scan range.
  auto move_of = [&](std::uint64_t g) {
    const SeqVec moved = apply_power(op, static_cast<std::int64_t>(g), aap[0]);
    return dist_interval(moved, aap[0]).hi;
  };
  CHECK(move_of(gap) <= tol);
  std::uint64_t first_qualifying = 0;
  for (std::uint64_t g = 1; g < (std::uint64_t(1) << 16); ++g) {
    if (move_of(g) <= tol) {
      first_qualifying = g;
      break;
    }
  }
  REQUIRE(first_qualifying > 0);
  // The dyadic schedule finds a gap of the same 2-adic magnitude class.
  CHECK(gap <= 2 * first_qualifying);
}

TEST_CASE("build_k_sequence: m_target 1 stops after the delta/M search") {
  DyadicFixture f;
  f.cfg.m_target = 1;
  const PbigResult pbig = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState state = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig);
  REQUIRE(state.status == SearchStatus::Completed);
  REQUIRE(state.k_seq.size() == 1);
  CHECK(state.norm_lower_bounds[0] > pbig.delta / state.M);
}

TEST_CASE("build_k_sequence: full gallery run with verified residuals") {
  DyadicFixture f;
  const PbigResult pbig = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState state = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig);
  REQUIRE(state.status == SearchStatus::Completed);
  REQUIRE(state.k_seq.size() == 8);

  SUBCASE("exponents strictly increase") {
    for (std::size_t i = 1; i < state.k_seq.size(); ++i)
      CHECK(state.k_seq[i] > state.k_seq[i - 1]);
  }

  SUBCASE("sigma residuals recomputed exhaustively over all F") {
    const SeqVec xw = [&] {
      SeqVec v = f.x;
      v.head.resize(120, Complex(1.0, 0.0));
      return v;
    }();
    for (std::size_t stage = 1; stage < state.k_seq.size(); ++stage) {
      double worst = 0.0;
      for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << stage); ++mask) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < stage; ++i)
          if (mask & (std::uint64_t(1) << i)) sum += state.k_seq[i];
        const SeqVec v_f = diagonal_power_diff_vector(f.op, xw, static_cast<std::int64_t>(sum), 0);
        const SeqVec moved =
            apply_power(f.op, static_cast<std::int64_t>(state.k_seq[stage]), v_f);
        worst = std::max(worst, dist_interval(moved, v_f).hi);
      }
      CHECK(worst <= std::ldexp(1.0, -static_cast<int>(stage)) + 1e-9);
      CHECK(worst == doctest::Approx(state.sigma_residuals[stage - 1]).epsilon(1e-12));
    }
  }

  SUBCASE("norm floors hold at every exponent") {
    for (const double lo : state.norm_lower_bounds)
      CHECK(lo >= pbig.delta / state.M - 1e-9);
  }
}

TEST_CASE("build_k_sequence: starved horizon exhausts with diagnostics") {
  DyadicFixture f;
  f.cfg.horizon = 16;
  const PbigResult pbig = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState state = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig);
  CHECK(state.status == SearchStatus::Exhausted);
  CHECK(state.exhausted_stage >= 1);
  CHECK_FALSE(state.k_seq.empty());  // partial state for diagnostics
}

TEST_CASE("bp_certificate: gallery certificate verifies all BP conditions") {
  DyadicFixture f;
  const PbigResult pbig = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState state = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig);
  REQUIRE(state.status == SearchStatus::Completed);
  const C0CopyCertificate cert = bp_certificate(f.op, f.split, f.x, state, f.cfg);

  CHECK(cert.k_seq.size() == 8);
  CHECK(cert.norm_lower >= cert.delta_over_M - 1e-9);
  CHECK(cert.M_prime == doctest::Approx(0.9921875 + 2.0));  // sum 2^{1-i} + M||x|| + M^2||x||
  CHECK(cert.partial_sum_bound <= cert.M_prime + 1e-9);
  CHECK(cert.subsets_checked == 255);  // exhaustive over all nonempty subsets
  CHECK(cert.c_low > 0.0);
  CHECK(cert.c_low <= cert.c_high);

  SUBCASE("nonconvergence witness: terms never vanish") {
    for (const SeqVec& xi : cert.x_vectors)
      CHECK(sup_norm_interval(xi).lo >= cert.delta_over_M - 1e-9);
  }

  SUBCASE("independent subset-sum oracle on a few masks") {
    const SeqVec xw = [&] {
      SeqVec v = f.x;
      v.head.resize(120, Complex(1.0, 0.0));
      return v;
    }();
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint64_t mask = 1 + rng.uniform_index((1u << 8) - 1);
      // Direct evaluation: sum of exact coordinate values.
      SeqVec acc = SeqVec::zero(120);
      for (std::size_t i = 0; i < 8; ++i) {
        if (!(mask & (std::uint64_t(1) << i))) continue;
        const SeqVec xi =
            diagonal_power_diff_vector(f.op, xw, static_cast<std::int64_t>(cert.k_seq[i]), 0);
        acc = combine(Complex(1, 0), acc, Complex(1, 0), xi);
      }
      CHECK(sup_norm_interval(acc).hi <= cert.M_prime + 1e-9);
    }
  }
}

TEST_CASE("bp_certificate: reproducibility is bitwise") {
  DyadicFixture f;
  const PbigResult pbig1 = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState s1 = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig1);
  const C0CopyCertificate c1 = bp_certificate(f.op, f.split, f.x, s1, f.cfg);
  const PbigResult pbig2 = pbig_extract(f.op, f.split, f.x, f.cfg);
  const WitnessState s2 = build_k_sequence(f.op, f.split, f.x, f.cfg, pbig2);
  const C0CopyCertificate c2 = bp_certificate(f.op, f.split, f.x, s2, f.cfg);
  CHECK(s1.k_seq == s2.k_seq);
  CHECK(certificate_json(c1) == certificate_json(c2));
}

TEST_CASE("telescope_check: trivial and exact cases") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(32);
  CHECK(telescope_check(op, ones, 5, 1) == 0.0);
  Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t n = rng.uniform_index(1 << 10);
    const std::uint64_t m = 1 + rng.uniform_index(1 << 10);
    CHECK(telescope_check(op, ones, n, m) == 0.0);  // exact integer phases
  }
}

TEST_CASE("telescope_check: random power-bounded matrices stay below 1e-12") {
  Rng rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_index(5));
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = rng.gaussian_complex();
    const MatrixOperator T(g * (1.0 / g.operatorNorm()));
    Eigen::VectorXcd x(d);
    for (int i = 0; i < d; ++i) x(i) = rng.gaussian_complex();
    const std::uint64_t n = rng.uniform_index(17);
    const std::uint64_t m = 1 + rng.uniform_index(6);
    CHECK(telescope_check(T, x, n, m) <= 1e-12);
  }
}

TEST_CASE("lemma A1Am consequence: D1 certificate propagates to D_m") {
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const SeqVec ones = SeqVec::ones(48);
  AnalysisConfig cfg;
  const CompactnessVerdict d1 = verdict(diagonal_difference_family(op, ones, 1, 2048), cfg);
  REQUIRE(d1.verdict == CompactnessClass::CompactCertified);
  for (std::uint64_t m = 2; m <= 8; ++m) {
    const CompactnessVerdict dm = verdict(diagonal_difference_family(op, ones, m, 2048), cfg);
    CHECK(dm.verdict == CompactnessClass::CompactCertified);
  }
}
