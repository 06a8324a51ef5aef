#include <doctest.h>

#include <cmath>
#include <numbers>

#include "orbitlab/operators.hpp"
#include "orbitlab/random.hpp"
#include "orbitlab/seqspace.hpp"

using namespace orbitlab;

namespace {

SeqVec make_vec(std::vector<Complex> head, TailDescriptor tail) {
  SeqVec v;
  v.head = std::move(head);
  v.tail = tail;
  return v;
}

SeqVec random_vec(Rng& rng, std::size_t dim, bool convergent, double max_bound) {
  SeqVec v;
  v.head.resize(dim);
  for (auto& z : v.head) z = rng.gaussian_complex();
  const double bound = rng.uniform(0.0, max_bound);
  v.tail = convergent ? TailDescriptor::convergent(rng.gaussian_complex(), bound)
                      : TailDescriptor::null_envelope(bound);
  return v;
}

}  // namespace

TEST_CASE("sup norm: zero vector") {
  const SeqVec v = SeqVec::zero(3);
  const NormInterval ni = sup_norm_interval(v);
  CHECK(ni.lo == 0.0);
  CHECK(ni.hi == 0.0);
}

TEST_CASE("sup norm: head beats limit") {
  const SeqVec v =
      make_vec({Complex(-2.0, 0.0)}, TailDescriptor::convergent(Complex(1.0, 0.0), 0.0));
  const NormInterval ni = sup_norm_interval(v);
  CHECK(ni.lo == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ni.hi == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sup norm: null envelope wider than head") {
  const SeqVec v = make_vec({Complex(0.5, 0.0)}, TailDescriptor::null_envelope(0.9));
  const NormInterval ni = sup_norm_interval(v);
  CHECK(ni.lo == doctest::Approx(0.5));
  CHECK(ni.hi == doctest::Approx(0.9));

  // Oracle: extremal tail sequences obeying the envelope. Tail values of
  // magnitude up to 0.9 are representable, so the exact attainable norm range
  // over represented sequences is [0.5, 0.9]; sampled sequences stay inside.
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double tail_mag = rng.uniform(0.0, 0.9);
    const double true_norm = std::max(0.5, tail_mag);
    CHECK(ni.lo <= true_norm + 1e-15);
    CHECK(true_norm <= ni.hi + 1e-15);
  }
}

TEST_CASE("combine: self-subtraction keeps interval honest") {
  Rng rng(3);
  const SeqVec v = random_vec(rng, 6, true, 0.4);
  const SeqVec z = combine(Complex(1, 0), v, Complex(-1, 0), v);
  for (const Complex& c : z.head) CHECK(std::abs(c) == 0.0);
  CHECK(z.tail.bound == doctest::Approx(2.0 * v.tail.bound).epsilon(1e-15));
  CHECK(sup_norm_interval(z).lo == 0.0);
}

TEST_CASE("combine: basis vectors") {
  const SeqVec e0 = SeqVec::basis(4, 0);
  const SeqVec e1 = SeqVec::basis(4, 1);
  const SeqVec s = combine(Complex(1, 0), e0, Complex(1, 0), e1);
  CHECK(s.head[0] == Complex(1, 0));
  CHECK(s.head[1] == Complex(1, 0));
  CHECK(s.head[2] == Complex(0, 0));
  CHECK(s.tail.bound == 0.0);
}

TEST_CASE("combine: ones minus dyadic image has the closed-form head") {
  // T diagonal with a_n = exp(2 pi i / 2^(n+1)); 1 - T 1 coordinates are
  // 1 - a_n, and the limits subtract to 0.
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const std::size_t d = 8;
  const SeqVec ones = SeqVec::ones(d);
  const SeqVec t_ones = apply(op, ones);
  const SeqVec z = combine(Complex(1, 0), ones, Complex(-1, 0), t_ones);
  for (std::size_t n = 0; n < d; ++n) {
    const double theta = 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(n) + 1);
    const Complex expected = Complex(1.0, 0.0) - Complex(std::cos(theta), std::sin(theta));
    CHECK(std::abs(z.head[n] - expected) <= 1e-15);
  }
  REQUIRE(z.tail.kind == TailKind::ConvergentLimit);
  CHECK(z.tail.limit == Complex(0.0, 0.0));
}

TEST_CASE("dist: reflexivity at interval level") {
  Rng rng(5);
  const SeqVec v = random_vec(rng, 5, false, 0.3);
  const NormInterval ni = dist_interval(v, v);
  CHECK(ni.lo == 0.0);
  CHECK(ni.hi == doctest::Approx(2.0 * v.tail.bound).epsilon(1e-15));
}

TEST_CASE("dist: separated basis vectors") {
  const SeqVec e0 = SeqVec::basis(4, 0);
  const SeqVec e1 = SeqVec::basis(4, 1);
  const NormInterval ni = dist_interval(e0, e1);
  CHECK(ni.lo == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ni.hi == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dist: dyadic orbit pair against brute-force oracle") {
  // Brute force with independent double arithmetic: distance between T^1 1
  // and T^2 1 is sup_n |a_n - a_n^2|; the head maximum plus the tail drift
  // must enclose the true value.
  const DiagonalOperator op = DiagonalOperator::dyadic(1);
  const std::size_t d = 8;
  const SeqVec ones = SeqVec::ones(d);
  const SeqVec v1 = apply_power(op, 1, ones);
  const SeqVec v2 = apply_power(op, 2, ones);
  const NormInterval ni = dist_interval(v1, v2);

  double true_sup = 0.0;
  for (unsigned n = 0; n < 64; ++n) {
    const double theta = 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(n) + 1);
    const Complex a = std::polar(1.0, theta);
    true_sup = std::max(true_sup, std::abs(a - a * a));
  }
  CHECK(ni.lo <= true_sup + 1e-12);
  CHECK(true_sup <= ni.hi + 1e-12);
  // The head is d coordinates deep, so the interval is tight to the head sup.
  CHECK(ni.hi - ni.lo <= 0.1);
}

TEST_CASE("truncate: identity at same length") {
  Rng rng(7);
  const SeqVec v = random_vec(rng, 6, true, 0.2);
  const SeqVec t = truncate(v, 6);
  CHECK(t.head == v.head);
  CHECK(t.tail.bound == v.tail.bound);
}

TEST_CASE("truncate: dropped coordinates fold into the bound") {
  const SeqVec v =
      make_vec({Complex(0.5, 0.0), Complex(0.25, 0.0)}, TailDescriptor::null_envelope(0.1));
  const SeqVec t = truncate(v, 1);
  REQUIRE(t.dim() == 1);
  CHECK(t.head[0] == Complex(0.5, 0.0));
  CHECK(t.tail.bound == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("truncate: enclosure monotonicity over random vectors") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + rng.uniform_index(10);
    const SeqVec v = random_vec(rng, d, trial % 2 == 0, 0.5);
    const std::size_t d_new = 1 + rng.uniform_index(d);
    const NormInterval before = sup_norm_interval(v);
    const NormInterval after = sup_norm_interval(truncate(v, d_new));
    CHECK(after.lo <= before.lo + 1e-15);
    CHECK(before.hi <= after.hi + 1e-15);
  }
}

TEST_CASE("soundness: finite-support sequences land inside their intervals") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t support = 1 + rng.uniform_index(16);
    std::vector<Complex> coords(support);
    double true_norm = 0.0;
    for (auto& z : coords) {
      z = rng.gaussian_complex();
      true_norm = std::max(true_norm, std::abs(z));
    }
    const std::size_t d = 1 + rng.uniform_index(support);
    SeqVec v;
    v.head.assign(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(d));
    double tail_sup = 0.0;
    for (std::size_t k = d; k < support; ++k) tail_sup = std::max(tail_sup, std::abs(coords[k]));
    v.tail = TailDescriptor::null_envelope(tail_sup);
    const NormInterval ni = sup_norm_interval(v);
    CHECK(ni.lo <= true_norm + 1e-15);
    CHECK(true_norm <= ni.hi + 1e-15);
  }
}

TEST_CASE("dist symmetry is exact") {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const SeqVec v = random_vec(rng, 6, trial % 2 == 0, 0.5);
    const SeqVec w = random_vec(rng, 6, trial % 3 == 0, 0.5);
    const NormInterval a = dist_interval(v, w);
    const NormInterval b = dist_interval(w, v);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
  }
}

TEST_CASE("interval triangle inequality") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const SeqVec u = random_vec(rng, 5, true, 0.4);
    const SeqVec v = random_vec(rng, 5, false, 0.4);
    const SeqVec w = random_vec(rng, 5, trial % 2 == 0, 0.4);
    CHECK(dist_interval(u, w).lo <=
          dist_interval(u, v).hi + dist_interval(v, w).hi + 1e-12);
  }
}

TEST_CASE("combine is exactly bilinear on heads with zero-bound tails") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    SeqVec v = random_vec(rng, 7, false, 0.0);
    SeqVec w = random_vec(rng, 7, false, 0.0);
    const Complex alpha = rng.gaussian_complex();
    const Complex beta = rng.gaussian_complex();
    const SeqVec z = combine(alpha, v, beta, w);
    for (std::size_t k = 0; k < 7; ++k) {
      const Complex expected = alpha * v.head[k] + beta * w.head[k];
      CHECK(z.head[k] == expected);  // identical expression, bitwise equal
    }
    CHECK(z.tail.bound == 0.0);
  }
}

TEST_CASE("norm lower bound via the exact limit") {
  const SeqVec ones = SeqVec::ones(4);
  CHECK(norm_lower_with_limit(ones) == 1.0);
  const SeqVec v = make_vec({Complex(0.1, 0.0)},
                            TailDescriptor::convergent(Complex(0.8, 0.0), 0.5));
  // The stated-lo clamp gives 0.3, but every represented sequence converges
  // to 0.8, so its sup norm is at least 0.8.
  CHECK(sup_norm_interval(v).lo == doctest::Approx(0.3));
  CHECK(norm_lower_with_limit(v) == doctest::Approx(0.8));
}

TEST_CASE("validation rejects non-finite data") {
  SeqVec v = SeqVec::zero(2);
  v.head[1] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(v.validate("test"), Error);
  SeqVec w = SeqVec::zero(2);
  w.tail.bound = -1.0;
  CHECK_THROWS_AS(w.validate("test"), Error);
}
