#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "orbitlab/scalar.hpp"

namespace orbitlab {

// Exact arithmetic for phases that are rational multiples of a full turn,
// with denominators of the form (power of two) * (small root order).  Powers
// of gallery diagonal entries reduce to integer residues, so arbitrarily
// large exponents carry no accumulated rounding error.

using u128 = unsigned __int128;
using i128 = __int128;

/// Fraction of a full turn, canonicalized to num/den in [0, 1).
struct PhaseFrac {
  u128 num = 0;
  u128 den = 1;
};

/// (value * mult) mod 2^e for 1 <= e <= 127, folding negatives into [0, 2^e).
inline u128 mod_pow2(i128 value, unsigned e) {
  const u128 m = u128(1) << e;
  i128 r = value % i128(m);
  if (r < 0) r += i128(m);
  return u128(r);
}

inline std::int64_t mod_i64(i128 value, std::int64_t m) {
  i128 r = value % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

/// phase = dy/2^e + rn/rd turns, all inputs already reduced into range.
inline PhaseFrac phase_sum(u128 dy, unsigned e, std::int64_t rn, std::int64_t rd) {
  PhaseFrac f;
  // den = 2^e * rd fits u128 for e <= 120 and rd <= 64 (validated upstream).
  f.den = (u128(1) << e) * u128(rd);
  f.num = (dy * u128(rd) + u128(rn) * (u128(1) << e)) % f.den;
  return f;
}

/// exp(2*pi*i*f).  Quarter-turn multiples are returned exactly so identities
/// like a_0 = -1 and b^m = 1 hold bit-for-bit.
inline Complex unit_from_phase(const PhaseFrac& f) {
  if (f.num == 0) return Complex(1.0, 0.0);
  const u128 four = u128(4) * f.num;
  if (four % f.den == 0) {
    switch (static_cast<unsigned>(four / f.den)) {
      case 1: return Complex(0.0, 1.0);
      case 2: return Complex(-1.0, 0.0);
      case 3: return Complex(0.0, -1.0);
    }
  }
  const double frac = static_cast<double>(f.num) / static_cast<double>(f.den);
  const double th = 2.0 * std::numbers::pi * frac;
  return Complex(std::cos(th), std::sin(th));
}

/// |exp(2*pi*i*q/2^(n+1)) - 1| = 2|sin(pi*q/2^(n+1))|, with q reduced
/// exactly mod 2^(n+1).  Exact zero whenever q is divisible by 2^(n+1).
inline double dyadic_unit_gap(i128 q, unsigned n) {
  const unsigned e = n + 1;
  const u128 r = mod_pow2(q, e);
  if (r == 0) return 0.0;
  const u128 half = u128(1) << n;
  if (r == half) return 2.0;  // sin(pi/2) exactly
  const double frac = static_cast<double>(r) / static_cast<double>(u128(1) << e);
  return 2.0 * std::abs(std::sin(std::numbers::pi * frac));
}

/// sup over n >= d of 2|sin(pi*q/2^(n+1))|: scans until the argument enters
/// the monotone region (2^n >= |q|), where the sequence decreases.
inline double dyadic_gap_sup(i128 q, unsigned d) {
  if (q < 0) q = -q;
  if (q == 0) return 0.0;
  u128 uq = u128(q);
  unsigned n_mono = d;
  while (n_mono < 126 && (u128(1) << n_mono) < uq) ++n_mono;
  double sup = 0.0;
  for (unsigned n = d; n <= n_mono; ++n) sup = std::max(sup, dyadic_unit_gap(q, n));
  return sup;
}

}  // namespace orbitlab
