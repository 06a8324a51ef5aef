#pragma once

#include <cstddef>
#include <vector>

#include "orbitlab/scalar.hpp"

namespace orbitlab {

// Truncated representation of a vector in c0 (null sequences) or c
// (convergent sequences) under the sup norm.
//
// A SeqVec stores exact head coordinates 0..d-1 plus a tail descriptor for
// coordinates k >= d.  The head entries and, for ConvergentLimit tails, the
// limit are exact data; `bound` certifies sup_{k>=d} |x_k - center| <= bound
// where center = limit (ConvergentLimit) or 0 (NullEnvelope).  Every sequence
// agreeing with the head, converging to the limit and obeying the bound is
// represented; norms and distances are therefore returned as intervals.

enum class TailKind { NullEnvelope, ConvergentLimit };

struct TailDescriptor {
  TailKind kind = TailKind::NullEnvelope;
  Complex limit{0.0, 0.0};  // meaningful only for ConvergentLimit
  double bound = 0.0;       // >= 0

  static TailDescriptor null_envelope(double bound = 0.0);
  static TailDescriptor convergent(Complex limit, double bound = 0.0);

  Complex center() const {
    return kind == TailKind::ConvergentLimit ? limit : Complex(0.0, 0.0);
  }
};

struct NormInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct SeqVec {
  std::vector<Complex> head;
  TailDescriptor tail;

  std::size_t dim() const { return head.size(); }

  static SeqVec zero(std::size_t dim);
  /// The constant-1 sequence at the given head length.
  static SeqVec ones(std::size_t dim);
  /// Standard basis vector e_index (0-indexed); element of c0.
  static SeqVec basis(std::size_t dim, std::size_t index);

  void validate(const char* where) const;
};

/// Certified enclosure of the sup norm over all represented sequences.
NormInterval sup_norm_interval(const SeqVec& v);

/// Lower bound on the sup norm that additionally uses |limit| (every
/// represented sequence converges to the limit, so its sup norm is at least
/// |limit|).  Sharper than sup_norm_interval().lo for convergent tails.
double norm_lower_with_limit(const SeqVec& v);

/// alpha*v + beta*w.  Heads of unequal length are aligned by padding the
/// shorter head with its tail center; the combined tail bound is
/// |alpha|*bound(v) + |beta|*bound(w).  Padding is exact only when the padded
/// vector's tail bound is zero; pipeline vectors share one head length, so
/// mixed-length combines with nonzero bounds occur only in tests.
SeqVec combine(Complex alpha, const SeqVec& v, Complex beta, const SeqVec& w);

/// Enclosure of the sup-norm distance ||v - w||.
NormInterval dist_interval(const SeqVec& v, const SeqVec& w);

/// Shortens the head to d_new, folding dropped coordinates into the tail
/// bound.  The represented set only grows.
SeqVec truncate(const SeqVec& v, std::size_t d_new);

}  // namespace orbitlab
