#pragma once

#include <cstdint>

#include "orbitlab/compactness.hpp"
#include "orbitlab/operators.hpp"

namespace orbitlab {

// Indexed point families for the analyzers, built with tight closed-form
// tail descriptors (single-shot bounds, no per-apply chaining).

/// {T^n x : n < horizon} for a unimodular diagonal operator.
PointFamily diagonal_orbit_family(const DiagonalOperator& op, const SeqVec& x,
                                  std::uint64_t horizon);

/// {T^n (T^m - I) x : n < horizon}.  When b^m == 1 exactly the family lies in
/// c0 and carries the tail certificate with envelope
/// tau(c) = |a_c^m - 1| * sup|x| (monotone hull).
PointFamily diagonal_difference_family(const DiagonalOperator& op, const SeqVec& x,
                                       std::uint64_t m, std::uint64_t horizon);

/// Orbit of the paper's x(t) = (sin(t/2^n))_n under the shift; exact
/// closed-form metric.
PointFamily example1_orbit_family(const Example1Operator& op, std::uint64_t horizon);

/// Difference orbit {T^p y : p} for y = (T-I)x; exact closed-form metric plus
/// per-coordinate uniform envelopes tau(n) = 2|sin(a/2^(n+1))| as SeqVec data
/// (the certificate mechanism: y(t)_n -> 0 uniformly in t).
PointFamily example1_diff_family(const Example1Operator& op, std::uint64_t horizon,
                                 std::size_t head_dim);

/// {T^n x} in C^d (Euclidean metric, bounded + finite-dim certificate path).
PointFamily matrix_orbit_family(const MatrixOperator& op, const Eigen::VectorXcd& x,
                                std::uint64_t horizon);

/// {T^n (T^m - I) x} in C^d.
PointFamily matrix_difference_family(const MatrixOperator& op, const Eigen::VectorXcd& x,
                                     std::uint64_t m, std::uint64_t horizon);

}  // namespace orbitlab
