#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "orbitlab/dyadic_phase.hpp"
#include "orbitlab/seqspace.hpp"

namespace orbitlab {

/// exp(2*pi*i*num/den); canonicalized to 0 <= num < den, gcd-reduced.
struct RootOfUnity {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static RootOfUnity make(std::int64_t num, std::int64_t den);
  bool is_one() const { return num == 0; }
};

// Diagonal operator T(x_n) = (a_n x_n) on c / c0.
//
// DyadicPhase rule: a_n = rho * exp(2*pi*i*num/2^(n+1)) with rho a fixed root
// of unity (rho = -1 reproduces the sign_flip form, rho = exp(2*pi*i/m) the
// m-th-root gallery).  num must be odd so that a_n != rho = lim a_n for all n.
// Powers are evaluated through exact integer residues: coordinate n of T^k
// carries phase (k*num mod 2^(n+1)) / 2^(n+1) plus (k*rho_num mod rho_den) /
// rho_den, so exponents up to 2^62 stay exact.
class DiagonalOperator {
 public:
  enum class Rule { DyadicPhase, Explicit };

  static DiagonalOperator dyadic(std::int64_t num, bool sign_flip = false);
  static DiagonalOperator dyadic_with_prefactor(std::int64_t num, RootOfUnity prefactor);
  static DiagonalOperator explicit_rule(std::vector<Complex> entries, Complex limit,
                                        double tail_bound);

  Rule rule() const { return rule_; }
  std::int64_t dyadic_num() const { return num_; }
  RootOfUnity prefactor() const { return prefactor_; }
  double explicit_tail_bound() const { return explicit_tail_bound_; }

  /// Largest head length this operator can act on exactly.
  std::size_t max_head_dim() const;

  Complex entry(std::size_t n) const { return entry_power(n, 1); }
  Complex entry_power(std::size_t n, std::int64_t k) const;
  Complex limit() const { return limit_power(1); }  // b = lim a_n
  Complex limit_power(std::int64_t k) const;

  /// Exact test a_n^k == 1 (dyadic rule only).
  bool entry_power_is_one(std::size_t n, std::int64_t k) const;

  bool unimodular() const;

  /// sup_{n >= d} |a_n^k - b^k|; closed form for the dyadic rule, Lipschitz
  /// fallback min(2, |k| * tail_bound) for the explicit rule.
  double tail_drift_sup(unsigned d, std::int64_t k) const;

  /// The doubly-power-bounded inverse rule (negated phases).
  DiagonalOperator inverse() const;

 private:
  Rule rule_ = Rule::DyadicPhase;
  std::int64_t num_ = 1;
  RootOfUnity prefactor_{};
  std::vector<Complex> entries_;
  Complex explicit_limit_{1.0, 0.0};
  double explicit_tail_bound_ = 0.0;
};

struct MatrixOperator {
  Eigen::MatrixXcd entries;

  explicit MatrixOperator(Eigen::MatrixXcd m);
  Eigen::Index dim() const { return entries.rows(); }
};

/// Shift by a > 0 on BUC(R; c0), realized through closed-form orbit metrics
/// for the gallery vector x(t) = (sin(t/2^n))_n.
struct Example1Operator {
  double a = 1.0;

  explicit Example1Operator(double shift);
};

using Operator = std::variant<DiagonalOperator, MatrixOperator, Example1Operator>;

enum class PowerBoundProvenance { ExactUnimodular, SpectralCertificate, ProbeOnly };

const char* provenance_name(PowerBoundProvenance p);

struct PowerBound {
  double M = 1.0;
  PowerBoundProvenance provenance = PowerBoundProvenance::ExactUnimodular;
  double probe_observed = 1.0;  // max observed ||T^n|| over the probe horizon
};

// -- application ------------------------------------------------------------

SeqVec apply(const DiagonalOperator& op, const SeqVec& v);
SeqVec apply_power(const DiagonalOperator& op, std::int64_t k, const SeqVec& v);

inline constexpr std::uint64_t kDefaultMatrixPowerHorizon = 1u << 20;

Eigen::VectorXcd apply(const MatrixOperator& op, const Eigen::VectorXcd& v);
Eigen::VectorXcd apply_power(const MatrixOperator& op, std::uint64_t n,
                             const Eigen::VectorXcd& v,
                             std::uint64_t horizon = kDefaultMatrixPowerHorizon);
Eigen::MatrixXcd matrix_power(const MatrixOperator& op, std::uint64_t n,
                              std::uint64_t horizon = kDefaultMatrixPowerHorizon);

/// Certified power bound sup_n ||T^n|| <= M.  Unimodular diagonals are exact
/// (M = 1); matrices go through the spectral certificate when it holds.
PowerBound power_norm_bound(const Operator& op);

// -- exact diagonal orbit vectors -------------------------------------------

/// T^k x with exact per-coordinate phases and a tight closed-form tail.
SeqVec diagonal_power_vector(const DiagonalOperator& op, const SeqVec& x, std::int64_t k);

/// T^j x - T^k x, tail bound from the closed-form phase drift (no chaining).
SeqVec diagonal_power_diff_vector(const DiagonalOperator& op, const SeqVec& x,
                                  std::int64_t j, std::int64_t k);

// -- Example 1 closed-form metrics -------------------------------------------

/// ||T^p x - T^q x|| = sup_n 2|sin((p-q) a / 2^(n+1))|.
double example1_orbit_distance(const Example1Operator& op, std::int64_t p, std::int64_t q);

/// ||T^p y - T^q y|| for y = (T-I)x:
/// sup_n 4|sin(a/2^(n+1))| |sin((p-q) a / 2^(n+1))|.
double example1_diff_orbit_distance(const Example1Operator& op, std::int64_t p, std::int64_t q);

enum class Example1Family { Orbit, DiffOrbit };

struct GridSpec {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t steps = 1 << 16;  // number of subintervals; steps+1 samples
  unsigned n_max = 24;
};

/// Default verification grid: one full period of every coordinate n <= n_max.
GridSpec example1_default_grid(unsigned n_max = 24, std::size_t steps = (1u << 16) + 1);

/// Sampled sup over the grid; always a lower bound for the closed form.
double example1_grid_oracle(const Example1Operator& op, std::int64_t p, std::int64_t q,
                            Example1Family which, const GridSpec& grid);

}  // namespace orbitlab
