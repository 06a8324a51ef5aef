#include "orbitlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "orbitlab/jdlg.hpp"

namespace orbitlab {

namespace {

constexpr std::size_t kMaxDyadicHeadDim = 120;  // phase denominators fit u128
constexpr std::int64_t kMaxDyadicNum = std::int64_t(1) << 31;

}  // namespace

RootOfUnity RootOfUnity::make(std::int64_t num, std::int64_t den) {
  if (den < 1 || den > 64)
    raise(ErrorCode::ConfigError, "root-of-unity order must be in [1, 64]");
  num %= den;
  if (num < 0) num += den;
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return RootOfUnity{num, den};
}

DiagonalOperator DiagonalOperator::dyadic(std::int64_t num, bool sign_flip) {
  return dyadic_with_prefactor(num, sign_flip ? RootOfUnity::make(1, 2)
                                              : RootOfUnity::make(0, 1));
}

DiagonalOperator DiagonalOperator::dyadic_with_prefactor(std::int64_t num,
                                                         RootOfUnity prefactor) {
  if (num == 0 || (num % 2) == 0)
    raise(ErrorCode::ConfigError,
          "dyadic diagonal requires odd num (guarantees a_n != b for all n)");
  if (num > kMaxDyadicNum || num < -kMaxDyadicNum)
    raise(ErrorCode::ConfigError, "dyadic num out of range");
  DiagonalOperator op;
  op.rule_ = Rule::DyadicPhase;
  op.num_ = num;
  op.prefactor_ = RootOfUnity::make(prefactor.num, prefactor.den);
  return op;
}

DiagonalOperator DiagonalOperator::explicit_rule(std::vector<Complex> entries,
                                                 Complex limit, double tail_bound) {
  if (entries.empty()) raise(ErrorCode::ConfigError, "explicit diagonal: no entries");
  for (const Complex& a : entries) require_finite(a, "explicit diagonal");
  require_finite(limit, "explicit diagonal limit");
  if (!(tail_bound >= 0.0))
    raise(ErrorCode::ConfigError, "explicit diagonal: tail bound must be >= 0");
  DiagonalOperator op;
  op.rule_ = Rule::Explicit;
  op.entries_ = std::move(entries);
  op.explicit_limit_ = limit;
  op.explicit_tail_bound_ = tail_bound;
  return op;
}

std::size_t DiagonalOperator::max_head_dim() const {
  return rule_ == Rule::DyadicPhase ? kMaxDyadicHeadDim : entries_.size();
}

Complex DiagonalOperator::entry_power(std::size_t n, std::int64_t k) const {
  if (rule_ == Rule::Explicit) {
    if (n >= entries_.size())
      raise(ErrorCode::UnsupportedDiagonal,
            "explicit diagonal: coordinate beyond entry list");
    const Complex a = entries_[n];
    if (k == 0) return Complex(1.0, 0.0);
    const double r = std::abs(a);
    const double th = std::arg(a) * static_cast<double>(k);
    return std::polar(std::pow(r, static_cast<double>(k)), th);
  }
  if (n >= kMaxDyadicHeadDim)
    raise(ErrorCode::UnsupportedDiagonal, "dyadic diagonal: head dimension too large");
  const unsigned e = static_cast<unsigned>(n) + 1;
  const u128 dy = mod_pow2(i128(k) * i128(num_), e);
  const std::int64_t rn = mod_i64(i128(k) * i128(prefactor_.num), prefactor_.den);
  return unit_from_phase(phase_sum(dy, e, rn, prefactor_.den));
}

Complex DiagonalOperator::limit_power(std::int64_t k) const {
  if (rule_ == Rule::Explicit) {
    const Complex b = explicit_limit_;
    if (k == 0) return Complex(1.0, 0.0);
    return std::polar(std::pow(std::abs(b), static_cast<double>(k)),
                      std::arg(b) * static_cast<double>(k));
  }
  const std::int64_t rn = mod_i64(i128(k) * i128(prefactor_.num), prefactor_.den);
  return unit_from_phase(phase_sum(0, 1, rn, prefactor_.den));
}

bool DiagonalOperator::entry_power_is_one(std::size_t n, std::int64_t k) const {
  if (rule_ == Rule::Explicit)
    return std::abs(entry_power(n, k) - Complex(1.0, 0.0)) == 0.0;
  const unsigned e = static_cast<unsigned>(n) + 1;
  return mod_pow2(i128(k) * i128(num_), e) == 0 &&
         mod_i64(i128(k) * i128(prefactor_.num), prefactor_.den) == 0;
}

bool DiagonalOperator::unimodular() const {
  if (rule_ == Rule::DyadicPhase) return true;
  for (const Complex& a : entries_)
    if (std::abs(std::abs(a) - 1.0) > 1e-12) return false;
  return std::abs(std::abs(explicit_limit_) - 1.0) <= 1e-12;
}

double DiagonalOperator::tail_drift_sup(unsigned d, std::int64_t k) const {
  if (rule_ == Rule::DyadicPhase) return dyadic_gap_sup(i128(k) * i128(num_), d);
  return std::min(2.0, std::abs(static_cast<double>(k)) * explicit_tail_bound_);
}

DiagonalOperator DiagonalOperator::inverse() const {
  if (rule_ == Rule::Explicit) {
    if (!unimodular())
      raise(ErrorCode::UnsupportedDiagonal, "inverse requires unimodular entries");
    std::vector<Complex> inv(entries_.size());
    std::transform(entries_.begin(), entries_.end(), inv.begin(),
                   [](const Complex& a) { return std::conj(a); });
    return explicit_rule(std::move(inv), std::conj(explicit_limit_),
                         explicit_tail_bound_);
  }
  return dyadic_with_prefactor(
      -num_, RootOfUnity::make(-prefactor_.num, prefactor_.den));
}

MatrixOperator::MatrixOperator(Eigen::MatrixXcd m) : entries(std::move(m)) {
  if (entries.rows() != entries.cols())
    raise(ErrorCode::ConfigError, "matrix operator must be square");
  if (entries.rows() < 1 || entries.rows() > 64)
    raise(ErrorCode::ConfigError, "matrix operator dimension must be in [1, 64]");
  if (!entries.allFinite())
    raise(ErrorCode::ConfigError, "matrix operator has non-finite entries");
}

Example1Operator::Example1Operator(double shift) : a(shift) {
  if (!(a > 0.0) || !std::isfinite(a))
    raise(ErrorCode::ConfigError, "example1 shift step must be > 0");
}

const char* provenance_name(PowerBoundProvenance p) {
  switch (p) {
    case PowerBoundProvenance::ExactUnimodular: return "ExactUnimodular";
    case PowerBoundProvenance::SpectralCertificate: return "SpectralCertificate";
    case PowerBoundProvenance::ProbeOnly: return "ProbeOnly";
  }
  return "?";
}

// -- application -------------------------------------------------------------

SeqVec apply(const DiagonalOperator& op, const SeqVec& v) { return apply_power(op, 1, v); }

SeqVec apply_power(const DiagonalOperator& op, std::int64_t k, const SeqVec& v) {
  v.validate("apply_power(diagonal)");
  if (!op.unimodular())
    raise(ErrorCode::UnsupportedDiagonal,
          "SeqVec application requires unimodular diagonal entries");
  if (v.dim() > op.max_head_dim())
    raise(ErrorCode::DimensionMismatch, "head dimension beyond diagonal rule range");
  SeqVec out;
  out.head.resize(v.dim());
  for (std::size_t n = 0; n < v.dim(); ++n)
    out.head[n] = op.entry_power(n, k) * v.head[n];
  const double beta = v.tail.bound;
  if (v.tail.kind == TailKind::NullEnvelope) {
    out.tail = TailDescriptor::null_envelope(beta);  // isometric on the tail
  } else {
    const double drift = op.tail_drift_sup(static_cast<unsigned>(v.dim()), k);
    const Complex limit = op.limit_power(k) * v.tail.limit;
    out.tail = TailDescriptor::convergent(
        limit, beta + drift * (std::abs(v.tail.limit) + beta));
  }
  return out;
}

Eigen::VectorXcd apply(const MatrixOperator& op, const Eigen::VectorXcd& v) {
  if (v.size() != op.dim())
    raise(ErrorCode::DimensionMismatch, "matrix/vector dimension mismatch");
  return op.entries * v;
}

Eigen::MatrixXcd matrix_power(const MatrixOperator& op, std::uint64_t n,
                              std::uint64_t horizon) {
  if (n > horizon)
    raise(ErrorCode::HorizonExceeded, "matrix power beyond configured horizon");
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(op.dim(), op.dim());
  Eigen::MatrixXcd base = op.entries;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Eigen::VectorXcd apply_power(const MatrixOperator& op, std::uint64_t n,
                             const Eigen::VectorXcd& v, std::uint64_t horizon) {
  if (v.size() != op.dim())
    raise(ErrorCode::DimensionMismatch, "matrix/vector dimension mismatch");
  return matrix_power(op, n, horizon) * v;
}

PowerBound power_norm_bound(const Operator& op) {
  if (const auto* diag = std::get_if<DiagonalOperator>(&op)) {
    if (!diag->unimodular())
      raise(ErrorCode::UnsupportedDiagonal,
            "power bound implemented for unimodular diagonals only");
    return PowerBound{1.0, PowerBoundProvenance::ExactUnimodular, 1.0};
  }
  if (std::holds_alternative<Example1Operator>(op)) {
    // Shift on BUC(R; c0) is an invertible isometry.
    return PowerBound{1.0, PowerBoundProvenance::ExactUnimodular, 1.0};
  }
  return matrix_power_bound(std::get<MatrixOperator>(op));
}

// -- exact diagonal orbit vectors ---------------------------------------------

SeqVec diagonal_power_vector(const DiagonalOperator& op, const SeqVec& x, std::int64_t k) {
  return apply_power(op, k, x);
}

SeqVec diagonal_power_diff_vector(const DiagonalOperator& op, const SeqVec& x,
                                  std::int64_t j, std::int64_t k) {
  x.validate("diagonal_power_diff_vector");
  if (!op.unimodular())
    raise(ErrorCode::UnsupportedDiagonal, "diff vectors require unimodular entries");
  if (x.dim() > op.max_head_dim())
    raise(ErrorCode::DimensionMismatch, "head dimension beyond diagonal rule range");
  const std::size_t d = x.dim();
  SeqVec out;
  out.head.resize(d);
  for (std::size_t n = 0; n < d; ++n)
    out.head[n] = (op.entry_power(n, j) - op.entry_power(n, k)) * x.head[n];

  const double beta = x.tail.bound;
  const Complex L = x.tail.center();
  const std::int64_t delta = j - k;
  // |a^j x - a^k x - (b^j - b^k) L| over the tail, via
  //   a^k (a^D - 1) x - b^k (b^D - 1) L
  //     = a^k (a^D - 1)(x - L) + [(a^k - b^k)(a^D - 1) + b^k (a^D - b^D)] L.
  const unsigned d0 = static_cast<unsigned>(d);
  const double s_delta = op.tail_drift_sup(d0, delta);
  const double s_k = op.tail_drift_sup(d0, k);
  const double gap_delta = std::abs(op.limit_power(delta) - Complex(1.0, 0.0)) + s_delta;
  const double bound = beta * gap_delta + std::abs(L) * (s_k * gap_delta + s_delta);

  const Complex center = (op.limit_power(j) - op.limit_power(k)) * L;
  if (x.tail.kind == TailKind::NullEnvelope && center == Complex(0.0, 0.0)) {
    out.tail = TailDescriptor::null_envelope(std::min(bound, 2.0 * beta));
  } else {
    out.tail = TailDescriptor::convergent(center, bound);
  }
  return out;
}

// -- Example 1 ---------------------------------------------------------------

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

}  // namespace

double example1_orbit_distance(const Example1Operator& op, std::int64_t p, std::int64_t q) {
  const double h = std::abs(static_cast<double>(p - q)) * op.a;
  if (h == 0.0) return 0.0;
  double sup = 0.0;
  double arg = h / 2.0;
  for (;;) {
    sup = std::max(sup, 2.0 * std::abs(std::sin(arg)));
    if (arg <= kHalfPi) break;  // decreasing beyond this point
    arg /= 2.0;
  }
  return sup;
}

double example1_diff_orbit_distance(const Example1Operator& op, std::int64_t p,
                                    std::int64_t q) {
  if (p == q) return 0.0;
  const double h = std::abs(static_cast<double>(p - q)) * op.a;
  double sup = 0.0;
  double arg_a = op.a / 2.0;
  double arg_h = h / 2.0;
  for (;;) {
    sup = std::max(sup, 4.0 * std::abs(std::sin(arg_a)) * std::abs(std::sin(arg_h)));
    if (arg_a <= kHalfPi && arg_h <= kHalfPi) break;
    arg_a /= 2.0;
    arg_h /= 2.0;
  }
  return sup;
}

GridSpec example1_default_grid(unsigned n_max, std::size_t steps) {
  GridSpec g;
  g.t_lo = 0.0;
  g.t_hi = 2.0 * std::numbers::pi * std::ldexp(1.0, static_cast<int>(n_max));
  g.steps = steps;
  g.n_max = n_max;
  return g;
}

double example1_grid_oracle(const Example1Operator& op, std::int64_t p, std::int64_t q,
                            Example1Family which, const GridSpec& grid) {
  if (grid.steps < 1000) raise(ErrorCode::ConfigError, "grid oracle: steps >= 1000");
  if (grid.n_max < 24) raise(ErrorCode::ConfigError, "grid oracle: n_max >= 24");
  if (p == q) return 0.0;
  const double tp = static_cast<double>(p) * op.a;
  const double tq = static_cast<double>(q) * op.a;
  const double dt = (grid.t_hi - grid.t_lo) / static_cast<double>(grid.steps);
  double sup = 0.0;
  for (unsigned n = 0; n <= grid.n_max; ++n) {
    const double scale = std::ldexp(1.0, -static_cast<int>(n));
    double local = 0.0;
    for (std::size_t i = 0; i <= grid.steps; ++i) {
      const double t = grid.t_lo + static_cast<double>(i) * dt;
      double diff;
      if (which == Example1Family::Orbit) {
        diff = std::sin((t + tp) * scale) - std::sin((t + tq) * scale);
      } else {
        const double yp = std::sin((t + tp + op.a) * scale) - std::sin((t + tp) * scale);
        const double yq = std::sin((t + tq + op.a) * scale) - std::sin((t + tq) * scale);
        diff = yp - yq;
      }
      local = std::max(local, std::abs(diff));
    }
    sup = std::max(sup, local);
  }
  return sup;
}

}  // namespace orbitlab
