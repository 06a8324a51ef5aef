#include "orbitlab/seqspace.hpp"

#include <algorithm>
#include <cmath>

namespace orbitlab {

TailDescriptor TailDescriptor::null_envelope(double bound) {
  TailDescriptor t;
  t.kind = TailKind::NullEnvelope;
  t.bound = bound;
  return t;
}

TailDescriptor TailDescriptor::convergent(Complex limit, double bound) {
  TailDescriptor t;
  t.kind = TailKind::ConvergentLimit;
  t.limit = limit;
  t.bound = bound;
  return t;
}

SeqVec SeqVec::zero(std::size_t dim) {
  SeqVec v;
  v.head.assign(dim, Complex(0.0, 0.0));
  v.tail = TailDescriptor::null_envelope(0.0);
  return v;
}

SeqVec SeqVec::ones(std::size_t dim) {
  SeqVec v;
  v.head.assign(dim, Complex(1.0, 0.0));
  v.tail = TailDescriptor::convergent(Complex(1.0, 0.0), 0.0);
  return v;
}

SeqVec SeqVec::basis(std::size_t dim, std::size_t index) {
  SeqVec v = SeqVec::zero(dim);
  if (index >= dim)
    raise(ErrorCode::ConfigError, "basis index beyond head dimension");
  v.head[index] = Complex(1.0, 0.0);
  return v;
}

void SeqVec::validate(const char* where) const {
  if (head.empty()) raise(ErrorCode::ConfigError, std::string(where) + ": empty head");
  for (const Complex& z : head) require_finite(z, where);
  if (!(tail.bound >= 0.0) || !is_finite(tail.bound))
    raise(ErrorCode::ConfigError, std::string(where) + ": invalid tail bound");
  if (tail.kind == TailKind::ConvergentLimit) require_finite(tail.limit, where);
}

namespace {

double head_max_abs(const SeqVec& v) {
  double m = 0.0;
  for (const Complex& z : v.head) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

NormInterval sup_norm_interval(const SeqVec& v) {
  const double head_max = head_max_abs(v);
  double tail_lo = 0.0;
  double tail_hi = v.tail.bound;
  if (v.tail.kind == TailKind::ConvergentLimit) {
    const double l = std::abs(v.tail.limit);
    tail_lo = std::max(0.0, l - v.tail.bound);
    tail_hi = l + v.tail.bound;
  }
  NormInterval out;
  out.lo = std::max(head_max, tail_lo);
  out.hi = std::max(head_max, tail_hi);
  return out;
}

double norm_lower_with_limit(const SeqVec& v) {
  double lo = sup_norm_interval(v).lo;
  if (v.tail.kind == TailKind::ConvergentLimit)
    lo = std::max(lo, std::abs(v.tail.limit));
  return lo;
}

SeqVec combine(Complex alpha, const SeqVec& v, Complex beta, const SeqVec& w) {
  const std::size_t d = std::max(v.dim(), w.dim());
  SeqVec out;
  out.head.resize(d);
  const Complex cv = v.tail.center();
  const Complex cw = w.tail.center();
  for (std::size_t k = 0; k < d; ++k) {
    const Complex a = k < v.dim() ? v.head[k] : cv;
    const Complex b = k < w.dim() ? w.head[k] : cw;
    out.head[k] = alpha * a + beta * b;
  }
  const double bound = std::abs(alpha) * v.tail.bound + std::abs(beta) * w.tail.bound;
  if (v.tail.kind == TailKind::NullEnvelope && w.tail.kind == TailKind::NullEnvelope) {
    out.tail = TailDescriptor::null_envelope(bound);
  } else {
    out.tail = TailDescriptor::convergent(alpha * cv + beta * cw, bound);
  }
  return out;
}

NormInterval dist_interval(const SeqVec& v, const SeqVec& w) {
  return sup_norm_interval(combine(Complex(1.0, 0.0), v, Complex(-1.0, 0.0), w));
}

SeqVec truncate(const SeqVec& v, std::size_t d_new) {
  if (d_new < 1 || d_new > v.dim())
    raise(ErrorCode::ConfigError, "truncate: d_new out of range");
  SeqVec out;
  out.head.assign(v.head.begin(), v.head.begin() + static_cast<std::ptrdiff_t>(d_new));
  double bound = v.tail.bound;
  const Complex center = v.tail.center();
  for (std::size_t k = d_new; k < v.dim(); ++k)
    bound = std::max(bound, std::abs(v.head[k] - center));
  out.tail = v.tail;
  out.tail.bound = bound;
  return out;
}

}  // namespace orbitlab
