#include "orbitlab/families.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace orbitlab {

namespace {

std::vector<std::uint64_t> iota_indices(std::uint64_t horizon) {
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(horizon));
  for (std::uint64_t i = 0; i < horizon; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

/// sup over all coordinates of |x_k| (head exactly, tail via the descriptor).
double coordinate_sup(const SeqVec& x) {
  double m = x.tail.bound;
  if (x.tail.kind == TailKind::ConvergentLimit) m += std::abs(x.tail.limit);
  for (const Complex& z : x.head) m = std::max(m, std::abs(z));
  return m;
}

/// Monotone (nonincreasing) hull of c -> gap(q, c) * scale where
/// gap(q, c) = |exp(2 pi i q / 2^(c+1)) - 1|; beyond the scanned range the raw
/// value itself is already nonincreasing.
struct DyadicHullEnvelope {
  std::vector<double> hull;
  long long q = 1;
  double scale = 1.0;

  double operator()(unsigned c) const {
    if (c < hull.size()) return hull[c];
    return dyadic_unit_gap(q, c) * scale;
  }
};

DyadicHullEnvelope make_hull_envelope(long long q, double scale) {
  DyadicHullEnvelope env;
  env.q = q;
  env.scale = scale;
  unsigned c_mono = 0;
  const unsigned long long aq = static_cast<unsigned long long>(q < 0 ? -q : q);
  while (c_mono < 126 && (1ull << c_mono) < aq) ++c_mono;
  env.hull.resize(c_mono + 2);
  double running = 0.0;
  for (int c = static_cast<int>(c_mono) + 1; c >= 0; --c) {
    running = std::max(running, dyadic_unit_gap(q, static_cast<unsigned>(c)) * scale);
    env.hull[static_cast<std::size_t>(c)] = running;
  }
  return env;
}

}  // namespace

PointFamily diagonal_orbit_family(const DiagonalOperator& op, const SeqVec& x,
                                  std::uint64_t horizon) {
  x.validate("diagonal_orbit_family");
  std::ostringstream desc;
  desc << "orbit {T^n x : n < " << horizon << "} under a unimodular diagonal";
  return PointFamily::seqvec(
      iota_indices(horizon),
      [op, x](std::uint64_t n) {
        return diagonal_power_vector(op, x, static_cast<std::int64_t>(n));
      },
      desc.str());
}

PointFamily diagonal_difference_family(const DiagonalOperator& op, const SeqVec& x,
                                       std::uint64_t m, std::uint64_t horizon) {
  x.validate("diagonal_difference_family");
  if (m < 1 || m > (1u << 20))
    raise(ErrorCode::ConfigError, "difference family: m must be in [1, 2^20]");
  std::ostringstream desc;
  desc << "difference family {T^n (T^" << m << " - I) x : n < " << horizon << "}";
  PointFamily fam = PointFamily::seqvec(
      iota_indices(horizon),
      [op, x, m](std::uint64_t n) {
        return diagonal_power_diff_vector(op, x, static_cast<std::int64_t>(n + m),
                                          static_cast<std::int64_t>(n));
      },
      desc.str());

  // Tail certificate: available exactly when b^m == 1, where the members live
  // in c0 with |coordinate c| = |a_c^m - 1| |x_c|.
  if (op.rule() == DiagonalOperator::Rule::DyadicPhase &&
      op.limit_power(static_cast<std::int64_t>(m)) == Complex(1.0, 0.0)) {
    const long long q = static_cast<long long>(m) * op.dyadic_num();
    TailCertificateData cert;
    cert.envelope = make_hull_envelope(q, coordinate_sup(x));
    cert.monotone_proof = true;
    std::ostringstream prov;
    prov << "tau(c) = |a_c^" << m << " - 1| * sup|x| (monotone hull), b^" << m << " = 1";
    cert.provenance = prov.str();
    fam.set_tail_certificate(std::move(cert));
  }
  return fam;
}

PointFamily example1_orbit_family(const Example1Operator& op, std::uint64_t horizon) {
  std::ostringstream desc;
  desc << "Example-1 orbit of x(t) = (sin(t/2^n))_n, shift a = " << op.a;
  return PointFamily::closed_form(
      iota_indices(horizon),
      [op](std::uint64_t p, std::uint64_t q) {
        return example1_orbit_distance(op, static_cast<std::int64_t>(p),
                                       static_cast<std::int64_t>(q));
      },
      desc.str());
}

PointFamily example1_diff_family(const Example1Operator& op, std::uint64_t horizon,
                                 std::size_t head_dim) {
  if (head_dim < 1 || head_dim > 512)
    raise(ErrorCode::ConfigError, "example1 diff family: head_dim out of range");
  std::ostringstream desc;
  desc << "Example-1 difference orbit of y = (T - I) x, shift a = " << op.a;
  PointFamily fam = PointFamily::closed_form(
      iota_indices(horizon),
      [op](std::uint64_t p, std::uint64_t q) {
        return example1_diff_orbit_distance(op, static_cast<std::int64_t>(p),
                                            static_cast<std::int64_t>(q));
      },
      desc.str());

  // Every member shares the uniform-in-t coordinate envelope
  // tau(n) = 2|sin(a/2^(n+1))| (the compactness mechanism of the example).
  const double a = op.a;
  SeqVec envelope_vec;
  envelope_vec.head.resize(head_dim);
  for (std::size_t n = 0; n < head_dim; ++n)
    envelope_vec.head[n] =
        Complex(2.0 * std::abs(std::sin(a * std::ldexp(1.0, -static_cast<int>(n) - 1))), 0.0);
  envelope_vec.tail = TailDescriptor::null_envelope(
      2.0 * std::abs(std::sin(a * std::ldexp(1.0, -static_cast<int>(head_dim) - 1))));
  fam.attach_seq_members([envelope_vec](std::uint64_t) { return envelope_vec; });

  // Monotone hull of tau (tau itself decreases once a/2^(n+1) <= pi/2).
  unsigned c_mono = 0;
  while (c_mono < 64 && a * std::ldexp(1.0, -static_cast<int>(c_mono) - 1) > std::numbers::pi / 2)
    ++c_mono;
  std::vector<double> hull(c_mono + 2);
  double running = 0.0;
  for (int c = static_cast<int>(c_mono) + 1; c >= 0; --c) {
    running = std::max(running,
                       2.0 * std::abs(std::sin(a * std::ldexp(1.0, -c - 1))));
    hull[static_cast<std::size_t>(c)] = running;
  }
  TailCertificateData cert;
  cert.envelope = [hull, a](unsigned c) {
    if (c < hull.size()) return hull[c];
    return 2.0 * std::abs(std::sin(a * std::ldexp(1.0, -static_cast<int>(c) - 1)));
  };
  cert.monotone_proof = true;
  cert.provenance = "tau(n) = 2|sin(a/2^(n+1))|, uniform in t (monotone hull)";
  fam.set_tail_certificate(std::move(cert));
  return fam;
}

namespace {

struct MatrixOrbitCache {
  std::mutex mu;
  std::vector<Eigen::VectorXcd> powers;  // powers[n] = T^n x
};

std::shared_ptr<MatrixOrbitCache> make_orbit_cache(const Eigen::VectorXcd& x) {
  auto cache = std::make_shared<MatrixOrbitCache>();
  cache->powers.push_back(x);
  return cache;
}

Eigen::VectorXcd orbit_power(const MatrixOperator& op,
                             const std::shared_ptr<MatrixOrbitCache>& cache,
                             std::uint64_t n) {
  std::lock_guard<std::mutex> lock(cache->mu);
  while (cache->powers.size() <= n)
    cache->powers.push_back(op.entries * cache->powers.back());
  return cache->powers[static_cast<std::size_t>(n)];
}

}  // namespace

PointFamily matrix_orbit_family(const MatrixOperator& op, const Eigen::VectorXcd& x,
                                std::uint64_t horizon) {
  if (x.size() != op.dim())
    raise(ErrorCode::DimensionMismatch, "matrix orbit family: dimension mismatch");
  auto cache = make_orbit_cache(x);
  std::ostringstream desc;
  desc << "matrix orbit {T^n x : n < " << horizon << "}, dim " << op.dim();
  return PointFamily::finite_dim(
      iota_indices(horizon),
      [op, cache](std::uint64_t n) { return orbit_power(op, cache, n); }, desc.str());
}

PointFamily matrix_difference_family(const MatrixOperator& op, const Eigen::VectorXcd& x,
                                     std::uint64_t m, std::uint64_t horizon) {
  if (x.size() != op.dim())
    raise(ErrorCode::DimensionMismatch, "matrix difference family: dimension mismatch");
  if (m < 1) raise(ErrorCode::ConfigError, "difference family: m >= 1");
  auto cache = make_orbit_cache(x);
  std::ostringstream desc;
  desc << "matrix difference family {T^n (T^" << m << " - I) x : n < " << horizon << "}";
  return PointFamily::finite_dim(
      iota_indices(horizon),
      [op, cache, m](std::uint64_t n) {
        return orbit_power(op, cache, n + m) - orbit_power(op, cache, n);
      },
      desc.str());
}

}  // namespace orbitlab
