#include "orbitlab/witness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "orbitlab/families.hpp"
#include "orbitlab/random.hpp"

namespace orbitlab {

namespace {

constexpr double kNumTol = 1e-9;

// Candidate gaps c * 2^e with small odd c, ascending.  Dyadic rotations fix
// all coordinates below the gap's 2-adic valuation exactly, so this schedule
// finds the alignment gaps the induction needs in O(log horizon) probes.
std::vector<std::uint64_t> gap_schedule(std::uint64_t gap_min, std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  for (unsigned e = 0; e < 63; ++e) {
    for (std::uint64_t c = 1; c <= 15; c += 2) {
      if (c > (std::uint64_t(1) << (63 - e)) / 2) break;
      const std::uint64_t d = c << e;
      if (d >= std::max<std::uint64_t>(1, gap_min) && d <= horizon) out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Pads exact vectors (tail bound 0) to the deep head length used by the
/// witness search, so the dyadic scales of large extracted exponents stay
/// inside the head where norms are evaluated exactly.
SeqVec extend_head_for_witness(const DiagonalOperator& op, const SeqVec& x) {
  const std::size_t target = std::min<std::size_t>(op.max_head_dim(), 120);
  if (x.dim() >= target || x.tail.bound != 0.0) return x;
  SeqVec out = x;
  out.head.resize(target, x.tail.center());
  return out;
}

double move_under_gap(const DiagonalOperator& op, const std::vector<SeqVec>& vecs,
                      std::uint64_t gap) {
  double worst = 0.0;
  for (const SeqVec& v : vecs) {
    const SeqVec moved = apply_power(op, static_cast<std::int64_t>(gap), v);
    worst = std::max(worst, dist_interval(moved, v).hi);
  }
  return worst;
}

}  // namespace

std::uint64_t WitnessConfig::horizon_for(const DiagonalOperator& op) const {
  if (horizon > 0) return horizon;
  return op.rule() == DiagonalOperator::Rule::DyadicPhase ? kDyadicWitnessHorizon
                                                          : (std::uint64_t(1) << 12);
}

std::uint64_t WitnessConfig::horizon_for(const MatrixOperator&) const {
  return horizon > 0 ? horizon : (std::uint64_t(1) << 12);
}

// --- Lemma Pbig -----------------------------------------------------------------

PbigResult pbig_extract(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                        const SeqVec& x, const WitnessConfig& cfg) {
  x.validate("pbig_extract");
  PbigResult out;

  const std::uint64_t analysis_horizon =
      cfg.analysis.horizons.empty() ? 4096 : cfg.analysis.horizons.back();

  // (T - I) x must be a.a.p.: certified or evidenced compact D1 orbit.
  PointFamily d1 = diagonal_difference_family(op, x, 1, analysis_horizon);
  out.diff_verdict = verdict(d1, cfg.analysis);
  if (out.diff_verdict.verdict != CompactnessClass::CompactCertified &&
      out.diff_verdict.verdict != CompactnessClass::CompactEvidence)
    raise(ErrorCode::ProjectionUnavailable,
          "(T-I)x is not verified a.a.p.; the difference orbit leaves the domain of P");

  out.stable_convergence = stable_part_convergence(op, split, x, 64, kNumTol);
  if (out.stable_convergence.verdict != ConvergenceVerdict::Converged)
    raise(ErrorCode::Internal, "stable part of a diagonal split failed to converge");

  PointFamily orbit = diagonal_orbit_family(op, x, analysis_horizon);
  out.orbit_verdict = verdict(orbit, cfg.analysis);
  if (out.orbit_verdict.verdict != CompactnessClass::NotCompactEvidence)
    raise(ErrorCode::NoSeparation,
          "orbit shows no packing separation at the analysis horizon");

  out.delta0 = 0.5 * out.orbit_verdict.delta;
  out.delta = (1.0 - cfg.delta_margin) * out.delta0;

  // On E_st = {0} the (I-P) parts vanish: the Cauchy trimming drops nothing
  // and P-distances coincide with full orbit distances.
  out.trimmed_prefix = 0;
  out.stream.range_end = cfg.horizon_for(op);

  // The pairs consumed downstream are re-verified at use; here spot-check the
  // packing witnesses against the claimed P-separation.
  for (std::size_t i = 0; i + 1 < std::min<std::size_t>(out.orbit_verdict.witness_indices.size(), 8); ++i) {
    const std::uint64_t a = out.orbit_verdict.witness_indices[i];
    const std::uint64_t b = out.orbit_verdict.witness_indices[i + 1];
    const SeqVec diff = diagonal_power_diff_vector(op, x, static_cast<std::int64_t>(b),
                                                   static_cast<std::int64_t>(a));
    if (!in_projection_domain(diff))
      raise(ErrorCode::ProjectionUnavailable,
            "orbit difference leaves the domain of P");
    if (sup_norm_interval(diff).lo < out.delta - kNumTol)
      raise(ErrorCode::Internal, "witness pair violates the Pbig separation");
  }
  return out;
}

PbigResult pbig_extract(const MatrixOperator& op, const MatrixJdlgSplit& split,
                        const Eigen::VectorXcd& x, const WitnessConfig& cfg) {
  PbigResult out;
  const std::uint64_t analysis_horizon =
      cfg.analysis.horizons.empty() ? 4096 : cfg.analysis.horizons.back();
  PointFamily d1 = matrix_difference_family(op, x, 1, analysis_horizon);
  out.diff_verdict = verdict(d1, cfg.analysis);
  out.stable_convergence = stable_part_convergence(op, split, x, 256, 1e-6);
  PointFamily orbit = matrix_orbit_family(op, x, analysis_horizon);
  out.orbit_verdict = verdict(orbit, cfg.analysis);
  if (out.orbit_verdict.verdict != CompactnessClass::NotCompactEvidence)
    raise(ErrorCode::NoSeparation,
          "orbit is relatively compact (bounded in finite dimension)");
  raise(ErrorCode::Internal, "unreachable: finite-dimensional orbits are compact");
}

// --- Lemma multap ------------------------------------------------------------------

MultapResult multap_refine(const DiagonalOperator& op, const std::vector<SeqVec>& aap_list,
                           const IndexStream& n_seq, double tol, std::uint64_t gap_min,
                           std::uint64_t horizon) {
  if (!(tol > 0.0)) raise(ErrorCode::ConfigError, "multap_refine: tol must be > 0");
  MultapResult out;
  out.best_tol = std::numeric_limits<double>::infinity();

  if (aap_list.empty()) {
    // Vacuous: any gap-compliant pair works.
    out.status = SearchStatus::Completed;
    out.refined = {0, std::max<std::uint64_t>(1, gap_min)};
    out.achieved_tol = 0.0;
    out.best_tol = 0.0;
    return out;
  }

  if (n_seq.is_range()) {
    const std::uint64_t end = std::min(horizon, n_seq.range_end);
    for (const std::uint64_t gap : gap_schedule(gap_min, end > 0 ? end - 1 : 0)) {
      const double move = move_under_gap(op, aap_list, gap);
      out.best_tol = std::min(out.best_tol, move);
      if (move <= tol) {
        out.refined.clear();
        for (std::uint64_t v = 0; v < end && out.refined.size() < 16; v += gap) {
          out.refined.push_back(v);
          if (gap > end - 1 - v) break;
        }
        out.achieved_tol = move;
        out.status = SearchStatus::Completed;
        return out;
      }
    }
    out.status = SearchStatus::Exhausted;
    return out;
  }

  // Explicit subsequence: group the product-vector orbit into tol/2-net cells
  // and pick a cell with >= 2 gap-compliant members.
  const std::vector<std::uint64_t>& ns = n_seq.explicit_list;
  std::map<std::uint64_t, std::vector<SeqVec>> powered;
  auto power_of = [&](std::uint64_t n) -> const std::vector<SeqVec>& {
    auto it = powered.find(n);
    if (it != powered.end()) return it->second;
    std::vector<SeqVec> moved;
    moved.reserve(aap_list.size());
    for (const SeqVec& v : aap_list)
      moved.push_back(apply_power(op, static_cast<std::int64_t>(n), v));
    return powered.emplace(n, std::move(moved)).first->second;
  };
  auto product_dist = [&](std::uint64_t a, std::uint64_t b) {
    const auto& va = power_of(a);
    const auto& vb = power_of(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i)
      worst = std::max(worst, dist_interval(va[i], vb[i]).hi);
    return worst;
  };

  std::vector<std::uint64_t> cell_center;
  std::vector<std::vector<std::uint64_t>> cell_members;
  for (const std::uint64_t n : ns) {
    bool placed = false;
    for (std::size_t c = 0; c < cell_center.size(); ++c) {
      if (product_dist(n, cell_center[c]) <= 0.5 * tol) {
        cell_members[c].push_back(n);
        placed = true;
        break;
      }
    }
    if (!placed) {
      cell_center.push_back(n);
      cell_members.push_back({n});
    }
  }
  for (std::size_t c = 0; c < cell_members.size(); ++c) {
    std::vector<std::uint64_t> picked;
    for (const std::uint64_t n : cell_members[c])
      if (picked.empty() || n >= picked.back() + gap_min) picked.push_back(n);
    if (picked.size() < 2) continue;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < picked.size(); ++i)
      worst = std::max(worst, product_dist(picked[i], picked[i + 1]));
    out.best_tol = std::min(out.best_tol, worst);
    if (worst <= tol) {
      out.refined = std::move(picked);
      out.achieved_tol = worst;
      out.status = SearchStatus::Completed;
      return out;
    }
  }
  // Diagnostic: best gap-compliant pair over the explicit list.
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = i + 1; j < ns.size(); ++j)
      if (ns[j] >= ns[i] + gap_min)
        out.best_tol = std::min(out.best_tol, product_dist(ns[i], ns[j]));
  out.status = SearchStatus::Exhausted;
  return out;
}

// --- the induction -----------------------------------------------------------------

WitnessState build_k_sequence(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                              const SeqVec& x, const WitnessConfig& cfg,
                              const PbigResult& pbig) {
  if (cfg.m_target < 1 || cfg.m_target > 16)
    raise(ErrorCode::ConfigError, "witness m_target must be in [1, 16]");
  WitnessState state;
  state.M = std::max(1.0, split.power_bound.M);
  state.delta = pbig.delta;
  const double norm_floor = pbig.delta / state.M;
  const std::uint64_t horizon = std::min(cfg.horizon_for(op), pbig.stream.range_end);
  const SeqVec xw = extend_head_for_witness(op, x);

  auto diff_from_origin = [&](std::uint64_t k) {
    return diagonal_power_diff_vector(op, xw, static_cast<std::int64_t>(k), 0);
  };

  // k_1: ||P(T^{k_1} x - x)|| > delta / M.
  {
    bool found = false;
    for (const std::uint64_t k : gap_schedule(1, horizon)) {
      const SeqVec w = diff_from_origin(k);
      if (!in_projection_domain(w)) continue;
      const double lo = sup_norm_interval(project(split, w)).lo;
      if (lo > norm_floor) {
        state.k_seq.push_back(k);
        state.norm_lower_bounds.push_back(lo);
        found = true;
        break;
      }
    }
    if (!found) {
      state.status = SearchStatus::Exhausted;
      state.exhausted_stage = 0;
      return state;
    }
  }

  for (int m = 1; m < cfg.m_target; ++m) {
    const double tol_m = 1.0 / (state.M * std::ldexp(1.0, m));
    // All 2^m difference vectors T^{SumF} x - x, F subset of {1..m}.
    std::vector<SeqVec> v_f;
    v_f.reserve(std::size_t(1) << m);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
      std::uint64_t sum = 0;
      for (int i = 0; i < m; ++i)
        if (mask & (std::uint64_t(1) << i)) sum += state.k_seq[static_cast<std::size_t>(i)];
      SeqVec w = diff_from_origin(sum);
      if (!in_projection_domain(w))
        raise(ErrorCode::ProjectionUnavailable,
              "subset-sum difference leaves the domain of P");
      v_f.push_back(project(split, w));
    }

    const std::uint64_t gap_min = state.k_seq.back() + 1;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const std::uint64_t gap : gap_schedule(gap_min, horizon)) {
      const double move = move_under_gap(op, v_f, gap);
      best = std::min(best, move);
      if (move > tol_m) continue;
      const SeqVec w = diff_from_origin(gap);
      if (!in_projection_domain(w)) continue;
      const double lo = sup_norm_interval(project(split, w)).lo;
      if (lo < norm_floor - kNumTol) continue;
      state.k_seq.push_back(gap);
      state.sigma_residuals.push_back(move);
      state.norm_lower_bounds.push_back(lo);
      found = true;
      break;
    }
    if (!found) {
      state.status = SearchStatus::Exhausted;
      state.exhausted_stage = m;
      state.best_tol_achieved = best;
      return state;
    }
  }
  state.status = SearchStatus::Completed;
  return state;
}

// --- Bessaga-Pelczynski certificate ---------------------------------------------------

C0CopyCertificate bp_certificate(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                                 const SeqVec& x, const WitnessState& state,
                                 const WitnessConfig& cfg) {
  if (state.status != SearchStatus::Completed || state.k_seq.size() < 4)
    raise(ErrorCode::ConfigError, "bp_certificate needs a completed state with >= 4 exponents");
  const SeqVec xw = extend_head_for_witness(op, x);
  const std::size_t m = state.k_seq.size();

  C0CopyCertificate cert;
  cert.k_seq = state.k_seq;
  cert.M = state.M;
  cert.delta = state.delta;
  cert.delta_over_M = state.delta / state.M;
  cert.sigma_residuals = state.sigma_residuals;

  cert.x_vectors.reserve(m);
  double norm_lower = std::numeric_limits<double>::infinity();
  for (const std::uint64_t k : state.k_seq) {
    SeqVec w = diagonal_power_diff_vector(op, xw, static_cast<std::int64_t>(k), 0);
    SeqVec xi = project(split, w);
    norm_lower = std::min(norm_lower, sup_norm_interval(xi).lo);
    cert.x_vectors.push_back(std::move(xi));
  }
  cert.norm_lower = norm_lower;
  if (cert.norm_lower < cert.delta_over_M - kNumTol)
    raise(ErrorCode::BpViolation, "norm floor below delta/M");

  const double x_norm = sup_norm_interval(xw).hi;
  double tail_series = 0.0;
  for (std::size_t i = 2; i <= m; ++i) tail_series += std::ldexp(1.0, 1 - static_cast<int>(i));
  cert.M_prime = tail_series + cert.M * x_norm + cert.M * cert.M * x_norm;

  auto subset_sum_hi = [&](std::uint64_t mask) {
    SeqVec acc = SeqVec::zero(cert.x_vectors.front().dim());
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::uint64_t(1) << i))
        acc = combine(Complex(1.0, 0.0), acc, Complex(1.0, 0.0), cert.x_vectors[i]);
    return sup_norm_interval(acc).hi;
  };

  const int exhaustive_up_to = std::max(1, cfg.exhaustive_up_to);
  double worst = 0.0;
  std::uint64_t worst_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << m); ++mask) {
    if (std::popcount(mask) > exhaustive_up_to) continue;
    const double hi = subset_sum_hi(mask);
    ++cert.subsets_checked;
    if (hi > worst) {
      worst = hi;
      worst_mask = mask;
    }
  }
  if (static_cast<int>(m) > exhaustive_up_to) {
    Rng rng(cfg.seed);
    for (int s = 0; s < cfg.random_samples; ++s) {
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (rng.uniform() < 0.5) mask |= std::uint64_t(1) << i;
      if (std::popcount(mask) <= exhaustive_up_to) continue;
      const double hi = subset_sum_hi(mask);
      ++cert.subsets_checked;
      if (hi > worst) {
        worst = hi;
        worst_mask = mask;
      }
    }
  }
  cert.partial_sum_bound = worst;
  if (worst > cert.M_prime + kNumTol) {
    std::ostringstream os;
    os << "subset mask " << worst_mask << " sums to " << worst << " > M' = " << cert.M_prime;
    raise(ErrorCode::BpViolation, os.str());
  }

  // Sign patterns in {-1, 0, +1}^m (exhaustive for m <= 8).
  auto pattern_interval = [&](const std::vector<int>& alpha) {
    SeqVec acc = SeqVec::zero(cert.x_vectors.front().dim());
    for (std::size_t i = 0; i < m; ++i) {
      if (alpha[i] == 0) continue;
      acc = combine(Complex(1.0, 0.0), acc,
                    Complex(static_cast<double>(alpha[i]), 0.0), cert.x_vectors[i]);
    }
    return sup_norm_interval(acc);
  };
  double c_low = std::numeric_limits<double>::infinity();
  double c_high = 0.0;
  if (m <= 8) {
    std::vector<int> alpha(m, -1);
    for (;;) {
      bool all_zero = std::all_of(alpha.begin(), alpha.end(), [](int a) { return a == 0; });
      if (!all_zero) {
        const NormInterval ni = pattern_interval(alpha);
        c_low = std::min(c_low, ni.lo);
        c_high = std::max(c_high, ni.hi);
      }
      std::size_t pos = 0;
      while (pos < m && alpha[pos] == 1) alpha[pos++] = -1;
      if (pos == m) break;
      ++alpha[pos];
    }
  } else {
    Rng rng(cfg.seed + 1);
    for (std::size_t i = 0; i < m; ++i) {  // singletons first
      std::vector<int> alpha(m, 0);
      alpha[i] = 1;
      const NormInterval ni = pattern_interval(alpha);
      c_low = std::min(c_low, ni.lo);
      c_high = std::max(c_high, ni.hi);
    }
    for (int s = 0; s < cfg.random_samples; ++s) {
      std::vector<int> alpha(m);
      bool all_zero = true;
      for (std::size_t i = 0; i < m; ++i) {
        alpha[i] = static_cast<int>(rng.uniform_index(3)) - 1;
        all_zero = all_zero && alpha[i] == 0;
      }
      if (all_zero) continue;
      const NormInterval ni = pattern_interval(alpha);
      c_low = std::min(c_low, ni.lo);
      c_high = std::max(c_high, ni.hi);
    }
  }
  cert.c_low = c_low;
  cert.c_high = c_high;
  if (!(cert.c_low > 0.0))
    raise(ErrorCode::BpViolation, "sign-pattern lower bound not positive");
  return cert;
}

// --- telescoping ----------------------------------------------------------------------

double telescope_check(const DiagonalOperator& op, const SeqVec& x, std::uint64_t n,
                       std::uint64_t m) {
  if (m < 1) raise(ErrorCode::ConfigError, "telescope_check: m >= 1");
  // Integer exponent coefficients of (T^{n+m} - T^n) - sum_j (T^{n+j+1} - T^{n+j}).
  std::map<std::uint64_t, long long> coeff;
  coeff[n + m] += 1;
  coeff[n] -= 1;
  for (std::uint64_t j = 0; j < m; ++j) {
    coeff[n + j + 1] -= 1;
    coeff[n + j] += 1;
  }
  SeqVec acc = SeqVec::zero(x.dim());
  bool any = false;
  for (const auto& [k, c] : coeff) {
    if (c == 0) continue;
    acc = combine(Complex(1.0, 0.0), acc, Complex(static_cast<double>(c), 0.0),
                  diagonal_power_vector(op, x, static_cast<std::int64_t>(k)));
    any = true;
  }
  if (!any) return 0.0;
  return sup_norm_interval(acc).hi;
}

double telescope_check(const MatrixOperator& op, const Eigen::VectorXcd& x,
                       std::uint64_t n, std::uint64_t m) {
  if (m < 1) raise(ErrorCode::ConfigError, "telescope_check: m >= 1");
  std::vector<Eigen::VectorXcd> v;  // v[j] = T^{n+j} x
  v.reserve(m + 1);
  v.push_back(apply_power(op, n, x));
  for (std::uint64_t j = 0; j < m; ++j) v.push_back(op.entries * v.back());
  Eigen::VectorXcd lhs = v[m] - v[0];
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(x.size());
  for (std::uint64_t j = 0; j < m; ++j) rhs += v[j + 1] - v[j];
  return (lhs - rhs).norm();
}

}  // namespace orbitlab
