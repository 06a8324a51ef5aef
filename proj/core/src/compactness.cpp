#include "orbitlab/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "orbitlab/parallel.hpp"

namespace orbitlab {

// Memoizes lazily built members and distance evaluations; greedy scans at
// different thresholds re-query the same pairs.  Guarded for the parallel
// entropy cells.
struct FamilyCache {
  std::mutex mu;
  std::vector<std::unique_ptr<SeqVec>> seq;
  std::vector<std::unique_ptr<Eigen::VectorXcd>> vec;
  std::unordered_map<std::uint64_t, MetricInterval> dist;
};

PointFamily PointFamily::closed_form(
    std::vector<std::uint64_t> index_set,
    std::function<double(std::uint64_t, std::uint64_t)> metric, std::string description) {
  PointFamily f;
  f.index_set_ = std::move(index_set);
  f.closed_metric_ = std::move(metric);
  f.description_ = std::move(description);
  f.cache_ = std::make_shared<FamilyCache>();
  return f;
}

PointFamily PointFamily::seqvec(std::vector<std::uint64_t> index_set,
                                std::function<SeqVec(std::uint64_t)> member,
                                std::string description) {
  PointFamily f;
  f.index_set_ = std::move(index_set);
  f.seq_builder_ = std::move(member);
  f.description_ = std::move(description);
  f.cache_ = std::make_shared<FamilyCache>();
  f.cache_->seq.resize(f.index_set_.size());
  return f;
}

PointFamily PointFamily::finite_dim(std::vector<std::uint64_t> index_set,
                                    std::function<Eigen::VectorXcd(std::uint64_t)> member,
                                    std::string description) {
  PointFamily f;
  f.index_set_ = std::move(index_set);
  f.vec_builder_ = std::move(member);
  f.description_ = std::move(description);
  f.cache_ = std::make_shared<FamilyCache>();
  f.cache_->vec.resize(f.index_set_.size());
  return f;
}

void PointFamily::attach_seq_members(std::function<SeqVec(std::uint64_t)> member) {
  seq_builder_ = std::move(member);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->seq.resize(index_set_.size());
}

const SeqVec& PointFamily::seq_member(std::size_t pos) const {
  if (!seq_builder_ || pos >= index_set_.size())
    raise(ErrorCode::Internal, "seq_member out of range");
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->seq[pos]) return *cache_->seq[pos];
  }
  auto built = std::make_unique<SeqVec>(seq_builder_(index_set_[pos]));
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->seq[pos]) cache_->seq[pos] = std::move(built);
  return *cache_->seq[pos];
}

const Eigen::VectorXcd& PointFamily::vec_member(std::size_t pos) const {
  if (!vec_builder_ || pos >= index_set_.size())
    raise(ErrorCode::Internal, "vec_member out of range");
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->vec[pos]) return *cache_->vec[pos];
  }
  auto built = std::make_unique<Eigen::VectorXcd>(vec_builder_(index_set_[pos]));
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->vec[pos]) cache_->vec[pos] = std::move(built);
  return *cache_->vec[pos];
}

double PointFamily::finite_dim_bound(std::size_t horizon) const {
  if (!vec_builder_) raise(ErrorCode::Internal, "not a finite-dimensional family");
  double bound = 0.0;
  for (std::size_t i = 0; i < std::min(horizon, index_set_.size()); ++i)
    bound = std::max(bound, vec_member(i).norm());
  return bound;
}

MetricInterval PointFamily::distance(std::size_t pos_a, std::size_t pos_b) const {
  if (pos_a == pos_b) return MetricInterval{0.0, 0.0};
  if (pos_a > pos_b) std::swap(pos_a, pos_b);
  const std::uint64_t key = (static_cast<std::uint64_t>(pos_a) << 32) |
                            static_cast<std::uint64_t>(pos_b);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (auto it = cache_->dist.find(key); it != cache_->dist.end()) return it->second;
  }
  MetricInterval out;
  if (closed_metric_) {
    const double d = closed_metric_(index_set_[pos_a], index_set_[pos_b]);
    out = MetricInterval{d, d};
  } else if (seq_builder_) {
    const NormInterval ni = dist_interval(seq_member(pos_a), seq_member(pos_b));
    out = MetricInterval{ni.lo, ni.hi};
  } else if (vec_builder_) {
    const double d = (vec_member(pos_a) - vec_member(pos_b)).norm();
    out = MetricInterval{d, d};
  } else {
    raise(ErrorCode::Internal, "family has no metric");
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->dist.emplace(key, out);
  return out;
}

// --- greedy nets and packings -------------------------------------------------

NetResult greedy_net(const PointFamily& family, double eps, std::size_t horizon,
                     std::size_t center_cap) {
  if (!(eps > 0.0)) raise(ErrorCode::ConfigError, "greedy_net: eps must be > 0");
  const std::size_t n = std::min(horizon, family.size());
  NetResult out;
  for (std::size_t p = 0; p < n; ++p) {
    bool is_center = true;
    for (const std::size_t c : out.centers) {
      if (family.distance(p, c).lo <= eps) {
        is_center = false;
        break;
      }
    }
    if (is_center) {
      out.centers.push_back(p);
      if (center_cap > 0 && out.centers.size() >= center_cap) {
        out.capped = true;
        break;
      }
    }
  }
  if (out.capped) {
    out.covered = false;
    return out;
  }
  for (std::size_t p = 0; p < n; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (const std::size_t c : out.centers)
      best = std::min(best, family.distance(p, c).hi);
    out.covering_radius_hi = std::max(out.covering_radius_hi, best);
  }
  out.covered = out.covering_radius_hi <= eps + 1e-9;
  return out;
}

PackingResult greedy_packing(const PointFamily& family, double delta,
                             std::size_t horizon, std::size_t k_target) {
  if (!(delta > 0.0)) raise(ErrorCode::ConfigError, "greedy_packing: delta must be > 0");
  const std::size_t n = std::min(horizon, family.size());
  PackingResult out;
  for (std::size_t p = 0; p < n; ++p) {
    bool separated = true;
    for (const std::size_t w : out.witnesses) {
      if (family.distance(p, w).lo < delta) {
        separated = false;
        break;
      }
    }
    if (separated) {
      out.witnesses.push_back(p);
      if (k_target > 0 && out.witnesses.size() >= k_target) {
        out.capped = true;
        break;
      }
    }
  }
  out.min_pairwise_lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.witnesses.size(); ++i)
    for (std::size_t j = i + 1; j < out.witnesses.size(); ++j)
      out.min_pairwise_lo =
          std::min(out.min_pairwise_lo, family.distance(out.witnesses[i], out.witnesses[j]).lo);
  if (out.witnesses.size() < 2) out.min_pairwise_lo = 0.0;
  if (out.min_pairwise_lo < delta && out.witnesses.size() >= 2)
    raise(ErrorCode::Internal, "packing soundness re-verification failed");
  return out;
}

EntropyTable entropy_table(const PointFamily& family, const std::vector<double>& eps_grid,
                           const std::vector<std::uint64_t>& horizons,
                           std::size_t net_cap) {
  if (eps_grid.empty() || !std::is_sorted(eps_grid.rbegin(), eps_grid.rend()))
    raise(ErrorCode::ConfigError, "entropy_table: eps grid must be descending");
  if (horizons.empty() || !std::is_sorted(horizons.begin(), horizons.end()))
    raise(ErrorCode::ConfigError, "entropy_table: horizons must be ascending");
  EntropyTable table;
  table.eps_grid = eps_grid;
  table.horizons = horizons;
  table.cells.resize(eps_grid.size() * horizons.size());
  parallel_for(table.cells.size(), [&](std::size_t cell) {
    const std::size_t ei = cell / horizons.size();
    const std::size_t hi = cell % horizons.size();
    const NetResult net = greedy_net(family, eps_grid[ei],
                                     static_cast<std::size_t>(horizons[hi]), net_cap);
    EntropyCell& c = table.cells[cell];
    c.eps = eps_grid[ei];
    c.horizon = horizons[hi];
    c.net_size = net.centers.size();
    c.capped = net.capped;
    c.covered = net.covered;
  });

  const std::size_t top_begin = horizons.size() - (horizons.size() + 1) / 2;
  for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
    bool stable = true;
    const EntropyCell& ref = table.cells[ei * horizons.size() + top_begin];
    for (std::size_t hi = top_begin; hi < horizons.size(); ++hi) {
      const EntropyCell& c = table.cells[ei * horizons.size() + hi];
      if (c.capped || !c.covered || c.net_size != ref.net_size) stable = false;
    }
    table.flags.push_back(stable ? EpsFlag::Stable : EpsFlag::Growing);
  }
  return table;
}

// --- certificates -----------------------------------------------------------------

const char* compactness_class_name(CompactnessClass v) {
  switch (v) {
    case CompactnessClass::CompactCertified: return "COMPACT_CERTIFIED";
    case CompactnessClass::CompactEvidence: return "COMPACT_EVIDENCE";
    case CompactnessClass::NotCompactEvidence: return "NOT_COMPACT_EVIDENCE";
    case CompactnessClass::Unknown: return "UNKNOWN";
  }
  return "?";
}

TailCertificateOutcome tail_uniform_certificate(const PointFamily& family,
                                                std::size_t horizon) {
  TailCertificateOutcome out;
  if (!family.tail_certificate() || !family.has_seqvec_members()) {
    out.provenance = "no tail certificate supplied";
    return out;
  }
  const TailCertificateData& cert = *family.tail_certificate();
  if (!cert.monotone_proof) {
    out.provenance = "envelope lacks a monotonicity proof";
    return out;
  }
  const std::size_t n = std::min(horizon, family.size());
  if (n == 0) {
    out.certified = true;
    out.provenance = "empty family";
    return out;
  }
  const std::size_t d = family.seq_member(0).dim();
  // Spot-check monotone nonincreasing tau on the head range.
  for (unsigned k = 0; k + 1 <= d; ++k) {
    if (cert.envelope(k) + 1e-15 < cert.envelope(k + 1)) {
      out.provenance = "envelope not nonincreasing on the head range";
      return out;
    }
  }
  const double slack = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    const SeqVec& v = family.seq_member(i);
    for (std::size_t k = 0; k < v.dim(); ++k) {
      if (std::abs(v.head[k]) > cert.envelope(static_cast<unsigned>(k)) + slack) {
        out.violating_member = i;
        out.violating_coordinate = static_cast<unsigned>(k);
        out.provenance = "head coordinate exceeds the envelope";
        return out;
      }
    }
    const double tail_allow = cert.envelope(static_cast<unsigned>(v.dim())) + slack;
    const double tail_dev =
        v.tail.bound + (v.tail.kind == TailKind::ConvergentLimit ? std::abs(v.tail.limit) : 0.0);
    if (tail_dev > tail_allow) {
      out.violating_member = i;
      out.violating_coordinate = static_cast<unsigned>(v.dim());
      out.provenance = "tail bound exceeds the envelope at the head boundary";
      return out;
    }
  }
  out.certified = true;
  std::ostringstream os;
  os << "bounded + uniformly small tails => totally bounded in c0; envelope: "
     << cert.provenance;
  out.provenance = os.str();
  return out;
}

// --- verdict pipeline ---------------------------------------------------------------

namespace {

double sampled_diameter_lo(const PointFamily& family, std::size_t horizon) {
  const std::size_t n = std::min(horizon, family.size());
  double diam = 0.0;
  // All pairs among the first 128 positions, then stride-doubled long pairs.
  const std::size_t dense = std::min<std::size_t>(n, 128);
  for (std::size_t i = 0; i < dense; ++i)
    for (std::size_t j = i + 1; j < dense; ++j)
      diam = std::max(diam, family.distance(i, j).lo);
  for (std::size_t stride = 1; stride < n; stride *= 2)
    for (std::size_t i = 0; i + stride < n; i += std::max<std::size_t>(1, stride / 2))
      diam = std::max(diam, family.distance(i, i + stride).lo);
  return diam;
}

struct PackingProbe {
  bool feasible = false;
  std::vector<std::size_t> sizes;  // per top-half horizon
};

PackingProbe probe_packing(const PointFamily& family, double delta,
                           const std::vector<std::uint64_t>& horizons,
                           std::size_t top_begin, const AnalysisConfig& cfg) {
  PackingProbe probe;
  for (std::size_t hi = top_begin; hi < horizons.size(); ++hi) {
    const PackingResult r = greedy_packing(
        family, delta, static_cast<std::size_t>(horizons[hi]), cfg.packing_cap);
    probe.sizes.push_back(r.witnesses.size());
  }
  if (probe.sizes.empty() || probe.sizes.back() < cfg.k_min) return probe;
  bool all_capped = true;
  bool strictly_growing = true;
  for (std::size_t i = 0; i < probe.sizes.size(); ++i) {
    if (probe.sizes[i] < cfg.packing_cap) all_capped = false;
    if (i > 0 && probe.sizes[i] <= probe.sizes[i - 1]) strictly_growing = false;
  }
  probe.feasible = all_capped || strictly_growing;
  return probe;
}

}  // namespace

CompactnessVerdict verdict(const PointFamily& family, const AnalysisConfig& cfg) {
  CompactnessVerdict out;
  const std::size_t max_horizon =
      cfg.horizons.empty() ? family.size() : static_cast<std::size_t>(cfg.horizons.back());

  if (family.tail_certificate() && family.has_seqvec_members()) {
    const TailCertificateOutcome cert = tail_uniform_certificate(family, max_horizon);
    if (cert.certified) {
      out.verdict = CompactnessClass::CompactCertified;
      out.certificate = cert.provenance;
      return out;
    }
    out.certificate = "tail certificate rejected: " + cert.provenance + "; ";
  }
  if (family.finite_dimensional()) {
    const double bound = family.finite_dim_bound(max_horizon);
    if (std::isfinite(bound)) {
      out.verdict = CompactnessClass::CompactCertified;
      std::ostringstream os;
      os << out.certificate << "norm-bounded (<= " << bound
         << ") subset of a finite-dimensional space is totally bounded";
      out.certificate = os.str();
      return out;
    }
  }

  out.entropy = entropy_table(family, cfg.eps_grid, cfg.horizons, cfg.net_cap);
  out.diameter_lo = sampled_diameter_lo(family, max_horizon);

  // Largest delta at which a growing packing reaches K_min, by coarse
  // descending probe plus bisection; claims below delta_floor are suppressed
  // (tiny-delta packings of compact families are expected to be large).
  const std::size_t top_begin = cfg.horizons.size() - (cfg.horizons.size() + 1) / 2;
  double lo_feasible = 0.0;
  double hi_infeasible = out.diameter_lo * (1.0 + 1e-9) + 1e-12;
  if (out.diameter_lo > 0.0) {
    for (int step = 20; step >= 1; --step) {
      const double delta = hi_infeasible * static_cast<double>(step) / 20.0;
      if (delta <= 0.0) continue;
      if (probe_packing(family, delta, cfg.horizons, top_begin, cfg).feasible) {
        lo_feasible = delta;
        break;
      }
      hi_infeasible = delta;
    }
    if (lo_feasible > 0.0) {
      double lo = lo_feasible, hi = hi_infeasible;
      for (int it = 0; it < cfg.bisect_iters && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (probe_packing(family, mid, cfg.horizons, top_begin, cfg).feasible)
          lo = mid;
        else
          hi = mid;
      }
      lo_feasible = lo;
    }
  }

  if (lo_feasible >= cfg.delta_floor) {
    const PackingProbe probe = probe_packing(family, lo_feasible, cfg.horizons, top_begin, cfg);
    if (probe.feasible) {
      const PackingResult final_packing = greedy_packing(
          family, lo_feasible, max_horizon, std::max(cfg.witness_target, cfg.k_min));
      out.verdict = CompactnessClass::NotCompactEvidence;
      out.delta = lo_feasible;
      out.min_pairwise_lo = final_packing.min_pairwise_lo;
      out.packing_sizes = probe.sizes;
      for (const std::size_t pos : final_packing.witnesses)
        out.witness_indices.push_back(family.index_at(pos));
      std::ostringstream os;
      os << out.certificate << final_packing.witnesses.size()
         << " witnesses pairwise >= " << lo_feasible
         << " (lo metric), packing size growing with horizon";
      out.certificate = os.str();
      return out;
    }
  }

  const bool all_stable =
      std::all_of(out.entropy.flags.begin(), out.entropy.flags.end(),
                  [](EpsFlag f) { return f == EpsFlag::Stable; });
  if (all_stable) {
    out.verdict = CompactnessClass::CompactEvidence;
    out.certificate += "entropy table stable at every eps over the top horizons";
    return out;
  }
  out.verdict = CompactnessClass::Unknown;
  out.certificate += "no certificate, no stable entropy, no growing packing above the floor";
  return out;
}

}  // namespace orbitlab
