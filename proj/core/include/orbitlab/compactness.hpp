#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbitlab/operators.hpp"
#include "orbitlab/seqspace.hpp"

namespace orbitlab {

// Relative-compactness analysis of indexed families (orbits, difference
// orbits) by greedy epsilon-nets, greedy delta-packings, epsilon-entropy
// tables across horizons, and exact tail-envelope certificates.
//
// Verdicts are graded: CERTIFIED needs an analytic mechanism (tail envelope
// in c0, or boundedness in finite dimension); entropy/packing runs over a
// finite horizon only ever yield EVIDENCE or UNKNOWN.

struct MetricInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Closed-form decreasing envelope tau with tau(n) -> 0 plus the analytic
/// provenance of the claim |member coordinate n| <= tau(n).
struct TailCertificateData {
  std::function<double(unsigned)> envelope;
  bool monotone_proof = false;  // caller asserts tau decreasing with limit 0
  std::string provenance;
};

struct FamilyCache;  // member/distance memoization (defined in compactness.cpp)

class PointFamily {
 public:
  using MetricFn = std::function<MetricInterval(std::uint64_t, std::uint64_t)>;

  /// Family with an exact closed-form metric (interval width zero).
  static PointFamily closed_form(std::vector<std::uint64_t> index_set,
                                 std::function<double(std::uint64_t, std::uint64_t)> metric,
                                 std::string description);

  /// Family of SeqVec members; the metric is the certified dist interval.
  /// Members are built once per index and cached.
  static PointFamily seqvec(std::vector<std::uint64_t> index_set,
                            std::function<SeqVec(std::uint64_t)> member,
                            std::string description);

  /// Bounded family in a finite-dimensional space (matrix orbits); carries
  /// the bounded+finite-dim certificate. Euclidean metric.
  static PointFamily finite_dim(std::vector<std::uint64_t> index_set,
                                std::function<Eigen::VectorXcd(std::uint64_t)> member,
                                std::string description);

  std::size_t size() const { return index_set_.size(); }
  std::uint64_t index_at(std::size_t pos) const { return index_set_[pos]; }
  const std::string& description() const { return description_; }

  MetricInterval distance(std::size_t pos_a, std::size_t pos_b) const;

  bool has_seqvec_members() const { return static_cast<bool>(seq_builder_); }
  const SeqVec& seq_member(std::size_t pos) const;

  bool finite_dimensional() const { return static_cast<bool>(vec_builder_); }
  const Eigen::VectorXcd& vec_member(std::size_t pos) const;
  /// Largest member norm over the horizon (finite-dim certificate input).
  double finite_dim_bound(std::size_t horizon) const;

  void set_tail_certificate(TailCertificateData cert) { tail_cert_ = std::move(cert); }
  const std::optional<TailCertificateData>& tail_certificate() const { return tail_cert_; }

  /// Attaches SeqVec member data (e.g. per-coordinate envelopes) to a family
  /// built on a closed-form metric, so tail certificates can be checked.
  void attach_seq_members(std::function<SeqVec(std::uint64_t)> member);

 private:
  std::vector<std::uint64_t> index_set_;
  std::function<double(std::uint64_t, std::uint64_t)> closed_metric_;
  std::function<SeqVec(std::uint64_t)> seq_builder_;
  std::function<Eigen::VectorXcd(std::uint64_t)> vec_builder_;
  std::shared_ptr<FamilyCache> cache_;
  std::optional<TailCertificateData> tail_cert_;
  std::string description_;
};

// --- greedy nets and packings ---------------------------------------------------

struct NetResult {
  std::vector<std::size_t> centers;  // positions in the family
  double covering_radius_hi = 0.0;   // max over scanned points of min hi-dist
  bool covered = false;              // covering_radius_hi <= eps (+ slack)
  bool capped = false;               // scan stopped at the center cap
};

/// First-fit greedy net over the first `horizon` members: a point becomes a
/// center iff its lo-distance to every existing center exceeds eps, so the
/// centers are also an eps-packing.  The covering pass (hi metric) verifies
/// every scanned point lies within eps of a center and otherwise reports the
/// widened radius.
NetResult greedy_net(const PointFamily& family, double eps, std::size_t horizon,
                     std::size_t center_cap = 0);

struct PackingResult {
  std::vector<std::size_t> witnesses;   // positions, pairwise lo-dist >= delta
  double min_pairwise_lo = 0.0;         // re-verified exhaustively on return
  bool capped = false;
};

/// Greedy delta-separated set (lo metric, pairwise >= delta), stopping at
/// k_target (0 = unbounded) or the horizon.
PackingResult greedy_packing(const PointFamily& family, double delta,
                             std::size_t horizon, std::size_t k_target);

struct EntropyCell {
  double eps = 0.0;
  std::uint64_t horizon = 0;
  std::size_t net_size = 0;
  bool capped = false;
  bool covered = false;
};

enum class EpsFlag { Stable, Growing };

struct EntropyTable {
  std::vector<EntropyCell> cells;  // row-major: eps outer, horizon inner
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> horizons;
  std::vector<EpsFlag> flags;  // per eps row
};

/// Net sizes per (eps, horizon); a row is STABLE when the net size is
/// constant over the top half of the horizons (and never hit the cap).
EntropyTable entropy_table(const PointFamily& family, const std::vector<double>& eps_grid,
                           const std::vector<std::uint64_t>& horizons,
                           std::size_t net_cap = 512);

// --- certificates and verdicts -----------------------------------------------------

enum class CompactnessClass {
  CompactCertified,
  CompactEvidence,
  NotCompactEvidence,
  Unknown,
};

const char* compactness_class_name(CompactnessClass v);

struct TailCertificateOutcome {
  bool certified = false;
  std::string provenance;
  // On rejection: the violating member position / coordinate.
  std::size_t violating_member = 0;
  unsigned violating_coordinate = 0;
};

/// Verifies |coordinate n| <= tau(n) on every member head, member tail bounds
/// <= tau(d), and head boundedness.  Success certifies total boundedness in
/// c0 ("bounded + uniformly small tails").
TailCertificateOutcome tail_uniform_certificate(const PointFamily& family,
                                                std::size_t horizon);

struct AnalysisConfig {
  std::vector<double> eps_grid{2.0, 1.0, 0.5, 0.25, 0.125};
  std::vector<std::uint64_t> horizons{256, 512, 1024, 2048, 4096};
  std::size_t k_min = 32;
  std::size_t witness_target = 64;  // packing witnesses to emit on NOT_COMPACT
  double delta_floor = 0.25;
  int bisect_iters = 48;
  std::size_t packing_cap = 256;  // growth-scan cap
  std::size_t net_cap = 512;
};

struct CompactnessVerdict {
  CompactnessClass verdict = CompactnessClass::Unknown;
  EntropyTable entropy;
  // Packing evidence (present for NOT_COMPACT_EVIDENCE).
  double delta = 0.0;
  std::vector<std::uint64_t> witness_indices;
  double min_pairwise_lo = 0.0;
  std::vector<std::size_t> packing_sizes;  // per top-half horizon at delta
  double diameter_lo = 0.0;                // max observed lo distance
  std::string certificate;
};

/// Graded pipeline: analytic certificates first (tail envelope; bounded in
/// finite dimension), then packing growth for NOT_COMPACT evidence, then
/// entropy stability for COMPACT evidence; UNKNOWN otherwise.
CompactnessVerdict verdict(const PointFamily& family, const AnalysisConfig& cfg);

}  // namespace orbitlab
