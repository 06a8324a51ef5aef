#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "orbitlab/compactness.hpp"
#include "orbitlab/jdlg.hpp"
#include "orbitlab/operators.hpp"

namespace orbitlab {

// Executable form of the main theorem's proof: a separated subsequence from
// the non-compact orbit (Lemma Pbig), gap-Cauchy refinement over the a.a.p.
// difference vectors (Lemma multap), the inductive construction of exponents
// k_i with max_F ||T^{k_{m+1}} P(T^{SumF} x - x) - P(T^{SumF} x - x)|| <=
// 1/2^m, and verification of the Bessaga-Pelczynski conditions on
// x_i = P(T^{k_i} x - x).
//
// Existence steps become bounded searches; EXHAUSTED is an explicit outcome
// carrying the best tolerance reached.

struct WitnessConfig {
  std::uint64_t horizon = 0;  // max exponent searched; 0 = operator default
                              // (2^62 for exact dyadic phases, 2^12 otherwise)
  int m_target = 8;           // number of extracted exponents k_i (>= 4... <= 16)
  double delta_margin = 0.1;  // delta = (1 - margin) * delta0
  int exhaustive_up_to = 12;  // exhaustive subset-sum check up to this size
  int random_samples = 256;   // random larger subsets beyond the exhaustive range
  std::uint64_t seed = 0;
  AnalysisConfig analysis;    // precondition verdicts (orbit / D1 families)

  std::uint64_t horizon_for(const DiagonalOperator& op) const;
  std::uint64_t horizon_for(const MatrixOperator& op) const;
};

inline constexpr std::uint64_t kDyadicWitnessHorizon = std::uint64_t(1) << 62;

/// Candidate exponent stream from Lemma Pbig: either an explicit verified
/// list or a lazily verified range [0, range_end) (dyadic path, where every
/// consumed pair is re-verified at use).
struct IndexStream {
  std::vector<std::uint64_t> explicit_list;
  std::uint64_t range_end = 0;

  bool is_range() const { return range_end > 0; }
};

struct PbigResult {
  double delta = 0.0;   // verified P-distance separation of the subsequence
  double delta0 = 0.0;  // half the orbit packing separation (2*delta0 >= packing delta)
  IndexStream stream;
  std::size_t trimmed_prefix = 0;  // members dropped by the Cauchy trimming
  CompactnessVerdict orbit_verdict;
  CompactnessVerdict diff_verdict;
  ConvergenceReport stable_convergence;
};

/// Lemma Pbig for the diagonal gallery: requires (T-I)x a.a.p. (certified /
/// evidenced), stable-part convergence, and a non-compact orbit.  Throws
/// NO_SEPARATION when the orbit looks compact, PROJECTION_UNAVAILABLE when
/// the difference orbit leaves the domain of P.
PbigResult pbig_extract(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                        const SeqVec& x, const WitnessConfig& cfg);

/// Matrix counterpart; finite-dimensional orbits are compact, so this always
/// ends in NO_SEPARATION (kept as the honest negative control).
PbigResult pbig_extract(const MatrixOperator& op, const MatrixJdlgSplit& split,
                        const Eigen::VectorXcd& x, const WitnessConfig& cfg);

enum class SearchStatus { Completed, Exhausted };

struct MultapResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::vector<std::uint64_t> refined;  // n'_k, consecutive gaps >= gap_min
  double achieved_tol = 0.0;           // verified max_i move of the returned pair
  double best_tol = 0.0;               // best move seen (diagnostic on EXHAUSTED)
};

/// Lemma multap: subsequence with consecutive gaps >= gap_min along which all
/// vectors of aap_list move by at most tol.  Range streams use a dyadic
/// coarse-to-fine gap schedule (unimodular diagonals are isometries, so the
/// move depends on the gap only); explicit streams group orbit points of the
/// product vector into tol/2-net cells.
MultapResult multap_refine(const DiagonalOperator& op, const std::vector<SeqVec>& aap_list,
                           const IndexStream& n_seq, double tol, std::uint64_t gap_min,
                           std::uint64_t horizon);

struct WitnessState {
  double M = 1.0;
  double delta = 0.0;
  std::vector<std::uint64_t> k_seq;
  std::vector<double> sigma_residuals;    // stage m residual (index m-1)
  std::vector<double> norm_lower_bounds;  // ||P(T^{k_i} x - x)|| lo per i
  SearchStatus status = SearchStatus::Completed;
  int exhausted_stage = -1;
  double best_tol_achieved = 0.0;
};

/// The induction of the theorem's proof.  Stage m searches a gap k_{m+1} >
/// k_m moving all 2^m vectors T^{SumF} x - x by at most 1/(M 2^m); residuals
/// are re-verified directly after each stage.
WitnessState build_k_sequence(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                              const SeqVec& x, const WitnessConfig& cfg,
                              const PbigResult& pbig);

struct C0CopyCertificate {
  std::vector<std::uint64_t> k_seq;
  std::vector<SeqVec> x_vectors;  // x_i = P(T^{k_i} x - x)
  double M = 1.0;
  double delta = 0.0;
  double delta_over_M = 0.0;
  double norm_lower = 0.0;        // min_i ||x_i|| lo
  double M_prime = 0.0;           // sum_{i>=2} 2^{1-i} + M||x|| + M^2||x||
  double partial_sum_bound = 0.0; // max checked || sum_{i in S} x_i || hi
  std::size_t subsets_checked = 0;
  double c_low = 0.0;             // over sign patterns in {-1,0,1}^m
  double c_high = 0.0;
  std::vector<double> sigma_residuals;
};

/// Assembles x_i and verifies the Bessaga-Pelczynski conditions: norm floor
/// delta/M, unconditionally bounded partial sums (exhaustive up to
/// exhaustive_up_to, sampled beyond), and sign-pattern basis constants.
C0CopyCertificate bp_certificate(const DiagonalOperator& op, const DiagonalJdlgSplit& split,
                                 const SeqVec& x, const WitnessState& state,
                                 const WitnessConfig& cfg);

/// || (T^{n+m} x - T^n x) - sum_{j<m} (T^{n+j+1} x - T^{n+j} x) ||.
/// Diagonal operators cancel the integer exponent coefficients exactly and
/// return 0; matrices evaluate the combination in floating point.
double telescope_check(const DiagonalOperator& op, const SeqVec& x, std::uint64_t n,
                       std::uint64_t m);
double telescope_check(const MatrixOperator& op, const Eigen::VectorXcd& x,
                       std::uint64_t n, std::uint64_t m);

}  // namespace orbitlab
