#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/compactness.hpp"
#include "orbitlab/jdlg.hpp"
#include "orbitlab/operators.hpp"
#include "orbitlab/witness.hpp"

namespace orbitlab {

// End-to-end reproductions of the gallery examples with structured reports.
// Every report records whether the computed verdicts match the expected
// qualitative pattern (orbit non-compact / difference compact, D_m compact /
// D_1 non-compact) together with the certificates behind each claim.

struct GalleryConfig {
  std::size_t head_dim = 48;
  AnalysisConfig analysis;
  WitnessConfig witness;
  std::uint64_t seed = 0;
};

struct GalleryReport {
  std::string example_id;
  std::string operator_summary;
  std::uint64_t seed = 0;

  bool parity_ok = true;
  std::vector<std::string> parity_failures;
  std::vector<std::string> notes;

  std::optional<CompactnessVerdict> orbit_verdict;
  std::optional<CompactnessVerdict> d1_verdict;
  std::optional<CompactnessVerdict> dm_verdict;
  std::optional<EntropyTable> diff_entropy;  // evidence route alongside a certificate
  std::optional<ErgodicityReport> ergodicity;
  std::optional<ConvergenceReport> stable_convergence;
  std::optional<C0CopyCertificate> certificate;

  bool doubly_power_bounded = false;
  double power_bound_M = 1.0;

  // Example 1: closed-form metric vs grid oracle.
  double metric_oracle_max_gap = 0.0;
  std::size_t metric_oracle_pairs = 0;

  // Matrix suite.
  int trials = 0;
  int trials_passed = 0;
  std::vector<std::string> trial_failures;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      parity_ok = false;
      parity_failures.push_back(what);
    }
  }
};

/// Shift on BUC(R; c0): orbit not relatively compact (delta >= sqrt2 when
/// 4a >= pi), difference orbit compact via the uniform tail envelope; closed
/// forms cross-checked against the grid oracle.
GalleryReport run_example1(double a, const GalleryConfig& cfg);

/// The dyadic diagonal on c with x = 1: D1 certified compact, orbit packing
/// at sqrt2 scale, the non-mean-ergodicity probe, and the full witness
/// pipeline to a c0-copy certificate.
GalleryReport run_diagonal_c(const GalleryConfig& cfg);

/// b an m-th root of unity: D_m certified compact while D1 is not (tail
/// limits b^k (b - 1) != 0).
GalleryReport run_mth_root(int m, const GalleryConfig& cfg);

/// Randomized construct-then-recover suite over power-bounded matrices
/// S (U + N) S^{-1}, with injected defective (Jordan) rejections.
GalleryReport run_matrix_suite(std::uint64_t seed, int trials, const GalleryConfig& cfg);

}  // namespace orbitlab
