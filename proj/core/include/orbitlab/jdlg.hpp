#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbitlab/operators.hpp"
#include "orbitlab/seqspace.hpp"

namespace orbitlab {

// Jacobs-de Leeuw-Glicksberg decomposition E_aap = E_rv (+) E_st with the
// projection P onto the reversible part, instantiated for matrices (global,
// since every bounded finite-dimensional orbit is relatively compact) and for
// the paper's unimodular diagonal operators on c (where P is exposed only on
// E_aap = c0).

inline constexpr double kDefaultSpectralTol = 1e-9;

struct PeripheralEigenvalue {
  Complex lambda;
  int algebraic_multiplicity = 1;
  int geometric_multiplicity = 1;
};

struct SpectralSplit {
  std::vector<PeripheralEigenvalue> peripheral;
  double stable_spectral_radius = 0.0;
  double tol_unimodular = kDefaultSpectralTol;
};

/// Classifies the spectrum and certifies power-boundedness: no eigenvalue
/// outside the closed unit disk (at tolerance) and every peripheral
/// eigenvalue semisimple.  Throws NOT_POWER_BOUNDED or TOL_AMBIGUOUS.
SpectralSplit check_power_bounded(const MatrixOperator& T, double tol = kDefaultSpectralTol);

struct MatrixJdlgSplit {
  Eigen::MatrixXcd P;         // projection onto E_rv along E_st, PT = TP
  Eigen::MatrixXcd rv_basis;  // orthonormal columns spanning range(P)
  Eigen::MatrixXcd st_basis;  // orthonormal columns spanning ker(P)
  SpectralSplit spectrum;
  PowerBound power_bound;
  bool doubly_power_bounded = false;
  double idempotency_residual = 0.0;  // ||P^2 - P||_F
  double commutation_residual = 0.0;  // ||PT - TP||_F
};

/// Schur form reordered peripheral-first, then Sylvester block decoupling.
MatrixJdlgSplit jdlg_project(const MatrixOperator& T, double tol = kDefaultSpectralTol);

/// Certified sup_n ||T^n|| <= M for matrices (spectral certificate when it
/// holds, probe-only fallback on TOL_AMBIGUOUS / ill-conditioned splits).
PowerBound matrix_power_bound(const MatrixOperator& T);

// --- diagonal form -----------------------------------------------------------

enum class ErgodicityVerdict { MeanErgodic, NotMeanErgodic, Inconclusive };

const char* ergodicity_verdict_name(ErgodicityVerdict v);

struct ErgodicityReport {
  ErgodicityVerdict verdict = ErgodicityVerdict::Inconclusive;
  std::vector<std::uint64_t> n_values;
  std::vector<double> mean_norm_lower;  // certified ||A_N x|| lower bounds
  std::vector<double> head_coord_max;   // max_j |(A_N x)_j|
  double max_pairwise_hi = 0.0;         // max over pairs ||A_N x - A_M x|| hi
  double norm_floor = 0.0;              // inf_N of the norm lower bounds
  int ker_dim_head = 0;                 // head entries with a_n == 1
  std::string note;
};

struct DiagonalJdlgSplit {
  // P acts as the identity on E_aap = c0 inside E = c; E_st = {0}.
  PowerBound power_bound{1.0, PowerBoundProvenance::ExactUnimodular, 1.0};
  bool doubly_power_bounded = true;
  bool not_all_vectors_aap = false;  // set from the ergodicity probe
  ErgodicityReport probe;
};

/// Analytic split for the paper's diagonal examples (|a_n| = 1, a_n != b).
/// The E != E_aap flag is populated from a Cesaro-mean probe, not assumed.
DiagonalJdlgSplit diagonal_jdlg(const DiagonalOperator& T, std::size_t probe_dim = 48);

/// True when v lies in the domain where P is defined (v in c0).
bool in_projection_domain(const SeqVec& v);

/// P v for v in E_aap = c0 (the identity there); throws
/// PROJECTION_UNAVAILABLE otherwise.
SeqVec project(const DiagonalJdlgSplit& split, const SeqVec& v);

// --- stable part convergence --------------------------------------------------

enum class ConvergenceVerdict { Converged, NotConverged, Inconclusive };

const char* convergence_verdict_name(ConvergenceVerdict v);

struct ConvergenceReport {
  ConvergenceVerdict verdict = ConvergenceVerdict::Inconclusive;
  std::vector<double> residuals;  // ||(I-P) T^n x|| = ||s_n + (I-P)x||, n = 1..n_max
  double final_residual = 0.0;
  double fitted_rate = 0.0;  // least-squares decay rate over the tail half
};

/// Convergence of s_n = (I-P)(T^n x - x) toward -(I-P)x.
ConvergenceReport stable_part_convergence(const MatrixOperator& T,
                                          const MatrixJdlgSplit& split,
                                          const Eigen::VectorXcd& x, int n_max,
                                          double tol);

/// Diagonal case: I - P = 0 on E_aap, so s_n vanishes identically.
ConvergenceReport stable_part_convergence(const DiagonalOperator& T,
                                          const DiagonalJdlgSplit& split,
                                          const SeqVec& x, int n_max, double tol);

// --- Cesaro means ---------------------------------------------------------------

inline constexpr std::uint64_t kMaxCesaroN = 1u << 20;

/// A_N x = (1/N) sum_{n<N} T^n x; dyadic coordinates use the exact geometric
/// closed form (a_n^N - 1) / (N (a_n - 1)).
SeqVec cesaro_mean(const DiagonalOperator& op, const SeqVec& x, std::uint64_t N);
Eigen::VectorXcd cesaro_mean(const MatrixOperator& op, const Eigen::VectorXcd& x,
                             std::uint64_t N);

/// Oracle companion to the closed form: direct power summation.
SeqVec cesaro_mean_direct(const DiagonalOperator& op, const SeqVec& x, std::uint64_t N);

ErgodicityReport mean_ergodicity_probe(const DiagonalOperator& op, const SeqVec& x,
                                       const std::vector<std::uint64_t>& n_list);
ErgodicityReport mean_ergodicity_probe(const MatrixOperator& op,
                                       const Eigen::VectorXcd& x,
                                       const std::vector<std::uint64_t>& n_list);

}  // namespace orbitlab
