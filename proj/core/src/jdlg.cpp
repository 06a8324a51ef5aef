#include "orbitlab/jdlg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace orbitlab {

namespace {

double operator_norm(const Eigen::MatrixXcd& m) { return m.operatorNorm(); }

double cond2(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

// Unitary similarity swapping the two diagonal entries of an upper-triangular
// 2x2 block; applied in place at position i of (U, Q).
void swap_adjacent(Eigen::MatrixXcd& U, Eigen::MatrixXcd& Q, Eigen::Index i) {
  const Complex a = U(i, i);
  const Complex b = U(i, i + 1);
  const Complex c = U(i + 1, i + 1);
  const double nrm = std::sqrt(std::norm(b) + std::norm(c - a));
  if (nrm == 0.0) return;  // equal eigenvalues, nothing to move
  const Complex v0 = b / nrm;
  const Complex v1 = (c - a) / nrm;
  Eigen::Matrix2cd G;
  G << v0, -std::conj(v1), v1, std::conj(v0);
  U.block(i, 0, 2, U.cols()).applyOnTheLeft(G.adjoint());
  U.block(0, i, U.rows(), 2).applyOnTheRight(G);
  Q.block(0, i, Q.rows(), 2).applyOnTheRight(G);
  U(i + 1, i) = Complex(0.0, 0.0);
}

struct ClassifiedSpectrum {
  std::vector<bool> peripheral;  // per Schur position
  double stable_radius = 0.0;
};

ClassifiedSpectrum classify(const Eigen::VectorXcd& eigs, double tol) {
  ClassifiedSpectrum out;
  out.peripheral.resize(static_cast<std::size_t>(eigs.size()));
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double mag = std::abs(eigs(i));
    if (mag > 1.0 + tol) {
      std::ostringstream os;
      os << "eigenvalue of modulus " << mag << " outside the unit disk at tol " << tol;
      raise(ErrorCode::NotPowerBounded, os.str());
    }
    const bool periph = std::abs(mag - 1.0) <= tol;
    out.peripheral[static_cast<std::size_t>(i)] = periph;
    if (!periph) out.stable_radius = std::max(out.stable_radius, mag);
  }
  return out;
}

// A Y - Y B = C with A, B upper triangular.  Throws when diagonal spectra
// approach each other (separation below sep_min).
Eigen::MatrixXcd solve_triangular_sylvester(const Eigen::MatrixXcd& A,
                                            const Eigen::MatrixXcd& B,
                                            const Eigen::MatrixXcd& C,
                                            double sep_min) {
  const Eigen::Index p = A.rows();
  const Eigen::Index s = B.rows();
  Eigen::MatrixXcd Y(p, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    Eigen::VectorXcd rhs = C.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs += B(k, j) * Y.col(k);
    for (Eigen::Index i = p - 1; i >= 0; --i) {
      Complex acc = rhs(i);
      for (Eigen::Index l = i + 1; l < p; ++l) acc -= A(i, l) * Y(l, j);
      const Complex denom = A(i, i) - B(j, j);
      if (std::abs(denom) < sep_min)
        raise(ErrorCode::SylvesterIllConditioned,
              "peripheral/stable spectra separation below 1e-8");
      Y(i, j) = acc / denom;
    }
  }
  return Y;
}

/// sup_n ||R^n|| for an upper-triangular R with spectral radius < 1:
/// max over the prefix until the norm first drops below 1/2.
double stable_power_sup(const Eigen::MatrixXcd& R) {
  if (R.rows() == 0) return 0.0;
  double sup = 1.0;  // n = 0
  Eigen::MatrixXcd B = R;
  for (int n = 1; n < 100000; ++n) {
    const double nrm = operator_norm(B);
    sup = std::max(sup, nrm);
    if (nrm <= 0.5) return sup;
    B = B * R;
  }
  raise(ErrorCode::Internal, "stable block powers did not contract");
}

std::vector<double> probe_power_norms(const Eigen::MatrixXcd& T, int n_max) {
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(n_max));
  Eigen::MatrixXcd B = T;
  for (int n = 1; n <= n_max; ++n) {
    norms.push_back(operator_norm(B));
    if (n < n_max) B = B * T;
  }
  return norms;
}

}  // namespace

SpectralSplit check_power_bounded(const MatrixOperator& T, double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-6))
    raise(ErrorCode::ConfigError, "spectral tolerance must lie in [1e-12, 1e-6]");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(T.entries, false);
  if (schur.info() != Eigen::Success)
    raise(ErrorCode::Internal, "complex Schur decomposition failed");
  const Eigen::VectorXcd eigs = schur.matrixT().diagonal();
  const ClassifiedSpectrum cls = classify(eigs, tol);

  SpectralSplit split;
  split.stable_spectral_radius = cls.stable_radius;
  split.tol_unimodular = tol;

  // Cluster peripheral eigenvalues, then decide semisimplicity per cluster by
  // a rank test whose verdict must be stable across three decades of the
  // threshold on either side; otherwise the decision is declared ambiguous.
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());
  const double cluster_tol = 1e-5 * scale;
  std::vector<Complex> reps;
  std::vector<int> counts;
  std::vector<double> spreads;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (!cls.peripheral[static_cast<std::size_t>(i)]) continue;
    const Complex lam = eigs(i);
    bool joined = false;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (std::abs(lam - reps[c]) <= cluster_tol) {
        counts[c] += 1;
        spreads[c] = std::max(spreads[c], std::abs(lam - reps[c]));
        joined = true;
        break;
      }
    }
    if (!joined) {
      reps.push_back(lam);
      counts.push_back(1);
      spreads.push_back(0.0);
    }
  }

  const Eigen::Index d = T.dim();
  for (std::size_t c = 0; c < reps.size(); ++c) {
    Eigen::MatrixXcd shifted = T.entries - reps[c] * Eigen::MatrixXcd::Identity(d, d);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    const auto& sv = svd.singularValues();
    const double theta =
        std::max({tol * scale, 10.0 * spreads[c],
                  static_cast<double>(d) * 100.0 *
                      std::numeric_limits<double>::epsilon() * scale});
    auto count_below = [&](double thr) {
      int k = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= thr) ++k;
      return k;
    };
    const int geo = count_below(theta);
    const int geo_tight = count_below(theta / 1e3);
    const int geo_loose = count_below(theta * 1e3);
    const bool semisimple_tight = geo_tight >= counts[c];
    const bool semisimple_loose = geo_loose >= counts[c];
    if (semisimple_tight != semisimple_loose)
      raise(ErrorCode::TolAmbiguous,
            "semisimplicity rank decision ill-conditioned for a peripheral eigenvalue");
    if (!semisimple_loose) {
      std::ostringstream os;
      os << "defective peripheral eigenvalue near (" << reps[c].real() << ", "
         << reps[c].imag() << ")";
      raise(ErrorCode::NotPowerBounded, os.str());
    }
    split.peripheral.push_back(PeripheralEigenvalue{reps[c], counts[c], geo});
  }
  return split;
}

MatrixJdlgSplit jdlg_project(const MatrixOperator& T, double tol) {
  MatrixJdlgSplit out;
  out.spectrum = check_power_bounded(T, tol);

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(T.entries, true);
  if (schur.info() != Eigen::Success)
    raise(ErrorCode::Internal, "complex Schur decomposition failed");
  Eigen::MatrixXcd U = schur.matrixT();
  Eigen::MatrixXcd Q = schur.matrixU();
  const Eigen::Index d = T.dim();

  auto is_peripheral_at = [&](Eigen::Index i) {
    return std::abs(std::abs(U(i, i)) - 1.0) <= tol;
  };

  // Bubble peripheral eigenvalues to the leading block.
  Eigen::Index p = 0;
  for (Eigen::Index target = 0; target < d; ++target) {
    Eigen::Index src = -1;
    for (Eigen::Index i = target; i < d; ++i) {
      if (is_peripheral_at(i)) {
        src = i;
        break;
      }
    }
    if (src < 0) break;
    for (Eigen::Index i = src; i > target; --i) swap_adjacent(U, Q, i - 1);
    ++p;
  }
  const Eigen::Index s = d - p;

  if (s == 0) {
    out.P = Eigen::MatrixXcd::Identity(d, d);
    out.rv_basis = Q;
    out.st_basis = Eigen::MatrixXcd(d, 0);
  } else {
    double sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < s; ++j)
        sep = std::min(sep, std::abs(U(i, i) - U(p + j, p + j)));
    if (sep < 1e-8)
      raise(ErrorCode::SylvesterIllConditioned,
            "peripheral/stable spectra separation below 1e-8");
    const Eigen::MatrixXcd Rp = U.topLeftCorner(p, p);
    const Eigen::MatrixXcd Rs = U.bottomRightCorner(s, s);
    const Eigen::MatrixXcd C = U.topRightCorner(p, s);
    const Eigen::MatrixXcd Y = solve_triangular_sylvester(Rp, Rs, -C, 1e-8);

    Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(d, d);
    inner.topLeftCorner(p, p) = Eigen::MatrixXcd::Identity(p, p);
    inner.topRightCorner(p, s) = -Y;
    out.P = Q * inner * Q.adjoint();
    out.rv_basis = Q.leftCols(p);
    Eigen::MatrixXcd st_raw(d, s);
    st_raw.topRows(p) = Y;
    st_raw.bottomRows(s) = Eigen::MatrixXcd::Identity(s, s);
    st_raw = Q * st_raw;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(st_raw);
    out.st_basis = qr.householderQ() * Eigen::MatrixXcd::Identity(d, s);
  }

  out.doubly_power_bounded = (s == 0);
  out.idempotency_residual = (out.P * out.P - out.P).norm();
  out.commutation_residual = (out.P * T.entries - T.entries * out.P).norm();

  // Spectral certificate for M := max(sup_n ||T^n|rv||, sup_n ||T^n||, ||P||),
  // reading peripheral eigenvalues as exactly unimodular (tolerance
  // semantics of the classification above).
  const Eigen::MatrixXcd Rp = U.topLeftCorner(p, p);
  const Eigen::MatrixXcd Rs = U.bottomRightCorner(s, s);
  double periph_sup = p > 0 ? 1.0 : 0.0;
  if (p > 0) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Rp, true);
    if (es.info() != Eigen::Success)
      raise(ErrorCode::Internal, "peripheral eigenvector computation failed");
    periph_sup = cond2(es.eigenvectors());
  }
  const double stable_sup = stable_power_sup(Rs);
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(d, d);
  if (s > 0) W.topRightCorner(p, s) = solve_triangular_sylvester(Rp, Rs, -U.topRightCorner(p, s), 1e-8);
  const double cond_w = cond2(W);
  double M = std::max({1.0, cond_w * std::max(periph_sup, stable_sup), periph_sup,
                       operator_norm(out.P)});

  const auto probes = probe_power_norms(T.entries, 128);
  const double observed = probes.empty() ? 1.0 : *std::max_element(probes.begin(), probes.end());
  M = std::max(M, observed);

  out.power_bound = PowerBound{M, PowerBoundProvenance::SpectralCertificate,
                               std::max(1.0, observed)};
  return out;
}

PowerBound matrix_power_bound(const MatrixOperator& T) {
  const int probe_horizon = T.dim() <= 16 ? 512 : 128;
  try {
    MatrixJdlgSplit split = jdlg_project(T);
    const auto probes = probe_power_norms(T.entries, probe_horizon);
    const double observed =
        std::max(1.0, *std::max_element(probes.begin(), probes.end()));
    return PowerBound{std::max(split.power_bound.M, observed),
                      PowerBoundProvenance::SpectralCertificate, observed};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPowerBounded) throw;
    const auto probes = probe_power_norms(T.entries, probe_horizon);
    const double observed =
        std::max(1.0, *std::max_element(probes.begin(), probes.end()));
    return PowerBound{observed, PowerBoundProvenance::ProbeOnly, observed};
  }
}

// --- diagonal form -----------------------------------------------------------

const char* ergodicity_verdict_name(ErgodicityVerdict v) {
  switch (v) {
    case ErgodicityVerdict::MeanErgodic: return "MEAN_ERGODIC";
    case ErgodicityVerdict::NotMeanErgodic: return "NOT_MEAN_ERGODIC";
    case ErgodicityVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

const char* convergence_verdict_name(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::Converged: return "CONVERGED";
    case ConvergenceVerdict::NotConverged: return "NOT_CONVERGED";
    case ConvergenceVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

bool in_projection_domain(const SeqVec& v) {
  if (v.tail.kind == TailKind::NullEnvelope) return true;
  return v.tail.limit == Complex(0.0, 0.0);
}

SeqVec project(const DiagonalJdlgSplit&, const SeqVec& v) {
  if (!in_projection_domain(v))
    raise(ErrorCode::ProjectionUnavailable,
          "P is defined on E_aap = c0 only; vector has a nonzero limit part");
  return v;
}

DiagonalJdlgSplit diagonal_jdlg(const DiagonalOperator& T, std::size_t probe_dim) {
  if (!T.unimodular())
    raise(ErrorCode::UnsupportedDiagonal,
          "JdLG mask form requires unimodular diagonal entries");
  if (T.rule() == DiagonalOperator::Rule::Explicit) {
    const Complex b = T.limit();
    for (std::size_t n = 0; n < T.max_head_dim(); ++n)
      if (std::abs(T.entry(n) - b) == 0.0)
        raise(ErrorCode::UnsupportedDiagonal,
              "diagonal gallery form requires a_n != b for all n");
  }
  DiagonalJdlgSplit split;
  split.power_bound = PowerBound{1.0, PowerBoundProvenance::ExactUnimodular, 1.0};
  split.doubly_power_bounded = true;

  probe_dim = std::min(probe_dim, T.max_head_dim());
  const SeqVec ones = SeqVec::ones(probe_dim);
  split.probe = mean_ergodicity_probe(T, ones, {16, 64, 256, 1024});
  split.not_all_vectors_aap = split.probe.verdict == ErgodicityVerdict::NotMeanErgodic;
  return split;
}

// --- stable part convergence ---------------------------------------------------

namespace {

ConvergenceReport judge_convergence(std::vector<double> residuals, double tol) {
  ConvergenceReport rep;
  rep.residuals = std::move(residuals);
  const std::size_t n = rep.residuals.size();
  rep.final_residual = n > 0 ? rep.residuals.back() : 0.0;

  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n / 2)
      m1 = std::max(m1, rep.residuals[i]);
    else
      m2 = std::max(m2, rep.residuals[i]);
  }
  const bool envelope_decays = m2 <= m1 * (1.0 + 1e-12) + 1e-300;

  // Least-squares decay rate over the second half (where positive).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (rep.residuals[i] <= 1e-280) continue;
    const double xi = static_cast<double>(i + 1);
    const double yi = std::log(rep.residuals[i]);
    sx += xi; sy += yi; sxx += xi * xi; sxy += xi * yi;
    ++cnt;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 0)
    rep.fitted_rate = std::exp((sxy * cnt - sx * sy) / (sxx * cnt - sx * sx));

  if (rep.final_residual <= tol && envelope_decays)
    rep.verdict = ConvergenceVerdict::Converged;
  else if (m2 > tol && m2 >= 0.5 * m1)
    rep.verdict = ConvergenceVerdict::NotConverged;
  else
    rep.verdict = ConvergenceVerdict::Inconclusive;
  return rep;
}

}  // namespace

ConvergenceReport stable_part_convergence(const MatrixOperator& T,
                                          const MatrixJdlgSplit& split,
                                          const Eigen::VectorXcd& x, int n_max,
                                          double tol) {
  if (n_max < 16) raise(ErrorCode::ConfigError, "stable_part_convergence: n_max >= 16");
  if (x.size() != T.dim())
    raise(ErrorCode::DimensionMismatch, "vector/operator dimension mismatch");
  const Eigen::MatrixXcd IP =
      Eigen::MatrixXcd::Identity(T.dim(), T.dim()) - split.P;
  std::vector<double> residuals;
  residuals.reserve(static_cast<std::size_t>(n_max));
  Eigen::VectorXcd w = x;
  for (int n = 1; n <= n_max; ++n) {
    w = T.entries * w;
    residuals.push_back((IP * w).norm());  // == ||s_n + (I-P)x||
  }
  return judge_convergence(std::move(residuals), tol);
}

ConvergenceReport stable_part_convergence(const DiagonalOperator&,
                                          const DiagonalJdlgSplit&, const SeqVec&,
                                          int n_max, double tol) {
  if (n_max < 16) raise(ErrorCode::ConfigError, "stable_part_convergence: n_max >= 16");
  // E_st = {0}: s_n = (I-P)(T^n x - x) vanishes identically.
  return judge_convergence(std::vector<double>(static_cast<std::size_t>(n_max), 0.0),
                           tol);
}

// --- Cesaro means ----------------------------------------------------------------

SeqVec cesaro_mean(const DiagonalOperator& op, const SeqVec& x, std::uint64_t N) {
  x.validate("cesaro_mean");
  if (N < 1 || N > kMaxCesaroN)
    raise(ErrorCode::ConfigError, "cesaro_mean: N must be in [1, 2^20]");
  if (!op.unimodular())
    raise(ErrorCode::UnsupportedDiagonal, "cesaro_mean requires unimodular entries");
  const double Nd = static_cast<double>(N);
  SeqVec out;
  out.head.resize(x.dim());
  for (std::size_t n = 0; n < x.dim(); ++n) {
    if (op.entry_power_is_one(n, 1)) {
      out.head[n] = x.head[n];
    } else {
      const Complex aN = op.entry_power(n, static_cast<std::int64_t>(N));
      const Complex a = op.entry(n);
      out.head[n] = x.head[n] * (aN - Complex(1.0, 0.0)) / (Nd * (a - Complex(1.0, 0.0)));
    }
  }
  const double beta = x.tail.bound;
  const double s1 = op.tail_drift_sup(static_cast<unsigned>(x.dim()), 1);
  if (x.tail.kind == TailKind::NullEnvelope) {
    out.tail = TailDescriptor::null_envelope(beta);  // |A_N| <= 1 coordinatewise
    return out;
  }
  const Complex L = x.tail.limit;
  const Complex b = op.limit();
  Complex cb;
  if (std::abs(b - Complex(1.0, 0.0)) == 0.0) {
    cb = Complex(1.0, 0.0);
  } else {
    cb = (op.limit_power(static_cast<std::int64_t>(N)) - Complex(1.0, 0.0)) /
         (Nd * (b - Complex(1.0, 0.0)));
  }
  // |c_n - c_b| <= (N-1)/2 * |a_n - b| on the tail.
  const double bound = beta + std::abs(L) * 0.5 * (Nd - 1.0) * s1;
  out.tail = TailDescriptor::convergent(cb * L, bound);
  return out;
}

SeqVec cesaro_mean_direct(const DiagonalOperator& op, const SeqVec& x, std::uint64_t N) {
  x.validate("cesaro_mean_direct");
  if (N < 1 || N > (1u << 14))
    raise(ErrorCode::ConfigError, "cesaro_mean_direct: oracle limited to N <= 2^14");
  SeqVec out = x;
  const double Nd = static_cast<double>(N);
  for (std::size_t n = 0; n < x.dim(); ++n) {
    Complex acc(0.0, 0.0);
    for (std::uint64_t k = 0; k < N; ++k)
      acc += op.entry_power(n, static_cast<std::int64_t>(k));
    out.head[n] = x.head[n] * acc / Nd;
  }
  // Tail descriptor mirrors the closed form (oracle compares heads only).
  out.tail = cesaro_mean(op, x, N).tail;
  return out;
}

Eigen::VectorXcd cesaro_mean(const MatrixOperator& op, const Eigen::VectorXcd& x,
                             std::uint64_t N) {
  if (x.size() != op.dim())
    raise(ErrorCode::DimensionMismatch, "vector/operator dimension mismatch");
  if (N < 1 || N > kMaxCesaroN)
    raise(ErrorCode::ConfigError, "cesaro_mean: N must be in [1, 2^20]");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(x.size());
  Eigen::VectorXcd w = x;
  for (std::uint64_t n = 0; n < N; ++n) {
    acc += w;
    if (n + 1 < N) w = op.entries * w;
  }
  return acc / static_cast<double>(N);
}

// --- mean ergodicity probe ---------------------------------------------------------

ErgodicityReport mean_ergodicity_probe(const DiagonalOperator& op, const SeqVec& x,
                                       const std::vector<std::uint64_t>& n_list) {
  if (n_list.size() < 4 || !std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    raise(ErrorCode::ConfigError, "probe: N_list must be strictly increasing, length >= 4");
  x.validate("mean_ergodicity_probe");

  // The paper's reduction: b^{-1} T has the same a.a.p. vectors, so a
  // nontrivial limit prefactor is rotated away before probing.
  DiagonalOperator eff = op;
  bool rotated = false;
  if (op.rule() == DiagonalOperator::Rule::DyadicPhase && !op.prefactor().is_one()) {
    eff = DiagonalOperator::dyadic(op.dyadic_num());
    rotated = true;
  }

  ErgodicityReport rep;
  rep.n_values = n_list;
  std::vector<SeqVec> means;
  means.reserve(n_list.size());
  for (std::uint64_t N : n_list) means.push_back(cesaro_mean(eff, x, N));

  for (const SeqVec& m : means) {
    rep.mean_norm_lower.push_back(norm_lower_with_limit(m));
    double hm = 0.0;
    for (const Complex& z : m.head) hm = std::max(hm, std::abs(z));
    rep.head_coord_max.push_back(hm);
  }
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j)
      rep.max_pairwise_hi = std::max(rep.max_pairwise_hi,
                                     dist_interval(means[i], means[j]).hi);

  rep.ker_dim_head = 0;
  for (std::size_t n = 0; n < x.dim(); ++n)
    if (eff.entry_power_is_one(n, 1)) ++rep.ker_dim_head;

  rep.norm_floor = *std::min_element(rep.mean_norm_lower.begin(),
                                     rep.mean_norm_lower.end());

  double min_limit = std::numeric_limits<double>::infinity();
  for (const SeqVec& m : means) {
    const double lm = m.tail.kind == TailKind::ConvergentLimit
                          ? std::abs(m.tail.limit)
                          : 0.0;
    min_limit = std::min(min_limit, lm);
  }

  // Soundness of the geometric-sum bound |(A_N x)_j| <= 2|x_j| / (N |a_j - 1|).
  bool coord_bound_ok = true;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double Nd = static_cast<double>(n_list[i]);
    for (std::size_t jn = 0; jn < x.dim(); ++jn) {
      if (eff.entry_power_is_one(jn, 1)) continue;
      const double denom = std::abs(eff.entry(jn) - Complex(1.0, 0.0));
      if (std::abs(means[i].head[jn]) >
          2.0 * std::abs(x.head[jn]) / (Nd * denom) + 1e-12)
        coord_bound_ok = false;
    }
  }

  if (rep.max_pairwise_hi <= 1e-9) {
    rep.verdict = ErgodicityVerdict::MeanErgodic;
    rep.note = "Cesaro means coincide on all tested N";
  } else if (rep.ker_dim_head == 0 && min_limit >= 1e-6 && coord_bound_ok) {
    rep.verdict = ErgodicityVerdict::NotMeanErgodic;
    std::ostringstream os;
    os << "every A_N x keeps tail limit magnitude >= " << min_limit
       << " while each head coordinate is O(1/N); ker(T-I) trivial on the head, "
          "so the constant-limit functional in ker(T'-I) separates and no limit "
          "exists in c";
    if (rotated) os << " (probed on b^{-1} T)";
    rep.note = os.str();
  } else {
    rep.verdict = ErgodicityVerdict::Inconclusive;
    rep.note = "no decisive pattern at the probed horizons";
  }
  return rep;
}

ErgodicityReport mean_ergodicity_probe(const MatrixOperator& op,
                                       const Eigen::VectorXcd& x,
                                       const std::vector<std::uint64_t>& n_list) {
  if (n_list.size() < 4 || !std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    raise(ErrorCode::ConfigError, "probe: N_list must be strictly increasing, length >= 4");
  ErgodicityReport rep;
  rep.n_values = n_list;
  std::vector<Eigen::VectorXcd> means;
  for (std::uint64_t N : n_list) means.push_back(cesaro_mean(op, x, N));
  for (const auto& m : means) {
    rep.mean_norm_lower.push_back(m.norm());
    rep.head_coord_max.push_back(m.cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j)
      rep.max_pairwise_hi = std::max(rep.max_pairwise_hi, (means[i] - means[j]).norm());
  rep.norm_floor = *std::min_element(rep.mean_norm_lower.begin(),
                                     rep.mean_norm_lower.end());
  if (rep.max_pairwise_hi <= 1e-12 * std::max(1.0, x.norm())) {
    rep.verdict = ErgodicityVerdict::MeanErgodic;
    rep.note = "Cesaro means coincide on all tested N";
  } else {
    // Power-bounded matrices are mean ergodic; confirm the certificate and
    // report the numeric Cauchy evidence.
    try {
      check_power_bounded(op);
      rep.verdict = ErgodicityVerdict::MeanErgodic;
      rep.note = "finite-dimensional power-bounded operator (semisimple peripheral "
                 "spectrum) is mean ergodic";
    } catch (const Error&) {
      rep.verdict = ErgodicityVerdict::Inconclusive;
      rep.note = "power-boundedness certificate unavailable";
    }
  }
  return rep;
}

}  // namespace orbitlab
