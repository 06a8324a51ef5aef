#include "orbitlab/report_json.hpp"

#include <sstream>

#include <json.hpp>

namespace orbitlab {

namespace {

using nlohmann::json;

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json power_bound_json(const PowerBound& pb) {
  return json{{"M", pb.M},
              {"probe_observed", pb.probe_observed},
              {"provenance", provenance_name(pb.provenance)}};
}

json entropy_json(const EntropyTable& table) {
  json cells = json::array();
  for (const EntropyCell& c : table.cells) {
    cells.push_back(json{{"eps", c.eps},
                         {"horizon", c.horizon},
                         {"net_size", c.net_size},
                         {"capped", c.capped},
                         {"covered", c.covered}});
  }
  json flags = json::array();
  for (std::size_t i = 0; i < table.flags.size(); ++i)
    flags.push_back(json{{"eps", table.eps_grid[i]},
                         {"flag", table.flags[i] == EpsFlag::Stable ? "STABLE" : "GROWING"}});
  return json{{"cells", cells}, {"flags", flags}};
}

json verdict_json(const CompactnessVerdict& v) {
  json out{{"verdict", compactness_class_name(v.verdict)},
           {"certificate", v.certificate},
           {"diameter_lo", v.diameter_lo}};
  if (v.verdict == CompactnessClass::NotCompactEvidence) {
    out["delta"] = v.delta;
    out["min_pairwise_lo"] = v.min_pairwise_lo;
    out["witness_indices"] = v.witness_indices;
    out["packing_sizes"] = v.packing_sizes;
  }
  if (!v.entropy.cells.empty()) out["entropy"] = entropy_json(v.entropy);
  return out;
}

json convergence_json(const ConvergenceReport& rep) {
  return json{{"verdict", convergence_verdict_name(rep.verdict)},
              {"final_residual", rep.final_residual},
              {"fitted_rate", rep.fitted_rate},
              {"residuals", rep.residuals}};
}

json ergodicity_json(const ErgodicityReport& rep) {
  return json{{"verdict", ergodicity_verdict_name(rep.verdict)},
              {"n_values", rep.n_values},
              {"mean_norm_lower", rep.mean_norm_lower},
              {"head_coord_max", rep.head_coord_max},
              {"max_pairwise_hi", rep.max_pairwise_hi},
              {"norm_floor", rep.norm_floor},
              {"ker_dim_head", rep.ker_dim_head},
              {"note", rep.note}};
}

json certificate_inner_json(const C0CopyCertificate& cert) {
  return json{{"delta", cert.delta},
              {"M", cert.M},
              {"k_seq", cert.k_seq},
              {"norm_lower", cert.norm_lower},
              {"M_prime", cert.M_prime},
              {"partial_sum_bound", cert.partial_sum_bound},
              {"sigma_residuals", cert.sigma_residuals},
              {"basis_constants", json{{"c_low", cert.c_low}, {"c_high", cert.c_high}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string matrix_decompose_report_json(const MatrixOperator& T,
                                         const MatrixJdlgSplit& split) {
  json peripheral = json::array();
  for (const PeripheralEigenvalue& pe : split.spectrum.peripheral)
    peripheral.push_back(json{{"lambda", complex_json(pe.lambda)},
                              {"algebraic_multiplicity", pe.algebraic_multiplicity},
                              {"geometric_multiplicity", pe.geometric_multiplicity}});
  const json out{{"kind", "matrix"},
                 {"dim", T.dim()},
                 {"P", matrix_json(split.P)},
                 {"rv_basis", matrix_json(split.rv_basis)},
                 {"st_basis", matrix_json(split.st_basis)},
                 {"power_bound", power_bound_json(split.power_bound)},
                 {"doubly_power_bounded", split.doubly_power_bounded},
                 {"idempotency_residual", split.idempotency_residual},
                 {"commutation_residual", split.commutation_residual},
                 {"peripheral", peripheral},
                 {"stable_spectral_radius", split.spectrum.stable_spectral_radius},
                 {"tol_unimodular", split.spectrum.tol_unimodular}};
  return dump(out);
}

std::string diagonal_decompose_report_json(const DiagonalOperator& op,
                                           const DiagonalJdlgSplit& split) {
  const json out{{"kind", "diagonal_mask"},
                 {"projection", "identity on E_aap = c0 (subset of c)"},
                 {"stable_part", "E_st = {0}; I - P = 0"},
                 {"limit_b", complex_json(op.limit())},
                 {"power_bound", power_bound_json(split.power_bound)},
                 {"doubly_power_bounded", split.doubly_power_bounded},
                 {"not_all_vectors_aap", split.not_all_vectors_aap},
                 {"ergodicity_probe", ergodicity_json(split.probe)}};
  return dump(out);
}

std::string verdict_report_json(const CompactnessVerdict& v) { return dump(verdict_json(v)); }

std::string entropy_csv(const EntropyTable& table) {
  std::ostringstream os;
  os << "eps,horizon,net_size,flag\n";
  for (std::size_t ei = 0; ei < table.eps_grid.size(); ++ei) {
    const char* flag = table.flags[ei] == EpsFlag::Stable ? "STABLE" : "GROWING";
    for (std::size_t hi = 0; hi < table.horizons.size(); ++hi) {
      const EntropyCell& c = table.cells[ei * table.horizons.size() + hi];
      os << c.eps << ',' << c.horizon << ',' << c.net_size << ',' << flag << '\n';
    }
  }
  return os.str();
}

std::string witnesses_csv(const std::vector<std::uint64_t>& indices,
                          const std::vector<double>& min_pairwise) {
  std::ostringstream os;
  os << "k,witness_index,min_pairwise_distance\n";
  for (std::size_t k = 0; k < indices.size(); ++k) {
    os << k << ',' << indices[k] << ','
       << (k < min_pairwise.size() ? min_pairwise[k] : 0.0) << '\n';
  }
  return os.str();
}

std::string certificate_json(const C0CopyCertificate& cert) {
  return dump(certificate_inner_json(cert));
}

std::string witness_partial_json(const WitnessState& state) {
  const json out{{"status", state.status == SearchStatus::Completed ? "COMPLETED" : "EXHAUSTED"},
                 {"M", state.M},
                 {"delta", state.delta},
                 {"k_seq", state.k_seq},
                 {"sigma_residuals", state.sigma_residuals},
                 {"norm_lower_bounds", state.norm_lower_bounds},
                 {"exhausted_stage", state.exhausted_stage},
                 {"best_tol_achieved", state.best_tol_achieved}};
  return dump(out);
}

std::string gallery_report_json(const GalleryReport& report) {
  json out{{"example_id", report.example_id},
           {"operator", report.operator_summary},
           {"seed", report.seed},
           {"parity_ok", report.parity_ok},
           {"parity_failures", report.parity_failures},
           {"notes", report.notes},
           {"doubly_power_bounded", report.doubly_power_bounded},
           {"power_bound_M", report.power_bound_M}};
  if (report.orbit_verdict) out["orbit"] = verdict_json(*report.orbit_verdict);
  if (report.d1_verdict) out["d1"] = verdict_json(*report.d1_verdict);
  if (report.dm_verdict) out["dm"] = verdict_json(*report.dm_verdict);
  if (report.diff_entropy) out["diff_entropy"] = entropy_json(*report.diff_entropy);
  if (report.ergodicity) out["ergodicity"] = ergodicity_json(*report.ergodicity);
  if (report.stable_convergence)
    out["stable_convergence"] = convergence_json(*report.stable_convergence);
  if (report.certificate) out["certificate"] = certificate_inner_json(*report.certificate);
  if (report.metric_oracle_pairs > 0) {
    out["metric_oracle"] = json{{"pairs", report.metric_oracle_pairs},
                                {"max_gap", report.metric_oracle_max_gap}};
  }
  if (report.trials > 0) {
    out["trials"] = report.trials;
    out["trials_passed"] = report.trials_passed;
    out["trial_failures"] = report.trial_failures;
  }
  return dump(out);
}

std::string lemma_results_json(const std::string& name,
                               const std::vector<LemmaTrial>& trials) {
  json arr = json::array();
  bool all_pass = true;
  for (const LemmaTrial& t : trials) {
    arr.push_back(json{{"trial", t.index},
                       {"outcome", t.outcome},
                       {"residual", t.residual},
                       {"pass", t.pass}});
    all_pass = all_pass && t.pass;
  }
  return dump(json{{"lemma", name}, {"all_pass", all_pass}, {"trials", arr}});
}

}  // namespace orbitlab
