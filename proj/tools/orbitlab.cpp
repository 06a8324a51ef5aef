// orbitlab: JdLG decomposition, orbit compactness analysis, and c0-copy
// witness extraction for power-bounded operators.
//
// Exit codes: 0 success, 1 config, 2 not power-bounded, 3 tolerance-ambiguous,
// 4 precondition, 5 exhausted, 6 parity failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "orbitlab/config.hpp"
#include "orbitlab/families.hpp"
#include "orbitlab/gallery.hpp"
#include "orbitlab/random.hpp"
#include "orbitlab/report_json.hpp"

namespace {

using namespace orbitlab;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::DimensionMismatch:
      return 1;
    case ErrorCode::NotPowerBounded:
      return 2;
    case ErrorCode::TolAmbiguous:
      return 3;
    case ErrorCode::NoSeparation:
    case ErrorCode::ProjectionUnavailable:
    case ErrorCode::UnsupportedDiagonal:
    case ErrorCode::SylvesterIllConditioned:
      return 4;
    case ErrorCode::Exhausted:
    case ErrorCode::HorizonExceeded:
      return 5;
    case ErrorCode::BpViolation:
    case ErrorCode::Internal:
      return 10;
  }
  return 10;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::ConfigError, "cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Atomic write: temp file in the target directory, then rename.
void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::ConfigError, "cannot write: " + tmp.string());
    out << data;
  }
  std::filesystem::rename(tmp, path);
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = parse_experiment_config(read_file(args.config_path));
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.witness.seed = args.seed;
  }
  return cfg;
}

GalleryConfig gallery_config(const ExperimentConfig& cfg) {
  GalleryConfig g;
  g.head_dim = cfg.head_dim;
  g.analysis = cfg.analysis;
  g.witness = cfg.witness;
  g.seed = cfg.seed;
  return g;
}

int cmd_decompose(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  if (!cfg.op) raise(ErrorCode::ConfigError, "decompose needs an 'operator'");
  std::string report;
  if (const auto* diag = std::get_if<DiagonalOperator>(&*cfg.op)) {
    const DiagonalJdlgSplit split = diagonal_jdlg(*diag, cfg.head_dim);
    report = diagonal_decompose_report_json(*diag, split);
  } else if (const auto* mat = std::get_if<MatrixOperator>(&*cfg.op)) {
    const MatrixJdlgSplit split = jdlg_project(*mat);
    report = matrix_decompose_report_json(*mat, split);
  } else {
    raise(ErrorCode::ConfigError, "decompose supports matrix and diagonal operators");
  }
  write_file(std::filesystem::path(cfg.out_dir) / "report.json", report);
  return 0;
}

/// Per-witness minimum pairwise lo distance, for the witness CSV.
std::vector<double> per_witness_min(const PointFamily& family,
                                    const std::vector<std::uint64_t>& indices) {
  std::vector<double> mins(indices.size(), 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (i == j) continue;
      best = std::min(best, family
                                .distance(static_cast<std::size_t>(indices[i]),
                                          static_cast<std::size_t>(indices[j]))
                                .lo);
    }
    mins[i] = indices.size() > 1 ? best : 0.0;
  }
  return mins;
}

int cmd_analyze(const CommonArgs& args, const std::string& target, std::uint64_t m) {
  const ExperimentConfig cfg = load_config(args);
  if (!cfg.op) raise(ErrorCode::ConfigError, "analyze needs an 'operator'");
  if (target != "orbit" && target != "diff")
    raise(ErrorCode::ConfigError, "--target must be 'orbit' or 'diff'");
  if (m < 1) raise(ErrorCode::ConfigError, "--m must be >= 1");
  const std::uint64_t horizon = cfg.analysis.horizons.back();

  PointFamily family = [&]() -> PointFamily {
    if (const auto* diag = std::get_if<DiagonalOperator>(&*cfg.op)) {
      const VectorSpec vec = cfg.vector.value_or(VectorSpec{});
      const SeqVec x = build_seqvec(vec, cfg.head_dim);
      return target == "orbit" ? diagonal_orbit_family(*diag, x, horizon)
                               : diagonal_difference_family(*diag, x, m, horizon);
    }
    if (const auto* mat = std::get_if<MatrixOperator>(&*cfg.op)) {
      const VectorSpec vec = cfg.vector.value_or(VectorSpec{});
      const Eigen::VectorXcd x = build_matrix_vector(vec, mat->dim());
      return target == "orbit" ? matrix_orbit_family(*mat, x, horizon)
                               : matrix_difference_family(*mat, x, m, horizon);
    }
    const auto& ex1 = std::get<Example1Operator>(*cfg.op);
    if (cfg.vector)
      raise(ErrorCode::ConfigError,
            "example1 analyses use the canonical vector x(t) = (sin(t/2^n))_n; "
            "remove 'vector' from the config");
    return target == "orbit" ? example1_orbit_family(ex1, horizon)
                             : example1_diff_family(ex1, horizon, cfg.head_dim);
  }();

  const CompactnessVerdict v = verdict(family, cfg.analysis);
  write_file(std::filesystem::path(cfg.out_dir) / "verdict.json", verdict_report_json(v));
  const EntropyTable table =
      v.entropy.cells.empty()
          ? entropy_table(family, cfg.analysis.eps_grid, cfg.analysis.horizons,
                          cfg.analysis.net_cap)
          : v.entropy;
  write_file(std::filesystem::path(cfg.out_dir) / "entropy.csv", entropy_csv(table));
  if (!v.witness_indices.empty()) {
    write_file(std::filesystem::path(cfg.out_dir) / "witnesses.csv",
               witnesses_csv(v.witness_indices, per_witness_min(family, v.witness_indices)));
  }
  return 0;
}

int cmd_witness(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  if (!cfg.op) raise(ErrorCode::ConfigError, "witness needs an 'operator'");
  WitnessConfig wcfg = cfg.witness;
  wcfg.analysis = cfg.analysis;
  wcfg.seed = cfg.seed;

  if (const auto* diag = std::get_if<DiagonalOperator>(&*cfg.op)) {
    const VectorSpec vec = cfg.vector.value_or(VectorSpec{});
    const SeqVec x = build_seqvec(vec, cfg.head_dim);
    const DiagonalJdlgSplit split = diagonal_jdlg(*diag, cfg.head_dim);
    const PbigResult pbig = pbig_extract(*diag, split, x, wcfg);
    const WitnessState state = build_k_sequence(*diag, split, x, wcfg, pbig);
    if (state.status == SearchStatus::Exhausted) {
      write_file(std::filesystem::path(cfg.out_dir) / "certificate.json",
                 witness_partial_json(state));
      std::cerr << "EXHAUSTED at stage " << state.exhausted_stage << " (best tol "
                << state.best_tol_achieved << ")\n";
      return 5;
    }
    const C0CopyCertificate cert = bp_certificate(*diag, split, x, state, wcfg);
    write_file(std::filesystem::path(cfg.out_dir) / "certificate.json",
               certificate_json(cert));
    return 0;
  }
  if (const auto* mat = std::get_if<MatrixOperator>(&*cfg.op)) {
    const VectorSpec vec = cfg.vector.value_or(VectorSpec{});
    const Eigen::VectorXcd x = build_matrix_vector(vec, mat->dim());
    const MatrixJdlgSplit split = jdlg_project(*mat);
    pbig_extract(*mat, split, x, wcfg);  // always NO_SEPARATION in finite dimension
    raise(ErrorCode::Internal, "unreachable");
  }
  raise(ErrorCode::ConfigError, "witness pipeline supports diagonal and matrix operators");
}

int cmd_gallery(const CommonArgs& args, int m_override) {
  const ExperimentConfig cfg = load_config(args);
  if (!cfg.gallery) raise(ErrorCode::ConfigError, "gallery needs a 'gallery' section");
  GallerySpec spec = *cfg.gallery;
  if (m_override > 0) spec.m = m_override;
  const GalleryConfig gcfg = gallery_config(cfg);

  GalleryReport report;
  if (spec.id == "example1") {
    report = run_example1(spec.a, gcfg);
  } else if (spec.id == "diagonal-c") {
    report = run_diagonal_c(gcfg);
  } else if (spec.id == "mth-root") {
    report = run_mth_root(spec.m, gcfg);
  } else {
    report = run_matrix_suite(cfg.seed, spec.trials, gcfg);
  }

  const std::filesystem::path out(cfg.out_dir);
  write_file(out / "report.json", gallery_report_json(report));
  if (report.orbit_verdict && !report.orbit_verdict->entropy.cells.empty())
    write_file(out / "orbit_entropy.csv", entropy_csv(report.orbit_verdict->entropy));
  if (report.diff_entropy)
    write_file(out / "diff_entropy.csv", entropy_csv(*report.diff_entropy));
  if (report.certificate)
    write_file(out / "certificate.json", certificate_json(*report.certificate));
  return report.parity_ok ? 0 : 6;
}

int cmd_lemma(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  if (!cfg.lemma) raise(ErrorCode::ConfigError, "lemma needs a 'lemma' section");
  const LemmaSpec spec = *cfg.lemma;
  std::vector<LemmaTrial> trials;
  bool all_pass = true;

  if (spec.name == "telescoping") {
    for (int t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(t));
      const int d = 2 + static_cast<int>(rng.uniform_index(7));
      Eigen::MatrixXcd u(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) u(i, j) = rng.gaussian_complex();
      // Power-bounded by construction: scaled contraction.
      const MatrixOperator T(u * (0.9 / std::max(1e-9, u.operatorNorm())));
      Eigen::VectorXcd x(d);
      for (int i = 0; i < d; ++i) x(i) = rng.gaussian_complex();
      const std::uint64_t n = rng.uniform_index(17);
      const std::uint64_t mm = 1 + rng.uniform_index(6);
      const double r = telescope_check(T, x, n, mm);
      LemmaTrial trial{t, "residual", r, r <= 1e-12};
      all_pass = all_pass && trial.pass;
      trials.push_back(trial);
    }
  } else if (spec.name == "multap") {
    const DiagonalOperator op = DiagonalOperator::dyadic(1);
    for (int t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(t));
      const SeqVec x = SeqVec::ones(48);
      std::vector<SeqVec> aap;
      const std::uint64_t s = 1 + 2 * rng.uniform_index(8);
      aap.push_back(diagonal_power_diff_vector(op, x, static_cast<std::int64_t>(s), 0));
      IndexStream stream;
      stream.range_end = std::uint64_t(1) << 40;
      const double tol = 1.0 / 64.0;
      const MultapResult r =
          multap_refine(op, aap, stream, tol, 1 + rng.uniform_index(64), stream.range_end);
      const bool ok = r.status == SearchStatus::Completed && r.achieved_tol <= tol;
      LemmaTrial trial{t, ok ? "refined" : "exhausted", r.achieved_tol, ok};
      all_pass = all_pass && trial.pass;
      trials.push_back(trial);
    }
  } else {  // pbig
    for (int t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(t));
      LemmaTrial trial{t, "", 0.0, false};
      if (t % 2 == 0) {
        // Positive case: the dyadic gallery orbit separates.
        const DiagonalOperator op = DiagonalOperator::dyadic(1);
        const DiagonalJdlgSplit split = diagonal_jdlg(op, 48);
        WitnessConfig wcfg = cfg.witness;
        wcfg.analysis = cfg.analysis;
        const PbigResult r = pbig_extract(op, split, SeqVec::ones(48), wcfg);
        trial.outcome = "separated";
        trial.residual = r.delta;
        trial.pass = r.delta > 0.5;
      } else {
        // Expected negative: compact orbits yield NO_SEPARATION.
        const int d = 2 + static_cast<int>(rng.uniform_index(4));
        const MatrixOperator T(Eigen::MatrixXcd::Identity(d, d));
        const MatrixJdlgSplit split = jdlg_project(T);
        Eigen::VectorXcd x(d);
        for (int i = 0; i < d; ++i) x(i) = rng.gaussian_complex();
        WitnessConfig wcfg = cfg.witness;
        wcfg.analysis = cfg.analysis;
        try {
          pbig_extract(T, split, x, wcfg);
          trial.outcome = "unexpected separation";
          trial.pass = false;
        } catch (const Error& e) {
          trial.outcome = "NO_SEPARATION (expected)";
          trial.pass = e.code() == ErrorCode::NoSeparation;
        }
      }
      all_pass = all_pass && trial.pass;
      trials.push_back(trial);
    }
  }

  write_file(std::filesystem::path(cfg.out_dir) / "results.json",
             lemma_results_json(spec.name, trials));
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitlab: certificate-producing orbit compactness laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string target = "orbit";
  std::uint64_t m = 1;
  int gallery_m = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON config path")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_option("--seed", args.seed, "seed (overrides config)")
        ->each([&](const std::string&) { args.seed_set = true; });
  };

  CLI::App* decompose = app.add_subcommand("decompose", "JdLG decomposition report");
  add_common(decompose);
  CLI::App* analyze = app.add_subcommand("analyze", "compactness verdict for a family");
  add_common(analyze);
  analyze->add_option("--target", target, "orbit | diff");
  analyze->add_option("--m", m, "difference step for --target diff");
  CLI::App* witness = app.add_subcommand("witness", "c0-copy witness pipeline");
  add_common(witness);
  CLI::App* gallery = app.add_subcommand("gallery", "paper-parity gallery runs");
  add_common(gallery);
  gallery->add_option("--m", gallery_m, "override m for the mth-root gallery");
  CLI::App* lemma = app.add_subcommand("lemma", "randomized lemma property runs");
  add_common(lemma);

  CLI11_PARSE(app, argc, argv);

  try {
    if (decompose->parsed()) return cmd_decompose(args);
    if (analyze->parsed()) return cmd_analyze(args, target, m);
    if (witness->parsed()) return cmd_witness(args);
    if (gallery->parsed()) return cmd_gallery(args, gallery_m);
    if (lemma->parsed()) return cmd_lemma(args);
  } catch (const orbitlab::Error& e) {
    std::cerr << orbitlab::error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 10;
  }
  return 0;
}
