#include "orbitlab/config.hpp"

#include <set>

#include <json.hpp>

namespace orbitlab {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  raise(ErrorCode::ConfigError, "config error at " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) config_fail(path, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    config_fail(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::int64_t get_i64(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

Complex get_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) config_fail(path, "expected [re, im]");
  return Complex(get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]"));
}

Operator parse_operator(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) config_fail(path, "missing 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "diagonal") {
    check_keys(j, path,
               {"kind", "rule", "num", "sign_flip", "root", "entries", "limit",
                "tail_bound"});
    if (!j.contains("rule")) config_fail(path, "diagonal operator needs 'rule'");
    const std::string rule = j["rule"].get<std::string>();
    if (rule == "dyadic") {
      const std::int64_t num = j.contains("num") ? get_i64(j["num"], path + ".num") : 1;
      RootOfUnity root = RootOfUnity::make(0, 1);
      if (j.contains("sign_flip") && j.contains("root"))
        config_fail(path, "'sign_flip' and 'root' are mutually exclusive");
      if (j.contains("sign_flip")) {
        if (!j["sign_flip"].is_boolean()) config_fail(path + ".sign_flip", "expected bool");
        if (j["sign_flip"].get<bool>()) root = RootOfUnity::make(1, 2);
      }
      if (j.contains("root")) {
        const json& r = j["root"];
        if (!r.is_array() || r.size() != 2) config_fail(path + ".root", "expected [num, den]");
        root = RootOfUnity::make(get_i64(r[0], path + ".root[0]"),
                                 get_i64(r[1], path + ".root[1]"));
      }
      return Operator{DiagonalOperator::dyadic_with_prefactor(num, root)};
    }
    if (rule == "explicit") {
      if (!j.contains("entries") || !j.contains("limit") || !j.contains("tail_bound"))
        config_fail(path, "explicit diagonal needs 'entries', 'limit', 'tail_bound'");
      std::vector<Complex> entries;
      for (std::size_t i = 0; i < j["entries"].size(); ++i)
        entries.push_back(get_complex(j["entries"][i], path + ".entries"));
      return Operator{DiagonalOperator::explicit_rule(
          std::move(entries), get_complex(j["limit"], path + ".limit"),
          get_number(j["tail_bound"], path + ".tail_bound"))};
    }
    config_fail(path + ".rule", "unknown diagonal rule '" + rule + "'");
  }
  if (kind == "matrix") {
    check_keys(j, path, {"kind", "entries"});
    if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].empty())
      config_fail(path, "matrix operator needs nonempty 'entries'");
    const std::size_t dim = j["entries"].size();
    Eigen::MatrixXcd m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      const json& row = j["entries"][r];
      if (!row.is_array() || row.size() != dim)
        config_fail(path + ".entries", "matrix must be square");
      for (std::size_t c = 0; c < dim; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            get_complex(row[c], path + ".entries");
    }
    return Operator{MatrixOperator(std::move(m))};
  }
  if (kind == "example1") {
    check_keys(j, path, {"kind", "a"});
    if (!j.contains("a")) config_fail(path, "example1 operator needs 'a'");
    return Operator{Example1Operator(get_number(j["a"], path + ".a"))};
  }
  config_fail(path + ".kind", "unknown operator kind '" + kind + "'");
}

VectorSpec parse_vector(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) config_fail(path, "missing 'kind'");
  VectorSpec spec;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ones") {
    check_keys(j, path, {"kind"});
    spec.kind = VectorSpec::Kind::Ones;
    return spec;
  }
  if (kind == "basis") {
    check_keys(j, path, {"kind", "index"});
    if (!j.contains("index")) config_fail(path, "basis vector needs 'index'");
    spec.kind = VectorSpec::Kind::Basis;
    spec.index = static_cast<std::size_t>(get_u64(j["index"], path + ".index"));
    return spec;
  }
  if (kind == "coords") {
    check_keys(j, path, {"kind", "values", "tail"});
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
      config_fail(path, "coords vector needs nonempty 'values'");
    spec.kind = VectorSpec::Kind::Coords;
    for (std::size_t i = 0; i < j["values"].size(); ++i)
      spec.values.push_back(get_complex(j["values"][i], path + ".values"));
    spec.tail = TailDescriptor::null_envelope(0.0);
    if (j.contains("tail")) {
      const json& t = j["tail"];
      check_keys(t, path + ".tail", {"kind", "limit", "bound"});
      const std::string tk = t["kind"].get<std::string>();
      const double bound =
          t.contains("bound") ? get_number(t["bound"], path + ".tail.bound") : 0.0;
      if (tk == "null") {
        spec.tail = TailDescriptor::null_envelope(bound);
      } else if (tk == "limit") {
        if (!t.contains("limit")) config_fail(path + ".tail", "limit tail needs 'limit'");
        spec.tail = TailDescriptor::convergent(
            get_complex(t["limit"], path + ".tail.limit"), bound);
      } else {
        config_fail(path + ".tail.kind", "expected 'null' or 'limit'");
      }
    }
    return spec;
  }
  config_fail(path + ".kind", "unknown vector kind '" + kind + "'");
}

AnalysisConfig parse_analysis(const json& j, const std::string& path) {
  check_keys(j, path,
             {"eps_grid", "horizons", "k_min", "witness_target", "delta_floor",
              "bisect_iters", "packing_cap", "net_cap"});
  AnalysisConfig cfg;
  if (j.contains("eps_grid")) {
    cfg.eps_grid.clear();
    for (const auto& e : j["eps_grid"]) cfg.eps_grid.push_back(get_number(e, path + ".eps_grid"));
  }
  if (j.contains("horizons")) {
    cfg.horizons.clear();
    for (const auto& h : j["horizons"]) cfg.horizons.push_back(get_u64(h, path + ".horizons"));
  }
  if (j.contains("k_min")) cfg.k_min = static_cast<std::size_t>(get_u64(j["k_min"], path + ".k_min"));
  if (j.contains("witness_target"))
    cfg.witness_target = static_cast<std::size_t>(get_u64(j["witness_target"], path + ".witness_target"));
  if (j.contains("delta_floor")) cfg.delta_floor = get_number(j["delta_floor"], path + ".delta_floor");
  if (j.contains("bisect_iters"))
    cfg.bisect_iters = static_cast<int>(get_u64(j["bisect_iters"], path + ".bisect_iters"));
  if (j.contains("packing_cap"))
    cfg.packing_cap = static_cast<std::size_t>(get_u64(j["packing_cap"], path + ".packing_cap"));
  if (j.contains("net_cap"))
    cfg.net_cap = static_cast<std::size_t>(get_u64(j["net_cap"], path + ".net_cap"));
  return cfg;
}

WitnessConfig parse_witness(const json& j, const std::string& path) {
  check_keys(j, path,
             {"horizon", "m_target", "delta_margin", "exhaustive_up_to", "random_samples"});
  WitnessConfig cfg;
  if (j.contains("horizon")) cfg.horizon = get_u64(j["horizon"], path + ".horizon");
  if (j.contains("m_target"))
    cfg.m_target = static_cast<int>(get_u64(j["m_target"], path + ".m_target"));
  if (j.contains("delta_margin"))
    cfg.delta_margin = get_number(j["delta_margin"], path + ".delta_margin");
  if (j.contains("exhaustive_up_to"))
    cfg.exhaustive_up_to = static_cast<int>(get_u64(j["exhaustive_up_to"], path + ".exhaustive_up_to"));
  if (j.contains("random_samples"))
    cfg.random_samples = static_cast<int>(get_u64(j["random_samples"], path + ".random_samples"));
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded())
    raise(ErrorCode::ConfigError, "config error: invalid JSON");
  check_keys(root, "$",
             {"operator", "vector", "head_dim", "analysis", "witness", "seed", "out_dir",
              "gallery", "lemma"});
  ExperimentConfig cfg;
  if (root.contains("operator")) cfg.op = parse_operator(root["operator"], "$.operator");
  if (root.contains("vector")) cfg.vector = parse_vector(root["vector"], "$.vector");
  if (root.contains("head_dim")) {
    cfg.head_dim = static_cast<std::size_t>(get_u64(root["head_dim"], "$.head_dim"));
    if (cfg.head_dim < 1 || cfg.head_dim > 120)
      config_fail("$.head_dim", "must be in [1, 120]");
  }
  if (root.contains("analysis")) cfg.analysis = parse_analysis(root["analysis"], "$.analysis");
  if (root.contains("witness")) cfg.witness = parse_witness(root["witness"], "$.witness");
  if (root.contains("seed")) cfg.seed = get_u64(root["seed"], "$.seed");
  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) config_fail("$.out_dir", "expected a string");
    cfg.out_dir = root["out_dir"].get<std::string>();
  }
  if (root.contains("gallery")) {
    const json& g = root["gallery"];
    check_keys(g, "$.gallery", {"id", "a", "m", "trials"});
    if (!g.contains("id")) config_fail("$.gallery", "missing 'id'");
    GallerySpec spec;
    spec.id = g["id"].get<std::string>();
    if (spec.id != "example1" && spec.id != "diagonal-c" && spec.id != "mth-root" &&
        spec.id != "matrix-suite")
      config_fail("$.gallery.id", "unknown gallery id '" + spec.id + "'");
    if (g.contains("a")) spec.a = get_number(g["a"], "$.gallery.a");
    if (g.contains("m")) spec.m = static_cast<int>(get_i64(g["m"], "$.gallery.m"));
    if (g.contains("trials"))
      spec.trials = static_cast<int>(get_u64(g["trials"], "$.gallery.trials"));
    cfg.gallery = spec;
  }
  if (root.contains("lemma")) {
    const json& l = root["lemma"];
    check_keys(l, "$.lemma", {"name", "trials"});
    if (!l.contains("name")) config_fail("$.lemma", "missing 'name'");
    LemmaSpec spec;
    spec.name = l["name"].get<std::string>();
    if (spec.name != "telescoping" && spec.name != "multap" && spec.name != "pbig")
      config_fail("$.lemma.name", "unknown lemma '" + spec.name + "'");
    if (l.contains("trials")) {
      spec.trials = static_cast<int>(get_u64(l["trials"], "$.lemma.trials"));
      if (spec.trials < 1) config_fail("$.lemma.trials", "must be >= 1");
    }
    cfg.lemma = spec;
  }
  cfg.witness.seed = cfg.seed;
  return cfg;
}

SeqVec build_seqvec(const VectorSpec& spec, std::size_t head_dim) {
  switch (spec.kind) {
    case VectorSpec::Kind::Ones:
      return SeqVec::ones(head_dim);
    case VectorSpec::Kind::Basis: {
      const std::size_t dim = std::max(head_dim, spec.index + 1);
      return SeqVec::basis(dim, spec.index);
    }
    case VectorSpec::Kind::Coords: {
      SeqVec v;
      v.head = spec.values;
      v.tail = spec.tail;
      if (v.dim() < head_dim && v.tail.bound == 0.0)
        v.head.resize(head_dim, v.tail.center());
      v.validate("vector config");
      return v;
    }
  }
  raise(ErrorCode::Internal, "unhandled vector kind");
}

Eigen::VectorXcd build_matrix_vector(const VectorSpec& spec, Eigen::Index dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  switch (spec.kind) {
    case VectorSpec::Kind::Ones:
      v.setOnes();
      return v;
    case VectorSpec::Kind::Basis:
      if (spec.index >= static_cast<std::size_t>(dim))
        raise(ErrorCode::ConfigError, "basis index beyond matrix dimension");
      v(static_cast<Eigen::Index>(spec.index)) = Complex(1.0, 0.0);
      return v;
    case VectorSpec::Kind::Coords:
      if (spec.values.size() != static_cast<std::size_t>(dim))
        raise(ErrorCode::ConfigError, "coords length must match matrix dimension");
      for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = spec.values[static_cast<std::size_t>(i)];
      return v;
  }
  raise(ErrorCode::Internal, "unhandled vector kind");
}

}  // namespace orbitlab
