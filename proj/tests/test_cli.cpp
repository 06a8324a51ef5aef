#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string bin_path() {
  const char* env = std::getenv("ORBITLAB_BIN");
  REQUIRE_MESSAGE(env != nullptr, "ORBITLAB_BIN must point at the orbitlab binary");
  return env;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "orbitlab_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("cli: decompose identity matrix writes P = I and exits 0") {
  const fs::path cfg = write_config("id.json", R"({
    "operator": {"kind":"matrix","entries":[[[1,0],[0,0]],[[0,0],[1,0]]]},
    "out_dir": ")" + (scratch_dir() / "id_out").string() + R"("
  })");
  CHECK(run("decompose --config " + cfg.string()) == 0);
  const std::string report = slurp(scratch_dir() / "id_out" / "report.json");
  CHECK(report.find("\"doubly_power_bounded\": true") != std::string::npos);
}

TEST_CASE("cli: decompose Jordan block exits 2") {
  const fs::path cfg = write_config("jordan.json", R"({
    "operator": {"kind":"matrix","entries":[[[1,0],[1,0]],[[0,0],[1,0]]]},
    "out_dir": ")" + (scratch_dir() / "j_out").string() + R"("
  })");
  CHECK(run("decompose --config " + cfg.string()) == 2);
}

TEST_CASE("cli: decompose dyadic diagonal reports the mask split") {
  const fs::path cfg = write_config("dyadic.json", R"({
    "operator": {"kind":"diagonal","rule":"dyadic","num":1,"sign_flip":false},
    "out_dir": ")" + (scratch_dir() / "dy_out").string() + R"("
  })");
  CHECK(run("decompose --config " + cfg.string()) == 0);
  const std::string report = slurp(scratch_dir() / "dy_out" / "report.json");
  CHECK(report.find("\"doubly_power_bounded\": true") != std::string::npos);
  CHECK(report.find("NOT_MEAN_ERGODIC") != std::string::npos);
}

TEST_CASE("cli: config errors exit 1 with diagnostics") {
  const fs::path cfg = write_config("bad.json", R"({"unknown_key": 1})");
  CHECK(run("decompose --config " + cfg.string()) == 1);
  const fs::path missing = scratch_dir() / "does_not_exist.json";
  CHECK(run("decompose --config " + missing.string()) == 1);
}

TEST_CASE("cli: analyze example1 orbit and diff") {
  const fs::path cfg = write_config("ex1.json", R"({
    "operator": {"kind":"example1","a":1.0},
    "out_dir": ")" + (scratch_dir() / "ex1_out").string() + R"("
  })");
  CHECK(run("analyze --config " + cfg.string() + " --target orbit") == 0);
  std::string verdict = slurp(scratch_dir() / "ex1_out" / "verdict.json");
  CHECK(verdict.find("NOT_COMPACT_EVIDENCE") != std::string::npos);
  const std::string entropy = slurp(scratch_dir() / "ex1_out" / "entropy.csv");
  CHECK(entropy.rfind("eps,horizon,net_size,flag\n", 0) == 0);
  const std::string witnesses = slurp(scratch_dir() / "ex1_out" / "witnesses.csv");
  CHECK(witnesses.rfind("k,witness_index,min_pairwise_distance\n", 0) == 0);

  CHECK(run("analyze --config " + cfg.string() + " --target diff --m 1") == 0);
  verdict = slurp(scratch_dir() / "ex1_out" / "verdict.json");
  CHECK(verdict.find("COMPACT_CERTIFIED") != std::string::npos);
}

TEST_CASE("cli: analyze zero vector is certified compact") {
  const fs::path cfg = write_config("zero.json", R"({
    "operator": {"kind":"diagonal","rule":"dyadic","num":1},
    "vector": {"kind":"coords","values":[[0,0]],"tail":{"kind":"null","bound":0}},
    "out_dir": ")" + (scratch_dir() / "zero_out").string() + R"("
  })");
  CHECK(run("analyze --config " + cfg.string() + " --target orbit") == 0);
  const std::string verdict = slurp(scratch_dir() / "zero_out" / "verdict.json");
  CHECK(verdict.find("COMPACT_CERTIFIED") != std::string::npos);
}

TEST_CASE("cli: witness pipeline on the dyadic gallery exits 0 with 8 exponents") {
  const fs::path cfg = write_config("wit.json", R"({
    "operator": {"kind":"diagonal","rule":"dyadic","num":1},
    "vector": {"kind":"ones"},
    "seed": 7,
    "out_dir": ")" + (scratch_dir() / "wit_out").string() + R"("
  })");
  CHECK(run("witness --config " + cfg.string()) == 0);
  const std::string cert = slurp(scratch_dir() / "wit_out" / "certificate.json");
  CHECK(cert.find("\"k_seq\"") != std::string::npos);
  CHECK(cert.find("\"basis_constants\"") != std::string::npos);
}

TEST_CASE("cli: witness on the identity operator exits 4 (no separation)") {
  const fs::path cfg = write_config("wit_id.json", R"({
    "operator": {"kind":"matrix","entries":[[[1,0],[0,0]],[[0,0],[1,0]]]},
    "vector": {"kind":"ones"},
    "out_dir": ")" + (scratch_dir() / "wid_out").string() + R"("
  })");
  CHECK(run("witness --config " + cfg.string()) == 4);
}

TEST_CASE("cli: starved witness horizon exits 5 with partial state") {
  const fs::path cfg = write_config("wit16.json", R"({
    "operator": {"kind":"diagonal","rule":"dyadic","num":1},
    "vector": {"kind":"ones"},
    "witness": {"horizon": 16},
    "out_dir": ")" + (scratch_dir() / "w16_out").string() + R"("
  })");
  CHECK(run("witness --config " + cfg.string()) == 5);
  const std::string partial = slurp(scratch_dir() / "w16_out" / "certificate.json");
  CHECK(partial.find("EXHAUSTED") != std::string::npos);
}

TEST_CASE("cli: gallery runs exit 0; mth-root m=1 exits 1") {
  const fs::path g1 = write_config("g_ex1.json", R"({
    "gallery": {"id":"example1","a":1.0}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "g_ex1").string() + R"("
  })");
  CHECK(run("gallery --config " + g1.string()) == 0);

  const fs::path g2 = write_config("g_m2.json", R"({
    "gallery": {"id":"mth-root","m":2}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "g_m2").string() + R"("
  })");
  CHECK(run("gallery --config " + g2.string()) == 0);

  const fs::path g3 = write_config("g_m1.json", R"({
    "gallery": {"id":"mth-root","m":1}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "g_m1").string() + R"("
  })");
  CHECK(run("gallery --config " + g3.string()) == 1);
}

TEST_CASE("cli: lemma suites") {
  const fs::path tel = write_config("l_tel.json", R"({
    "lemma": {"name":"telescoping","trials":100}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "l_tel").string() + R"("
  })");
  CHECK(run("lemma --config " + tel.string()) == 0);
  const std::string results = slurp(scratch_dir() / "l_tel" / "results.json");
  CHECK(results.find("\"all_pass\": true") != std::string::npos);

  const fs::path pb = write_config("l_pbig.json", R"({
    "lemma": {"name":"pbig","trials":4}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "l_pbig").string() + R"("
  })");
  CHECK(run("lemma --config " + pb.string()) == 0);

  const fs::path mu = write_config("l_multap.json", R"({
    "lemma": {"name":"multap","trials":10}, "seed": 7,
    "out_dir": ")" + (scratch_dir() / "l_multap").string() + R"("
  })");
  CHECK(run("lemma --config " + mu.string()) == 0);
}

TEST_CASE("cli: determinism - identical config and seed give byte-identical outputs") {
  const fs::path cfg1 = write_config("det1.json", R"({
    "gallery": {"id":"diagonal-c"}, "seed": 123,
    "out_dir": ")" + (scratch_dir() / "det_a").string() + R"("
  })");
  const fs::path cfg2 = write_config("det2.json", R"({
    "gallery": {"id":"diagonal-c"}, "seed": 123,
    "out_dir": ")" + (scratch_dir() / "det_b").string() + R"("
  })");
  REQUIRE(run("gallery --config " + cfg1.string()) == 0);
  REQUIRE(run("gallery --config " + cfg2.string()) == 0);
  CHECK(slurp(scratch_dir() / "det_a" / "report.json") ==
        slurp(scratch_dir() / "det_b" / "report.json"));
  CHECK(slurp(scratch_dir() / "det_a" / "certificate.json") ==
        slurp(scratch_dir() / "det_b" / "certificate.json"));

  // --seed overrides the config and changes nothing else.
  const fs::path cfg3 = write_config("det3.json", R"({
    "gallery": {"id":"diagonal-c"}, "seed": 9999,
    "out_dir": ")" + (scratch_dir() / "det_c").string() + R"("
  })");
  REQUIRE(run("gallery --config " + cfg3.string() + " --seed 123") == 0);
  CHECK(slurp(scratch_dir() / "det_a" / "report.json") ==
        slurp(scratch_dir() / "det_c" / "report.json"));
}
