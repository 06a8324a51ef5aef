#include <doctest.h>

#include "orbitlab/config.hpp"

using namespace orbitlab;

TEST_CASE("config: dyadic diagonal operator") {
  const ExperimentConfig cfg = parse_experiment_config(
      R"({"operator": {"kind":"diagonal","rule":"dyadic","num":1,"sign_flip":false},
          "vector": {"kind":"ones"}, "seed": 9})");
  REQUIRE(cfg.op);
  const auto& diag = std::get<DiagonalOperator>(*cfg.op);
  CHECK(diag.dyadic_num() == 1);
  CHECK(diag.limit() == Complex(1.0, 0.0));
  CHECK(cfg.seed == 9);
  CHECK(cfg.witness.seed == 9);
}

TEST_CASE("config: sign_flip and root prefactor") {
  const ExperimentConfig flipped = parse_experiment_config(
      R"({"operator": {"kind":"diagonal","rule":"dyadic","num":1,"sign_flip":true}})");
  CHECK(std::get<DiagonalOperator>(*flipped.op).limit() == Complex(-1.0, 0.0));

  const ExperimentConfig rooted = parse_experiment_config(
      R"({"operator": {"kind":"diagonal","rule":"dyadic","num":1,"root":[1,3]}})");
  CHECK(std::get<DiagonalOperator>(*rooted.op).limit_power(3) == Complex(1.0, 0.0));

  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"operator": {"kind":"diagonal","rule":"dyadic","num":1,
                          "sign_flip":true,"root":[1,3]}})"),
                  Error);
}

TEST_CASE("config: matrix and example1 operators") {
  const ExperimentConfig mat = parse_experiment_config(
      R"({"operator": {"kind":"matrix","entries":[[[1,0],[0,0]],[[0,0],[0.5,0]]]}})");
  CHECK(std::get<MatrixOperator>(*mat.op).dim() == 2);

  const ExperimentConfig ex1 = parse_experiment_config(
      R"({"operator": {"kind":"example1","a":0.5}})");
  CHECK(std::get<Example1Operator>(*ex1.op).a == 0.5);

  CHECK_THROWS_AS(parse_experiment_config(R"({"operator": {"kind":"example1","a":-1}})"),
                  Error);
}

TEST_CASE("config: unknown keys rejected at every level") {
  CHECK_THROWS_AS(parse_experiment_config(R"({"oops": 1})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"operator": {"kind":"example1","a":1,"extra":2}})"),
                  Error);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"analysis": {"eps_grid":[1.0], "unknown": true}})"),
                  Error);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"vector": {"kind":"coords","values":[[1,0]],
                          "tail":{"kind":"null","bound":0,"spurious":1}}})"),
                  Error);
}

TEST_CASE("config: malformed JSON and bad values") {
  CHECK_THROWS_AS(parse_experiment_config("{"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"head_dim": 0})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"head_dim": 500})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"gallery": {"id":"nope"}})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"lemma": {"name":"nope"}})"), Error);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"operator": {"kind":"diagonal","rule":"dyadic","num":2}})"),
                  Error);
}

TEST_CASE("config: vector construction") {
  const ExperimentConfig cfg = parse_experiment_config(
      R"({"vector": {"kind":"coords","values":[[1,0],[0,1]],
          "tail":{"kind":"limit","limit":[0.5,0],"bound":0.25}}})");
  REQUIRE(cfg.vector);
  const SeqVec v = build_seqvec(*cfg.vector, 2);
  CHECK(v.head[1] == Complex(0.0, 1.0));
  REQUIRE(v.tail.kind == TailKind::ConvergentLimit);
  CHECK(v.tail.limit == Complex(0.5, 0.0));
  CHECK(v.tail.bound == 0.25);

  const SeqVec ones = build_seqvec(VectorSpec{}, 5);
  CHECK(ones.dim() == 5);
  CHECK(norm_lower_with_limit(ones) == 1.0);

  VectorSpec basis;
  basis.kind = VectorSpec::Kind::Basis;
  basis.index = 2;
  const Eigen::VectorXcd bv = build_matrix_vector(basis, 4);
  CHECK(bv(2) == Complex(1.0, 0.0));
  CHECK(bv.norm() == 1.0);
  basis.index = 9;
  CHECK_THROWS_AS(build_matrix_vector(basis, 4), Error);
}

TEST_CASE("config: gallery and lemma sections") {
  const ExperimentConfig g = parse_experiment_config(
      R"({"gallery": {"id":"mth-root","m":3}, "seed": 4})");
  REQUIRE(g.gallery);
  CHECK(g.gallery->id == "mth-root");
  CHECK(g.gallery->m == 3);

  const ExperimentConfig l = parse_experiment_config(
      R"({"lemma": {"name":"telescoping","trials":25}})");
  REQUIRE(l.lemma);
  CHECK(l.lemma->trials == 25);
}
