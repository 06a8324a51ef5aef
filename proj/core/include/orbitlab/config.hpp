#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/compactness.hpp"
#include "orbitlab/operators.hpp"
#include "orbitlab/witness.hpp"

namespace orbitlab {

// JSON experiment configuration (schema-validated, unknown keys rejected).
//
// operator: {"kind":"diagonal","rule":"dyadic","num":1,"sign_flip":false}
//           {"kind":"diagonal","rule":"dyadic","num":1,"root":[1,3]}
//           {"kind":"diagonal","rule":"explicit","entries":[[re,im],...],
//            "limit":[re,im],"tail_bound":r}
//           {"kind":"matrix","entries":[[[re,im],...],...]}
//           {"kind":"example1","a":1.0}
// vector:   {"kind":"ones"} | {"kind":"basis","index":k}
//           {"kind":"coords","values":[[re,im],...],
//            "tail":{"kind":"null"|"limit","limit":[re,im],"bound":r}}

struct VectorSpec {
  enum class Kind { Ones, Basis, Coords };
  Kind kind = Kind::Ones;
  std::size_t index = 0;
  std::vector<Complex> values;
  TailDescriptor tail;
};

struct GallerySpec {
  std::string id;  // example1 | diagonal-c | mth-root | matrix-suite
  double a = 1.0;
  int m = 2;
  int trials = 100;
};

struct LemmaSpec {
  std::string name;  // telescoping | multap | pbig
  int trials = 100;
};

struct ExperimentConfig {
  std::optional<Operator> op;
  std::optional<VectorSpec> vector;
  std::size_t head_dim = 48;
  AnalysisConfig analysis;
  WitnessConfig witness;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::optional<GallerySpec> gallery;
  std::optional<LemmaSpec> lemma;
};

/// Parses and validates; throws CONFIG_ERROR with a path diagnostic.
ExperimentConfig parse_experiment_config(const std::string& json_text);

SeqVec build_seqvec(const VectorSpec& spec, std::size_t head_dim);
Eigen::VectorXcd build_matrix_vector(const VectorSpec& spec, Eigen::Index dim);

}  // namespace orbitlab
