#pragma once

#include <string>
#include <vector>

#include "orbitlab/gallery.hpp"

namespace orbitlab {

// Deterministic serialization: JSON objects are emitted with sorted keys and
// locale-independent number formatting (round-trip shortest form), so a rerun
// with the same config and seed is byte-identical.

std::string matrix_decompose_report_json(const MatrixOperator& T,
                                         const MatrixJdlgSplit& split);
std::string diagonal_decompose_report_json(const DiagonalOperator& op,
                                           const DiagonalJdlgSplit& split);

std::string verdict_report_json(const CompactnessVerdict& v);

/// Columns: eps,horizon,net_size,flag
std::string entropy_csv(const EntropyTable& table);

/// Columns: k,witness_index,min_pairwise_distance
std::string witnesses_csv(const std::vector<std::uint64_t>& indices,
                          const std::vector<double>& min_pairwise);

std::string certificate_json(const C0CopyCertificate& cert);
std::string witness_partial_json(const WitnessState& state);

std::string gallery_report_json(const GalleryReport& report);

struct LemmaTrial {
  int index = 0;
  std::string outcome;
  double residual = 0.0;
  bool pass = true;
};

std::string lemma_results_json(const std::string& name,
                               const std::vector<LemmaTrial>& trials);

}  // namespace orbitlab
