#pragma once

#include <set>
#include <string>
#include <vector>

#include "partmotion/annotation/annotation.hpp"

namespace partmotion::annotation {

struct DatasetStats {
  std::size_t sequences = 0;
  double hours = 0.0;
  // Non-UNKNOWN label counts per level.
  std::size_t sequenceLabels = 0;
  std::size_t actionLabels = 0;
  std::size_t partLabels = 0;
  std::size_t unknownSequence = 0;
  std::size_t unknownActions = 0;
  std::size_t unknownParts = 0;
  std::set<std::string> vocabulary;

  std::size_t totalLabels() const {
    return sequenceLabels + actionLabels + partLabels;
  }
  std::size_t totalUnknown() const {
    return unknownSequence + unknownActions + unknownParts;
  }
};

// Lowercased, punctuation stripped, split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

DatasetStats datasetStats(const std::vector<HierarchicalAnnotation>& anns);

std::string formatStatsTable(const DatasetStats& stats);

}  // namespace partmotion::annotation
