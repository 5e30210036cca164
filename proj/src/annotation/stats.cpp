#include "partmotion/annotation/stats.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace partmotion::annotation {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (!std::ispunct(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

DatasetStats datasetStats(const std::vector<HierarchicalAnnotation>& anns) {
  DatasetStats s;
  auto count = [&s](const Track& track, std::size_t& labels, std::size_t& unknown) {
    for (const auto& seg : track) {
      if (seg.label.isUnknown()) {
        ++unknown;
        continue;
      }
      ++labels;
      for (auto& tok : tokenize(seg.label.text())) {
        s.vocabulary.insert(std::move(tok));
      }
    }
  };
  for (const auto& a : anns) {
    ++s.sequences;
    s.hours += a.numFrames / a.fps / 3600.0;
    count(a.sequence, s.sequenceLabels, s.unknownSequence);
    count(a.actions, s.actionLabels, s.unknownActions);
    for (PartId p : kAllParts) {
      count(a.part(p), s.partLabels, s.unknownParts);
    }
  }
  return s;
}

std::string formatStatsTable(const DatasetStats& s) {
  std::ostringstream out;
  auto row = [&](const char* name, const std::string& value) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-20s %14s\n", name, value.c_str());
    out << line;
  };
  char hours[32];
  std::snprintf(hours, sizeof(hours), "%.4f", s.hours);
  row("sequences", std::to_string(s.sequences));
  row("hours", hours);
  row("vocabulary", std::to_string(s.vocabulary.size()));
  row("total labels", std::to_string(s.totalLabels()));
  row("sequence labels", std::to_string(s.sequenceLabels));
  row("action labels", std::to_string(s.actionLabels));
  row("part labels", std::to_string(s.partLabels));
  row("unknown sequence", std::to_string(s.unknownSequence));
  row("unknown actions", std::to_string(s.unknownActions));
  row("unknown parts", std::to_string(s.unknownParts));
  return out.str();
}

}  // namespace partmotion::annotation
