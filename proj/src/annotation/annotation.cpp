#include "partmotion/annotation/annotation.hpp"

#include <algorithm>
#include <cctype>

#include "partmotion/common/error.hpp"

namespace partmotion::annotation {
namespace {

constexpr std::array<std::string_view, kNumParts> kKeys = {
    "head", "left_arm", "right_arm", "spine", "left_leg", "right_leg", "trajectory"};
constexpr std::array<std::string_view, kNumParts> kEnumNames = {
    "HEAD", "LEFT_ARM", "RIGHT_ARM", "SPINE", "LEFT_LEG", "RIGHT_LEG", "TRAJECTORY"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string describe(const TimedLabel& seg) {
  return "(" + seg.label.wire() + ", " + std::to_string(seg.start) + ", " + std::to_string(seg.end) + ")";
}

void checkLabels(const Track& track, std::string_view name, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < track.size(); ++i) {
    const Label& l = track[i].label;
    if (!l.isUnknown() && (l.text().empty() || trim(l.text()) != l.text())) {
      out.push_back({std::string(name), static_cast<int>(i), Rule::kEmptyLabel,
                     "label must be non-empty and trimmed: '" + l.text() + "'"});
    }
  }
}

void checkRanges(const Track& track, std::string_view name, int numFrames, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < track.size(); ++i) {
    const auto& s = track[i];
    if (s.start < 0 || s.end > numFrames || s.start >= s.end) {
      out.push_back({std::string(name), static_cast<int>(i), Rule::kOutOfRange,
                     describe(s) + " is not a non-empty interval within [0, " + std::to_string(numFrames) +
                         "]"});
    }
  }
}

void checkPartition(const Track& track, std::string_view name, int numFrames, std::vector<Violation>& out) {
  checkRanges(track, name, numFrames, out);
  checkLabels(track, name, out);
  if (track.empty()) {
    out.push_back({std::string(name), 0, Rule::kGap, "track is empty; [0, T) is not covered"});
    return;
  }
  if (track.front().start > 0) {
    out.push_back({std::string(name), 0, Rule::kGap,
                   "first segment starts at " + std::to_string(track.front().start) + ", not 0"});
  }
  for (std::size_t i = 1; i < track.size(); ++i) {
    const int prevEnd = track[i - 1].end;
    if (track[i].start < prevEnd) {
      out.push_back({std::string(name), static_cast<int>(i), Rule::kOverlap,
                     describe(track[i]) + " starts before previous end " + std::to_string(prevEnd)});
    } else if (track[i].start > prevEnd) {
      out.push_back({std::string(name), static_cast<int>(i), Rule::kGap,
                     describe(track[i]) + " leaves frames [" + std::to_string(prevEnd) + ", " +
                         std::to_string(track[i].start) + ") uncovered"});
    }
  }
  if (track.back().end < numFrames) {
    out.push_back({std::string(name), static_cast<int>(track.size() - 1), Rule::kGap,
                   "last segment ends at " + std::to_string(track.back().end) + ", before T=" +
                       std::to_string(numFrames)});
  }
}

}  // namespace

std::string_view partKey(PartId part) {
  return kKeys[index(part)];
}

std::string_view partEnumName(PartId part) {
  return kEnumNames[index(part)];
}

std::optional<PartId> parsePart(std::string_view name) {
  const std::string l = lower(trim(name));
  for (std::size_t i = 0; i < kNumParts; ++i) {
    if (l == kKeys[i] || l == lower(kEnumNames[i])) {
      return kAllParts[i];
    }
  }
  return std::nullopt;
}

Label Label::fromWire(std::string_view text) {
  if (lower(trim(text)) == "unknown") {
    return Label::unknown();
  }
  return Label(std::string(text));
}

std::string Label::wire() const {
  return isUnknown() ? std::string("unknown") : *text_;
}

std::string_view ruleName(Rule rule) {
  switch (rule) {
    case Rule::kOverlap:
      return "OVERLAP";
    case Rule::kGap:
      return "GAP";
    case Rule::kOutOfRange:
      return "OUT_OF_RANGE";
    case Rule::kEmptyLabel:
      return "EMPTY_LABEL";
    case Rule::kBadSequenceSpan:
      return "BAD_SEQUENCE_SPAN";
  }
  return "?";
}

std::vector<Violation> validateAnnotation(const HierarchicalAnnotation& ann) {
  std::vector<Violation> out;
  if (ann.numFrames <= 0) {
    out.push_back({"header", 0, Rule::kOutOfRange, "num_frames must be positive"});
    return out;
  }
  if (!(ann.fps > 0.0)) {
    out.push_back({"header", 0, Rule::kOutOfRange, "fps must be positive"});
  }

  checkLabels(ann.sequence, "sequence", out);
  if (ann.sequence.size() != 1 || ann.sequence.front().start != 0 ||
      ann.sequence.front().end != ann.numFrames) {
    out.push_back({"sequence", 0, Rule::kBadSequenceSpan,
                   "sequence track must be exactly one segment spanning [0, " + std::to_string(ann.numFrames) +
                       ")"});
  }
  checkPartition(ann.actions, "actions", ann.numFrames, out);
  for (PartId p : kAllParts) {
    checkPartition(ann.part(p), partKey(p), ann.numFrames, out);
  }
  return out;
}

Track fillTrackGaps(const Track& raw, int numFrames, std::string_view trackName) {
  Track out;
  int cursor = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& s = raw[i];
    if (s.start < 0 || s.end > numFrames || s.start >= s.end) {
      throw Error(ErrorCode::kTimeOutOfRange,
                  std::string(trackName) + ": segment " + std::to_string(i) + " out of range",
                  describe(s));
    }
    if (s.start < cursor) {
      throw Error(ErrorCode::kOverlap,
                  std::string(trackName) + ": segments " + std::to_string(i - 1) + " and " +
                      std::to_string(i) + " overlap",
                  describe(raw[i - 1]) + " " + describe(s));
    }
    if (s.start > cursor) {
      out.push_back({Label::unknown(), cursor, s.start});
    }
    out.push_back(s);
    cursor = s.end;
  }
  if (cursor < numFrames) {
    out.push_back({Label::unknown(), cursor, numFrames});
  }
  return out;
}

HierarchicalAnnotation fillUnknownGaps(HierarchicalAnnotation raw) {
  if (raw.sequence.empty()) {
    raw.sequence.push_back({Label::unknown(), 0, raw.numFrames});
  }
  raw.actions = fillTrackGaps(raw.actions, raw.numFrames, "actions");
  for (PartId p : kAllParts) {
    raw.part(p) = fillTrackGaps(raw.part(p), raw.numFrames, partKey(p));
  }
  return raw;
}

const TimedLabel* segmentAt(const Track& track, int frame) {
  auto it = std::upper_bound(track.begin(), track.end(), frame,
                             [](int f, const TimedLabel& s) { return f < s.start; });
  if (it == track.begin()) {
    return nullptr;
  }
  --it;
  return it->contains(frame) ? &*it : nullptr;
}

FrameGrid toFrameGrid(const HierarchicalAnnotation& ann) {
  const auto violations = validateAnnotation(ann);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::kInvalidAnnotation,
                "annotation '" + ann.id + "' is invalid: " + std::string(ruleName(v.rule)) + " in " + v.track,
                v.message);
  }
  FrameGrid grid;
  grid.numFrames = ann.numFrames;
  grid.sequence = ann.sequence.front().label;
  grid.cells.resize(static_cast<std::size_t>(ann.numFrames) * kGridColumns);
  auto fill = [&](const Track& track, std::size_t column) {
    for (const auto& s : track) {
      for (int f = s.start; f < s.end; ++f) {
        grid.cells[static_cast<std::size_t>(f) * kGridColumns + column] = s.label;
      }
    }
  };
  for (PartId p : kAllParts) {
    fill(ann.part(p), index(p));
  }
  fill(ann.actions, kActionColumn);
  return grid;
}

Track runLengthColumn(const FrameGrid& grid, std::size_t column) {
  Track out;
  for (int f = 0; f < grid.numFrames; ++f) {
    const Label& l = grid.at(f, column);
    if (!out.empty() && out.back().label == l) {
      out.back().end = f + 1;
    } else {
      out.push_back({l, f, f + 1});
    }
  }
  return out;
}

HierarchicalAnnotation annotationFromGrid(const FrameGrid& grid, std::string id, double fps) {
  HierarchicalAnnotation ann;
  ann.id = std::move(id);
  ann.fps = fps;
  ann.numFrames = grid.numFrames;
  ann.sequence = {{grid.sequence, 0, grid.numFrames}};
  ann.actions = runLengthColumn(grid, kActionColumn);
  for (PartId p : kAllParts) {
    ann.part(p) = runLengthColumn(grid, index(p));
  }
  return ann;
}

}  // namespace partmotion::annotation
