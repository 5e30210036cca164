#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace partmotion::annotation {

// The seven body parts, in feature-layout order.
enum class PartId : std::uint8_t {
  kHead = 0,
  kLeftArm,
  kRightArm,
  kSpine,
  kLeftLeg,
  kRightLeg,
  kTrajectory,
};

inline constexpr std::size_t kNumParts = 7;
inline constexpr std::array<PartId, kNumParts> kAllParts = {
    PartId::kHead,    PartId::kLeftArm,  PartId::kRightArm,  PartId::kSpine,
    PartId::kLeftLeg, PartId::kRightLeg, PartId::kTrajectory,
};

inline constexpr std::size_t index(PartId p) {
  return static_cast<std::size_t>(p);
}

// File-format key, e.g. "left_arm".
std::string_view partKey(PartId part);
// Enumeration name, e.g. "LEFT_ARM".
std::string_view partEnumName(PartId part);
// Accepts either spelling, case-insensitive.
std::optional<PartId> parsePart(std::string_view name);

// A label text or the distinguished UNKNOWN value. At the serialization
// boundary UNKNOWN is the string "unknown" in any letter case.
class Label {
 public:
  Label() = default;  // UNKNOWN
  explicit Label(std::string text) : text_(std::move(text)) {}

  static Label unknown() {
    return {};
  }
  static Label fromWire(std::string_view text);

  bool isUnknown() const noexcept {
    return !text_.has_value();
  }
  // Precondition: !isUnknown().
  const std::string& text() const {
    return *text_;
  }
  std::string wire() const;

  friend bool operator==(const Label&, const Label&) = default;

 private:
  std::optional<std::string> text_;
};

// Half-open frame interval [start, end) carrying a label.
struct TimedLabel {
  Label label;
  int start = 0;
  int end = 0;

  int length() const {
    return end - start;
  }
  bool contains(int frame) const {
    return frame >= start && frame < end;
  }
  friend bool operator==(const TimedLabel&, const TimedLabel&) = default;
};

using Track = std::vector<TimedLabel>;

struct HierarchicalAnnotation {
  std::string id;
  int numFrames = 0;
  double fps = 20.0;
  Track sequence;
  Track actions;
  std::array<Track, kNumParts> parts;

  Track& part(PartId p) {
    return parts[index(p)];
  }
  const Track& part(PartId p) const {
    return parts[index(p)];
  }
  double seconds() const {
    return numFrames / fps;
  }

  friend bool operator==(const HierarchicalAnnotation&, const HierarchicalAnnotation&) = default;
};

enum class Rule { kOverlap, kGap, kOutOfRange, kEmptyLabel, kBadSequenceSpan };

std::string_view ruleName(Rule rule);

struct Violation {
  std::string track;  // "sequence", "actions", or a part key; "header" for T/fps
  int segment = 0;
  Rule rule = Rule::kGap;
  std::string message;
};

// Empty result means the annotation is valid.
std::vector<Violation> validateAnnotation(const HierarchicalAnnotation& ann);

inline bool isValid(const HierarchicalAnnotation& ann) {
  return validateAnnotation(ann).empty();
}

// Inserts UNKNOWN segments into the gaps of a sorted, non-overlapping track.
// Throws Error(kOverlap) naming the offending pair, or Error(kTimeOutOfRange).
Track fillTrackGaps(const Track& raw, int numFrames, std::string_view trackName = "track");

// Normalizes every action/part track to a contiguous partition of [0, T);
// an empty sequence track becomes a single UNKNOWN segment.
HierarchicalAnnotation fillUnknownGaps(HierarchicalAnnotation raw);

// Segment of a contiguous track covering the frame, or nullptr.
const TimedLabel* segmentAt(const Track& track, int frame);

inline constexpr std::size_t kActionColumn = kNumParts;
inline constexpr std::size_t kGridColumns = kNumParts + 1;

// Per-frame labels: columns are the seven parts in PartId order, then action.
struct FrameGrid {
  int numFrames = 0;
  Label sequence;
  std::vector<Label> cells;  // numFrames * kGridColumns

  const Label& at(int frame, std::size_t column) const {
    return cells[static_cast<std::size_t>(frame) * kGridColumns + column];
  }
};

// Throws Error(kInvalidAnnotation) unless validateAnnotation passes.
FrameGrid toFrameGrid(const HierarchicalAnnotation& ann);

// Run-length encodes one grid column back into segments.
Track runLengthColumn(const FrameGrid& grid, std::size_t column);
HierarchicalAnnotation annotationFromGrid(const FrameGrid& grid, std::string id, double fps);

}  // namespace partmotion::annotation
