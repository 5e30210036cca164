#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/motion/skeleton.hpp"

// Small constructors shared by the unit and acceptance tests.
namespace testutil {

using partmotion::annotation::HierarchicalAnnotation;
using partmotion::annotation::Label;
using partmotion::annotation::TimedLabel;
using partmotion::annotation::Track;

inline TimedLabel seg(const std::string& label, int start, int end) {
  return {label == "unknown" ? Label::unknown() : Label(label), start, end};
}

inline Track track(std::initializer_list<TimedLabel> segs) {
  return Track(segs);
}

// Sequence over [0, T), the given actions, and UNKNOWN everywhere else.
inline HierarchicalAnnotation simpleAnnotation(int T, const std::string& sequence, Track actions) {
  HierarchicalAnnotation a;
  a.id = "test";
  a.numFrames = T;
  a.fps = 20.0;
  a.sequence = {seg(sequence, 0, T)};
  a.actions = std::move(actions);
  for (auto& p : a.parts) {
    p = {seg("unknown", 0, T)};
  }
  return a;
}

// Random contiguous partition of [0, T) into 1..maxSegs segments with labels
// drawn from the vocabulary ("unknown" allowed).
inline Track randomPartition(int T, int maxSegs, const std::vector<std::string>& vocab, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, std::max(1, std::min(maxSegs, T)));
  const int n = count(rng);
  std::vector<int> cuts;
  std::uniform_int_distribution<int> pos(1, T - 1);
  while (static_cast<int>(cuts.size()) < n - 1) {
    const int c = pos(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) {
      cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(T);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  Track t;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    t.push_back(seg(vocab[pick(rng)], cuts[i], cuts[i + 1]));
  }
  return t;
}

inline HierarchicalAnnotation randomAnnotation(std::mt19937_64& rng, const std::string& id = "rand") {
  static const std::vector<std::string> vocab = {"walk", "wave", "raise left arm", "turn", "nod", "unknown",
                                                 "bend forward", "step", "crouch down"};
  std::uniform_int_distribution<int> len(2, 200);
  HierarchicalAnnotation a;
  a.id = id;
  a.numFrames = len(rng);
  a.fps = 20.0;
  a.sequence = {seg("a person moves", 0, a.numFrames)};
  a.actions = randomPartition(a.numFrames, 4, vocab, rng);
  for (auto& p : a.parts) {
    p = randomPartition(a.numFrames, 5, vocab, rng);
  }
  return a;
}

// A three-joint chain: root, child at +X, grandchild at +X.
inline partmotion::motion::Skeleton chainSkeleton() {
  using namespace partmotion;
  motion::Skeleton s;
  s.name = "chain";
  s.jointNames = {"root", "a", "b"};
  s.parents = {-1, 0, 1};
  s.offsets = {motion::Vec3::Zero(), motion::Vec3(1, 0, 0), motion::Vec3(1, 0, 0)};
  s.partOf = {annotation::PartId::kSpine, annotation::PartId::kHead, annotation::PartId::kHead};
  return s;
}

}  // namespace testutil
