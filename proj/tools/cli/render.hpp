#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "partmotion/motion/skeleton.hpp"

namespace partmotion::cli {

struct RenderOptions {
  int width = 320;   // per panel
  int height = 320;
  double azimuthDeg = 45.0;
  double elevationDeg = 20.0;
  int stride = 1;  // render every stride-th frame
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 255) {}
  void set(int x, int y, const std::uint8_t* color);
};

void writePpm(const std::filesystem::path& path, const Image& image);

// Orthographic stick figures, one panel per motion, side by side. All panels
// share one scale; frames past the end of a shorter motion repeat its last pose.
Image renderFrame(const motion::Skeleton& skel, const std::vector<const motion::MotionSequence*>& motions,
                  std::size_t frame, const RenderOptions& options);

// Writes frame_00000.ppm, ... into dir and returns the number of images.
std::size_t renderSequence(const motion::Skeleton& skel, const std::vector<const motion::MotionSequence*>& motions,
                           const std::filesystem::path& dir, const RenderOptions& options);

}  // namespace partmotion::cli
