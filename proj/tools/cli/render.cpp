#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "partmotion/common/error.hpp"

namespace partmotion::cli {

namespace {

constexpr std::uint8_t kPartColors[annotation::kNumParts][3] = {
    {200, 60, 60},  {40, 110, 220}, {40, 170, 90}, {90, 90, 90},
    {120, 60, 200}, {230, 140, 20}, {0, 0, 0},
};
constexpr std::uint8_t kFloor[3] = {200, 200, 200};

struct Projection {
  motion::Vec3 right;
  motion::Vec3 up;
  double minU = 0, maxU = 0, minV = 0, maxV = 0;

  Projection(double azDeg, double elDeg) {
    const double az = azDeg * std::numbers::pi / 180.0;
    const double el = elDeg * std::numbers::pi / 180.0;
    right = motion::Vec3(-std::sin(az), std::cos(az), 0.0);
    up = motion::Vec3(-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el));
  }
  double u(const motion::Vec3& p) const {
    return p.dot(right);
  }
  double v(const motion::Vec3& p) const {
    return p.dot(up);
  }
};

void drawDisc(Image& img, int cx, int cy, int radius, const std::uint8_t* color) {
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) {
        img.set(cx + dx, cy + dy, color);
      }
    }
  }
}

void drawLine(Image& img, int x0, int y0, int x1, int y1, const std::uint8_t* color, int radius) {
  // Bresenham with a round brush.
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    drawDisc(img, x0, y0, radius, color);
    if (x0 == x1 && y0 == y1) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

const motion::Pose& poseAt(const motion::MotionSequence& m, std::size_t frame) {
  return m.frames[std::min(frame, m.frames.size() - 1)];
}

}  // namespace

void Image::set(int x, int y, const std::uint8_t* color) {
  if (x < 0 || y < 0 || x >= width || y >= height) {
    return;
  }
  auto* px = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
  px[0] = color[0];
  px[1] = color[1];
  px[2] = color[2];
}

void writePpm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write image", path.string());
  }
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

Image renderFrame(const motion::Skeleton& skel, const std::vector<const motion::MotionSequence*>& motions,
                  std::size_t frame, const RenderOptions& options) {
  Projection proj(options.azimuthDeg, options.elevationDeg);

  // Each panel is centered on its own motion's extent; the scale is shared.
  struct Extent {
    double minU = 1e300, maxU = -1e300, minV = 1e300, maxV = -1e300;
  };
  std::vector<Extent> extents(motions.size());
  double span = 1e-6;
  for (std::size_t k = 0; k < motions.size(); ++k) {
    auto& e = extents[k];
    for (const auto& pose : motions[k]->frames) {
      for (const auto& p : motion::forwardKinematics(skel, pose)) {
        motion::Vec3 ground = p;
        ground.z() = 0.0;
        for (const auto& q : {p, ground}) {
          e.minU = std::min(e.minU, proj.u(q));
          e.maxU = std::max(e.maxU, proj.u(q));
          e.minV = std::min(e.minV, proj.v(q));
          e.maxV = std::max(e.maxV, proj.v(q));
        }
      }
    }
    span = std::max({span, e.maxU - e.minU, e.maxV - e.minV});
  }
  const double scale = 0.85 * std::min(options.width, options.height) / span;

  Image img(options.width * static_cast<int>(motions.size()), options.height);
  for (std::size_t k = 0; k < motions.size(); ++k) {
    const auto& e = extents[k];
    const double cu = 0.5 * (e.minU + e.maxU), cv = 0.5 * (e.minV + e.maxV);
    const int ox = static_cast<int>(k) * options.width;
    auto toPixel = [&](const motion::Vec3& p) {
      const int x = ox + static_cast<int>(std::lround(options.width / 2.0 + (proj.u(p) - cu) * scale));
      const int y = static_cast<int>(std::lround(options.height / 2.0 - (proj.v(p) - cv) * scale));
      return std::pair{x, y};
    };

    const auto joints = motion::forwardKinematics(skel, poseAt(*motions[k], frame));
    motion::Vec3 shadow = joints[0];
    shadow.z() = 0.0;
    const auto [sx, sy] = toPixel(shadow);
    drawDisc(img, sx, sy, 4, kFloor);

    for (std::size_t j = 1; j < joints.size(); ++j) {
      const auto [x0, y0] = toPixel(joints[static_cast<std::size_t>(skel.parents[j])]);
      const auto [x1, y1] = toPixel(joints[j]);
      drawLine(img, x0, y0, x1, y1, kPartColors[annotation::index(skel.partOf[j])], 1);
    }
    for (const auto& p : joints) {
      const auto [x, y] = toPixel(p);
      drawDisc(img, x, y, 2, kPartColors[annotation::kNumParts - 1]);
    }
  }
  return img;
}

std::size_t renderSequence(const motion::Skeleton& skel, const std::vector<const motion::MotionSequence*>& motions,
                           const std::filesystem::path& dir, const RenderOptions& options) {
  if (options.stride < 1) {
    throw Error(ErrorCode::kConfig, "render stride must be positive");
  }
  std::size_t frames = 0;
  for (const auto* m : motions) {
    if (m->frames.empty()) {
      throw Error(ErrorCode::kFormat, "cannot render an empty motion");
    }
    frames = std::max(frames, m->frames.size());
  }
  std::filesystem::create_directories(dir);
  std::size_t written = 0;
  for (std::size_t t = 0; t < frames; t += static_cast<std::size_t>(options.stride)) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.ppm", t);
    writePpm(dir / name, renderFrame(skel, motions, t, options));
    ++written;
  }
  return written;
}

}  // namespace partmotion::cli
