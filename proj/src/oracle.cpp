#include "camchain/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace camchain {

namespace {

// splitmix64 finalizer; the lattice is a pure function of its key.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, std::uint64_t channel, std::uint64_t octave, int ix, int iy) {
  std::uint64_t h = mix(seed ^ mix(channel ^ mix(octave)));
  h = mix(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) |
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy)) << 32)));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double value_noise(std::uint64_t seed, std::uint64_t channel, std::uint64_t octave, int cell,
                   int x, int y) {
  const int ix = x / cell;
  const int iy = y / cell;
  double u = static_cast<double>(x - ix * cell) / cell;
  double v = static_cast<double>(y - iy * cell) / cell;
  u = u * u * (3.0 - 2.0 * u);
  v = v * v * (3.0 - 2.0 * v);
  const double v00 = lattice(seed, channel, octave, ix, iy);
  const double v10 = lattice(seed, channel, octave, ix + 1, iy);
  const double v01 = lattice(seed, channel, octave, ix, iy + 1);
  const double v11 = lattice(seed, channel, octave, ix + 1, iy + 1);
  return (v00 * (1.0 - u) + v10 * u) * (1.0 - v) + (v01 * (1.0 - u) + v11 * u) * v;
}

struct Octave {
  int cell;
  double amplitude;
};

// The 3 px layer supplies most of the corner density; the coarse layers
// keep patches distinctive for matching.
constexpr Octave kOctaves[] = {{29, 0.34}, {13, 0.28}, {7, 0.22}, {3, 0.16}};

Eigen::Matrix3d translation_matrix(double dx, double dy) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = dx;
  m(1, 2) = dy;
  return m;
}

}  // namespace

Frame generate_texture(int width, int height, std::uint64_t seed) {
  if (width < 32 || height < 32)
    throw Error(ErrorCode::invalid_spec, "texture must be at least 32x32");

  Frame frame(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double base = 0.0;
      for (std::uint64_t o = 0; o < 4; ++o)
        base += kOctaves[o].amplitude * value_noise(seed, 0, o, kOctaves[o].cell, x, y);
      std::uint8_t rgb[3];
      for (std::uint64_t c = 0; c < 3; ++c) {
        // Small per-channel tint; brightness contrast stays with `base`.
        double tint = 0.12 * (value_noise(seed, 1 + c, 0, 31, x, y) - 0.5);
        double v = std::clamp(base + tint, 0.0, 1.0);
        rgb[c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
      frame.set(x, y, rgb[0], rgb[1], rgb[2]);
    }
  }
  return frame;
}

Eigen::Matrix3d oracle_step_matrix(const OracleSpec& spec, int step_index) {
  switch (spec.motion) {
    case OracleMotion::pan:
      return translation_matrix(spec.dx, spec.dy);
    case OracleMotion::zoom: {
      Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
      m(0, 0) = m(1, 1) = spec.scale;
      m(0, 2) = m(1, 2) = 0.5 * (1.0 - spec.scale);  // fixed point (0.5, 0.5)
      return m;
    }
    case OracleMotion::rotate: {
      // A screen-space rotation about the pixel center, expressed in
      // normalized coordinates (conjugation by the axis scaling).
      Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
      const double c = std::cos(spec.angle), s = std::sin(spec.angle);
      r(0, 0) = c;
      r(0, 1) = -s;
      r(1, 0) = s;
      r(1, 1) = c;
      Eigen::Matrix3d center = translation_matrix(0.5 * spec.width, 0.5 * spec.height);
      Eigen::Matrix3d pixel = center * r * center.inverse();
      Eigen::Matrix3d d = Eigen::Vector3d(1.0 / spec.width, 1.0 / spec.height, 1.0).asDiagonal();
      return d * pixel * d.inverse();
    }
    case OracleMotion::script:
      if (step_index < 0 || step_index >= static_cast<int>(spec.script.size()))
        throw Error(ErrorCode::invalid_spec, "script index out of range");
      return spec.script[step_index];
  }
  throw Error(ErrorCode::invalid_spec, "unknown motion kind");
}

OracleResult generate_sequence(const OracleSpec& spec) {
  if (spec.frame_count < 2)
    throw Error(ErrorCode::invalid_spec, "sequence needs at least 2 frames");
  if (spec.motion == OracleMotion::zoom && !(spec.scale > 0.0 && std::isfinite(spec.scale)))
    throw Error(ErrorCode::invalid_spec, "zoom scale must be positive and finite");
  if (spec.motion == OracleMotion::script &&
      static_cast<int>(spec.script.size()) != spec.frame_count - 1)
    throw Error(ErrorCode::invalid_spec, "script must hold frame_count - 1 matrices");

  Frame texture = generate_texture(spec.width, spec.height, spec.texture_seed);

  MotionChain chain;
  chain.source_width = spec.width;
  chain.source_height = spec.height;
  chain.frame_count = spec.frame_count;

  std::vector<Frame> frames;
  frames.reserve(spec.frame_count);
  frames.push_back(texture);

  Eigen::Matrix3d cumulative = Eigen::Matrix3d::Identity();
  for (int step = 0; step < spec.frame_count - 1; ++step) {
    Eigen::Matrix3d m = oracle_step_matrix(spec, step);
    if (!m.allFinite() || std::abs(m.determinant()) < 1e-12)
      throw Error(ErrorCode::invalid_spec, "step matrix must be finite and invertible");
    cumulative = m * cumulative;
    Homography h{cumulative, CoordinateSpace::normalized};
    frames.push_back(warp_frame(texture, h.canonical(), spec.width, spec.height).frame);
    chain.pairs.push_back({step + 1, PairStatus::ok,
                           Homography{m, CoordinateSpace::normalized}.canonical(), -1, -1});
  }
  return OracleResult{FrameSequence(std::move(frames)), std::move(chain)};
}

}  // namespace camchain
