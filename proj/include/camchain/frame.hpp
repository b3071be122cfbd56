#pragma once

#include <cstdint>
#include <vector>

#include "camchain/error.hpp"

namespace camchain {

/// Interleaved 8-bit RGB image, row-major, origin at the top-left corner.
///
/// Continuous image coordinates put pixel (i, j) on the square
/// [i, i+1) x [j, j+1), so its center sits at (i + 0.5, j + 0.5).
/// Every geometric routine in the library uses this convention.
class Frame {
 public:
  Frame(int width, int height);
  Frame(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  std::uint8_t at(int x, int y, int channel) const {
    return pixels_[static_cast<std::size_t>(y * width_ + x) * 3 + channel];
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t base = static_cast<std::size_t>(y * width_ + x) * 3;
    pixels_[base] = r;
    pixels_[base + 1] = g;
    pixels_[base + 2] = b;
  }

  bool operator==(const Frame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Single-channel brightness image, one value in [0, 1] per pixel.
class LumaFrame {
 public:
  LumaFrame(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  void set(int x, int y, double v) {
    values_[static_cast<std::size_t>(y) * width_ + x] = v;
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Rec.601 brightness: (0.299 R + 0.587 G + 0.114 B) / 255, one rounding.
LumaFrame to_luma(const Frame& frame);

/// Ordered list of frames sharing one resolution.
class FrameSequence {
 public:
  explicit FrameSequence(std::vector<Frame> frames);

  int frame_count() const { return static_cast<int>(frames_.size()); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }

  /// 0-based access; command-line output and serialized chains are 1-based.
  const Frame& frame(int index) const { return frames_[index]; }
  const std::vector<Frame>& frames() const { return frames_; }

 private:
  std::vector<Frame> frames_;
};

}  // namespace camchain
