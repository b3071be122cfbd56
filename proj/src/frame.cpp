#include "camchain/frame.hpp"

namespace camchain {

Frame::Frame(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::invalid_argument, "frame dimensions must be >= 1");
  pixels_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::invalid_argument, "frame dimensions must be >= 1");
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(ErrorCode::invalid_argument, "pixel buffer length != 3*w*h");
}

LumaFrame::LumaFrame(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::invalid_argument, "frame dimensions must be >= 1");
  values_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

LumaFrame to_luma(const Frame& frame) {
  LumaFrame out(frame.width(), frame.height());
  const std::uint8_t* p = frame.pixels().data();
  double* y = out.values().data();
  std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  for (std::size_t i = 0; i < n; ++i) {
    // Integer numerator keeps grayscale inputs exact: 1000*v/255000 == v/255.
    y[i] = (299.0 * p[3 * i] + 587.0 * p[3 * i + 1] + 114.0 * p[3 * i + 2]) / 255000.0;
  }
  return out;
}

FrameSequence::FrameSequence(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.empty())
    throw Error(ErrorCode::invalid_argument, "sequence needs at least one frame");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (frames_[i].width() != frames_[0].width() || frames_[i].height() != frames_[0].height())
      throw Error(ErrorCode::mixed_dimensions,
                  "frame " + std::to_string(i + 1) + " differs in size from frame 1");
  }
}

}  // namespace camchain
