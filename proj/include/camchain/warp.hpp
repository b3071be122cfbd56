#pragma once

#include <vector>

#include "camchain/motion_chain.hpp"

namespace camchain {

/// Per-pixel validity: 1 where the warp sampled entirely inside the source
/// image, 0 where the output was filled with black.
struct ValidityMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

struct WarpResult {
  Frame frame;
  ValidityMask mask;
};

/// Resamples `src` under a normalized-coordinate homography mapping source
/// to output. Each output pixel center (x+0.5, y+0.5) is pulled back through
/// the inverse and sampled bilinearly; samples touching anything outside the
/// source produce black and a false mask bit.
WarpResult warp_frame(const Frame& src, const Homography& h, int out_width, int out_height);

struct SynthesisOptions {
  bool skip_gaps = false;  // substitute identity for failed pairs
};

struct SynthesisResult {
  std::vector<Frame> frames;
  std::vector<ValidityMask> masks;
  std::vector<int> substituted_pairs;  // only populated with skip_gaps
};

/// Re-enacts a motion chain on a still image: frame 1 is the image itself,
/// frame i+1 warps the image by the composition of entries 1..i. Every frame
/// keeps the still image's resolution; the chain may come from any source
/// resolution since entries are normalized.
SynthesisResult synthesize_pseudo_video(const Frame& image, const MotionChain& chain,
                                        const SynthesisOptions& options = {});

}  // namespace camchain
