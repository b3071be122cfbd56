#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "camchain/frame.hpp"

namespace camchain {

inline constexpr double kCornerThreshold = 0.08;  // brightness units
inline constexpr int kMaxKeypointsDefault = 1000;
inline constexpr double kMatchRatioDefault = 0.8;
inline constexpr int kFeatureBorder = 8;  // px kept clear of every keypoint

struct Keypoint {
  double x = 0.0;  // pixel-center coordinates, origin top-left
  double y = 0.0;
  double response = 0.0;
};

/// 256 comparison bits packed little-endian into four words.
struct Descriptor {
  std::array<std::uint64_t, 4> bits{};

  bool operator==(const Descriptor&) const = default;
};

int hamming_distance(const Descriptor& a, const Descriptor& b);

struct Match {
  int index_a = 0;
  int index_b = 0;
  int distance = 0;
};

/// Segment-test corner detector: a pixel is a corner when 9 contiguous
/// pixels of its radius-3 circle are all brighter or all darker than the
/// center by more than `threshold`. Candidates within kFeatureBorder px of
/// the frame edge are discarded, survivors pass 3x3 non-maximum suppression
/// on the corner response, and the strongest `max_count` are returned in
/// descending response order. Frames smaller than 16x16 are rejected.
std::vector<Keypoint> detect_corners(const LumaFrame& frame, int max_count = kMaxKeypointsDefault,
                                     double threshold = kCornerThreshold);

/// Binary descriptor over the 15x15 patch around each keypoint: bit i is set
/// when intensity(p_i) < intensity(q_i) for the frozen sampling pattern.
/// Keypoints closer than kFeatureBorder px to the frame edge are rejected.
std::vector<Descriptor> describe(const LumaFrame& frame, const std::vector<Keypoint>& keypoints);

/// Nearest-neighbour matching with a ratio test (nearest must beat
/// ratio * second nearest, strictly) and a mutual-best cross check, so the
/// result is one-to-one. Index ties resolve to the smaller index.
std::vector<Match> match_descriptors(const std::vector<Descriptor>& a,
                                     const std::vector<Descriptor>& b,
                                     double ratio = kMatchRatioDefault);

}  // namespace camchain
