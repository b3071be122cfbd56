#pragma once

#include <optional>
#include <string>
#include <vector>

#include "camchain/homography.hpp"

namespace camchain {

/// Motion between frames i and i+1 (1-based); the matrix maps frame-i
/// normalized coordinates into frame-(i+1) normalized coordinates.
struct PairEntry {
  int index = 0;
  PairStatus status = PairStatus::insufficient_matches;
  std::optional<Homography> h;  // present iff status == ok
  int inlier_count = 0;         // -1 marks synthetic ground truth
  int match_count = 0;
};

/// Frame-to-frame motion of a whole sequence: exactly frame_count - 1
/// entries, failed pairs kept in place so indexing never shifts.
struct MotionChain {
  std::vector<PairEntry> pairs;
  int source_width = 0;
  int source_height = 0;
  int frame_count = 0;
};

/// Runs the pair estimator over consecutive frames; per-frame features are
/// computed once. Sequences shorter than 2 frames are rejected.
MotionChain extract_motion_chain(const FrameSequence& sequence, const RansacParams& params);

/// Product H_{j-1} * ... * H_i mapping frame i into frame j (1 <= i <= j <= N),
/// identity when i == j. Any failed entry in between raises GapInChain.
Homography compose(const MotionChain& chain, int i, int j);

enum class MotionKind { none, translation, zoom, rotation, mixed };

const char* to_string(MotionKind kind);

struct ClassifyThresholds {
  double translation = 0.005;               // normalized units
  double scale = 0.01;                      // |s - 1|
  double rotation = 0.5 * 3.14159265358979323846 / 180.0;  // radians
  double dominance = 2.0;                   // top vs runner-up, threshold-relative
};

struct MotionLabel {
  MotionKind kind = MotionKind::none;
  double translation = 0.0;  // displacement of the image center, normalized
  double scale = 1.0;        // sqrt(|det A|) of the upper-left 2x2 block
  double rotation = 0.0;     // signed radians from the polar factor
};

/// Labels a normalized, canonical-scale homography. A component wins when it
/// exceeds its threshold and beats every other component by the dominance
/// factor in threshold-relative magnitude; several strong components yield
/// `mixed`, none strong yields `none`.
MotionLabel classify_motion(const Homography& h, const ClassifyThresholds& thresholds = {});

inline constexpr int kChainSchemaVersion = 1;

/// JSON interchange. Numbers survive a round-trip exactly; matrices are
/// stored row-major. Statuses serialize as strings.
std::string serialize_chain(const MotionChain& chain);
MotionChain parse_chain(const std::string& text);

}  // namespace camchain
