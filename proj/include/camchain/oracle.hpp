#pragma once

#include <cstdint>
#include <vector>

#include "camchain/motion_chain.hpp"
#include "camchain/warp.hpp"

namespace camchain {

enum class OracleMotion { pan, zoom, rotate, script };

/// Recipe for a synthetic sequence with known frame-to-frame motion.
/// pan offsets are normalized units per step, zoom is the per-step scale
/// ratio about the image center, rotate is radians per step about the image
/// center (applied in pixel space, so it is a true rotation on screen).
/// script supplies one normalized matrix per step directly.
struct OracleSpec {
  int width = 256;
  int height = 256;
  int frame_count = 16;
  std::uint64_t texture_seed = 1;
  OracleMotion motion = OracleMotion::pan;
  double dx = 0.0;
  double dy = 0.0;
  double scale = 1.0;
  double angle = 0.0;
  std::vector<Eigen::Matrix3d> script;  // frame_count - 1 entries
};

/// Layered value-noise test card, identical bytes for identical arguments.
/// Dense in corners: well over 200 detections on a 256x256 card at the
/// default detector threshold. Minimum size 32x32.
Frame generate_texture(int width, int height, std::uint64_t seed);

struct OracleResult {
  FrameSequence frames;
  MotionChain ground_truth;  // inliers/matches carry the sentinel -1
};

/// Warps the texture by cumulative powers of the per-step motion. Frame 1 is
/// the texture itself; the ground-truth chain holds the per-step matrices.
OracleResult generate_sequence(const OracleSpec& spec);

/// The normalized per-step matrix an OracleSpec describes (for script
/// motions, entry `step_index`, 0-based).
Eigen::Matrix3d oracle_step_matrix(const OracleSpec& spec, int step_index = 0);

}  // namespace camchain
