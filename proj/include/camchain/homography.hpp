#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "camchain/error.hpp"
#include "camchain/features.hpp"
#include "camchain/frame.hpp"

namespace camchain {

enum class CoordinateSpace { pixel, normalized };

/// Plane projective transform. Canonical scale fixes the gauge freedom:
/// the matrix is divided by m(2,2) when that entry is meaningfully nonzero,
/// otherwise scaled to unit Frobenius norm with the largest-magnitude entry
/// positive. Canonicalization is idempotent.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  CoordinateSpace space = CoordinateSpace::pixel;

  static Homography identity(CoordinateSpace space);

  Homography canonical() const;
  Homography inverse() const;  // SingularHomography when det == 0
};

struct PointPair {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

struct CorrespondenceSet {
  std::vector<PointPair> pairs;
};

struct RansacParams {
  double inlier_threshold = 3.0;  // px, symmetric transfer error
  double confidence = 0.995;
  int max_iterations = 2000;
  std::uint64_t seed = 1;
};

/// Consensus below this count is treated as estimation failure.
inline constexpr int kMinConsensus = 8;

/// Direct linear transform with Hartley normalization (centroid to the
/// origin, mean distance sqrt(2)); least squares via SVD, result canonical.
Homography dlt_homography(const CorrespondenceSet& correspondences);

/// sqrt(|H a - b|^2 + |H^-1 b - a|^2) after projective division.
/// PointAtInfinity when either mapped point has |w| < 1e-12.
double symmetric_transfer_error(const Homography& h, const PointPair& pair);

struct RansacResult {
  Homography h;
  std::vector<bool> inlier_mask;  // under the refit model
  int inlier_count = 0;
};

/// Robust estimation from 4-point minimal samples with an adaptive
/// iteration bound, refit on the best consensus set. Deterministic for a
/// fixed seed.
RansacResult ransac_homography(const CorrespondenceSet& correspondences,
                               const RansacParams& params);

enum class PairStatus { ok, insufficient_matches, no_consensus };

const char* to_string(PairStatus status);
std::optional<PairStatus> pair_status_from_string(std::string_view text);

struct PairResult {
  PairStatus status = PairStatus::insufficient_matches;
  std::optional<Homography> h;  // normalized coordinates, canonical scale
  int inlier_count = 0;
  int match_count = 0;
};

struct FrameFeatures {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
};

FrameFeatures compute_features(const Frame& frame);

PairResult estimate_pair_from_features(const FrameFeatures& a, const FrameFeatures& b,
                                       int width, int height, const RansacParams& params);

/// Feature pipeline between two equally sized frames; failures are reported
/// in the status rather than thrown.
PairResult estimate_pair_homography(const Frame& a, const Frame& b, const RansacParams& params);

/// Conjugation by diag(1/w, 1/h, 1) in either direction; both return the
/// canonical representative. Normalized coordinates make chains comparable
/// across resolutions.
Homography to_normalized(const Homography& pixel_h, int width, int height);
Homography to_pixel(const Homography& normalized_h, int width, int height);

}  // namespace camchain
