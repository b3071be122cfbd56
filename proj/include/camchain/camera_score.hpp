#pragma once

#include <optional>
#include <string>

#include "camchain/motion_chain.hpp"

namespace camchain {

/// Pairs where either chain failed carry no distance and are excluded from
/// the sum; their statuses are kept for the report.
struct PairDistance {
  int index = 0;
  std::optional<double> distance;  // squared Frobenius, canonical matrices
  PairStatus ref_status = PairStatus::ok;
  PairStatus gen_status = PairStatus::ok;
};

struct CameraScoreReport {
  double score = 0.0;           // (1/N) * sum of per-pair squared distances
  double mean_over_pairs = 0.0; // sum / compared_pairs, 0 when nothing compared
  int compared_pairs = 0;
  double coverage = 0.0;        // compared_pairs / (N - 1)
  std::vector<PairDistance> per_pair;
};

inline constexpr double kMinCoverage = 0.8;

struct ScoreOptions {
  bool allow_low_coverage = false;
};

/// Camera-motion agreement of two chains over the same frame count: the sum
/// of squared Frobenius distances between corresponding canonical-scale
/// normalized matrices, divided by the frame count N. Lower is better; zero
/// means every compared pair is identical. Coverage below kMinCoverage is an
/// error unless explicitly allowed.
CameraScoreReport camera_score(const MotionChain& reference, const MotionChain& generated,
                               const ScoreOptions& options = {});

struct VideoScoreOptions {
  bool allow_low_coverage = false;
  bool resample = false;  // map generated pairs onto the reference pair count
};

/// Extracts both chains and scores them. Frame counts must match unless
/// resampling is requested.
CameraScoreReport camera_score_videos(const FrameSequence& reference,
                                      const FrameSequence& generated,
                                      const RansacParams& params,
                                      const VideoScoreOptions& options = {});

/// Nearest-fraction pair resampling: target pair i picks the source pair
/// whose fractional position j/(M-1) is closest to i/(N-1).
MotionChain resample_chain(const MotionChain& chain, int target_frame_count);

std::string report_to_json(const CameraScoreReport& report);

}  // namespace camchain
