#include "camchain/camera_score.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace camchain {

CameraScoreReport camera_score(const MotionChain& reference, const MotionChain& generated,
                               const ScoreOptions& options) {
  if (reference.frame_count != generated.frame_count ||
      reference.pairs.size() != generated.pairs.size())
    throw Error(ErrorCode::length_mismatch,
                "chains cover " + std::to_string(reference.frame_count) + " vs " +
                    std::to_string(generated.frame_count) + " frames");

  const int n = reference.frame_count;
  CameraScoreReport report;
  report.per_pair.reserve(reference.pairs.size());

  double sum = 0.0;
  for (std::size_t k = 0; k < reference.pairs.size(); ++k) {
    const PairEntry& r = reference.pairs[k];
    const PairEntry& g = generated.pairs[k];
    PairDistance pd;
    pd.index = r.index;
    pd.ref_status = r.status;
    pd.gen_status = g.status;
    if (r.status == PairStatus::ok && g.status == PairStatus::ok) {
      pd.distance = (r.h->m - g.h->m).squaredNorm();
      sum += *pd.distance;
      ++report.compared_pairs;
    }
    report.per_pair.push_back(pd);
  }

  report.score = sum / n;
  report.coverage =
      (n > 1) ? static_cast<double>(report.compared_pairs) / (n - 1) : 0.0;
  report.mean_over_pairs = report.compared_pairs > 0 ? sum / report.compared_pairs : 0.0;
  if (report.coverage < kMinCoverage && !options.allow_low_coverage)
    throw Error(ErrorCode::low_coverage,
                "only " + std::to_string(report.compared_pairs) + " of " +
                    std::to_string(n - 1) + " pairs comparable");
  return report;
}

MotionChain resample_chain(const MotionChain& chain, int target_frame_count) {
  if (target_frame_count < 2)
    throw Error(ErrorCode::invalid_argument, "target frame count must be >= 2");
  const int source_pairs = chain.frame_count - 1;
  const int target_pairs = target_frame_count - 1;

  MotionChain out;
  out.source_width = chain.source_width;
  out.source_height = chain.source_height;
  out.frame_count = target_frame_count;
  out.pairs.reserve(target_pairs);
  for (int i = 1; i <= target_pairs; ++i) {
    const double fraction = static_cast<double>(i) / target_pairs;
    int j = static_cast<int>(std::floor(fraction * source_pairs + 0.5));
    j = std::clamp(j, 1, source_pairs);
    PairEntry entry = chain.pairs[j - 1];
    entry.index = i;
    out.pairs.push_back(std::move(entry));
  }
  return out;
}

CameraScoreReport camera_score_videos(const FrameSequence& reference,
                                      const FrameSequence& generated,
                                      const RansacParams& params,
                                      const VideoScoreOptions& options) {
  if (reference.frame_count() != generated.frame_count() && !options.resample)
    throw Error(ErrorCode::length_mismatch,
                "sequences hold " + std::to_string(reference.frame_count()) + " vs " +
                    std::to_string(generated.frame_count()) +
                    " frames (resampling not requested)");

  MotionChain ref_chain = extract_motion_chain(reference, params);
  MotionChain gen_chain = extract_motion_chain(generated, params);
  if (gen_chain.frame_count != ref_chain.frame_count)
    gen_chain = resample_chain(gen_chain, ref_chain.frame_count);
  return camera_score(ref_chain, gen_chain, ScoreOptions{options.allow_low_coverage});
}

std::string report_to_json(const CameraScoreReport& report) {
  nlohmann::json root;
  root["score"] = report.score;
  root["mean_over_pairs"] = report.mean_over_pairs;
  root["compared_pairs"] = report.compared_pairs;
  root["coverage"] = report.coverage;
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairDistance& pd : report.per_pair) {
    nlohmann::json p;
    p["i"] = pd.index;
    if (pd.distance) {
      p["d"] = *pd.distance;
    } else {
      p["ref_status"] = to_string(pd.ref_status);
      p["gen_status"] = to_string(pd.gen_status);
    }
    pairs.push_back(std::move(p));
  }
  root["per_pair"] = std::move(pairs);
  return root.dump(2) + "\n";
}

}  // namespace camchain
