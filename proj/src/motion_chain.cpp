#include "camchain/motion_chain.hpp"

#include <cmath>

#include "json.hpp"

namespace camchain {

MotionChain extract_motion_chain(const FrameSequence& sequence, const RansacParams& params) {
  if (sequence.frame_count() < 2)
    throw Error(ErrorCode::too_few_frames, "motion extraction needs at least 2 frames");

  std::vector<FrameFeatures> features;
  features.reserve(sequence.frame_count());
  for (int i = 0; i < sequence.frame_count(); ++i)
    features.push_back(compute_features(sequence.frame(i)));

  MotionChain chain;
  chain.source_width = sequence.width();
  chain.source_height = sequence.height();
  chain.frame_count = sequence.frame_count();
  chain.pairs.reserve(sequence.frame_count() - 1);
  for (int i = 0; i + 1 < sequence.frame_count(); ++i) {
    PairResult r = estimate_pair_from_features(features[i], features[i + 1], sequence.width(),
                                               sequence.height(), params);
    chain.pairs.push_back({i + 1, r.status, r.h, r.inlier_count, r.match_count});
  }
  return chain;
}

Homography compose(const MotionChain& chain, int i, int j) {
  if (i < 1 || j < i || j > chain.frame_count)
    throw Error(ErrorCode::invalid_argument, "compose range must satisfy 1 <= i <= j <= N");
  Eigen::Matrix3d acc = Eigen::Matrix3d::Identity();
  for (int k = i; k < j; ++k) {
    const PairEntry& entry = chain.pairs[k - 1];
    if (entry.status != PairStatus::ok || !entry.h)
      throw Error(ErrorCode::gap_in_chain, "pair " + std::to_string(k) + " is " +
                                               to_string(entry.status));
    acc = entry.h->m * acc;  // left-multiply: entry k is applied after k-1
  }
  return Homography{acc, CoordinateSpace::normalized}.canonical();
}

const char* to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::none: return "none";
    case MotionKind::translation: return "translation";
    case MotionKind::zoom: return "zoom";
    case MotionKind::rotation: return "rotation";
    case MotionKind::mixed: return "mixed";
  }
  return "unknown";
}

MotionLabel classify_motion(const Homography& h, const ClassifyThresholds& thresholds) {
  if (!h.m.allFinite())
    throw Error(ErrorCode::non_finite_decomposition, "matrix has non-finite entries");

  const Eigen::Matrix2d a = h.m.topLeftCorner<2, 2>();
  const double det = a.determinant();
  if (!(std::abs(det) > 0.0))
    throw Error(ErrorCode::non_finite_decomposition, "2x2 block is singular");

  // Polar factor of A: the rotation closest to A in the Frobenius sense for
  // an orientation-preserving block.
  const double rotation = std::atan2(a(1, 0) - a(0, 1), a(0, 0) + a(1, 1));
  const double scale = std::sqrt(std::abs(det));

  // Translation is measured as the displacement of the image center, so
  // zooms and rotations about the center report zero translation even
  // though their third column is nonzero.
  Eigen::Vector3d center = h.m * Eigen::Vector3d(0.5, 0.5, 1.0);
  if (std::abs(center.z()) < 1e-12)
    throw Error(ErrorCode::non_finite_decomposition, "image center maps to infinity");
  const double tx = center.x() / center.z() - 0.5;
  const double ty = center.y() / center.z() - 0.5;

  MotionLabel label;
  label.translation = std::hypot(tx, ty);
  label.scale = scale;
  label.rotation = rotation;
  if (!std::isfinite(label.translation) || !std::isfinite(scale) || !std::isfinite(rotation))
    throw Error(ErrorCode::non_finite_decomposition, "decomposition is not finite");

  const double rt = label.translation / thresholds.translation;
  const double rs = std::abs(scale - 1.0) / thresholds.scale;
  const double rr = std::abs(rotation) / thresholds.rotation;

  // Deterministic priority on exact ties: translation, then zoom, rotation.
  struct Component {
    MotionKind kind;
    double ratio;
  };
  Component ranked[3] = {{MotionKind::translation, rt}, {MotionKind::zoom, rs},
                         {MotionKind::rotation, rr}};
  int top = 0;
  for (int i = 1; i < 3; ++i)
    if (ranked[i].ratio > ranked[top].ratio) top = i;
  double runner_up = 0.0;
  for (int i = 0; i < 3; ++i)
    if (i != top) runner_up = std::max(runner_up, ranked[i].ratio);

  if (ranked[top].ratio <= 1.0)
    label.kind = MotionKind::none;
  else if (ranked[top].ratio >= thresholds.dominance * runner_up)
    label.kind = ranked[top].kind;
  else
    label.kind = MotionKind::mixed;
  return label;
}

std::string serialize_chain(const MotionChain& chain) {
  nlohmann::json root;
  root["version"] = kChainSchemaVersion;
  root["frame_count"] = chain.frame_count;
  root["source_width"] = chain.source_width;
  root["source_height"] = chain.source_height;
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairEntry& entry : chain.pairs) {
    nlohmann::json p;
    p["i"] = entry.index;
    p["status"] = to_string(entry.status);
    p["inliers"] = entry.inlier_count;
    p["matches"] = entry.match_count;
    if (entry.status == PairStatus::ok) {
      nlohmann::json m = nlohmann::json::array();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m.push_back(entry.h->m(r, c));
      p["h"] = std::move(m);
    }
    pairs.push_back(std::move(p));
  }
  root["pairs"] = std::move(pairs);
  return root.dump(2) + "\n";
}

MotionChain parse_chain(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("malformed JSON: ") + e.what());
  }

  try {
    if (!root.is_object()) throw Error(ErrorCode::schema_violation, "top level must be an object");
    if (!root.contains("version") || !root["version"].is_number_integer())
      throw Error(ErrorCode::schema_violation, "missing integer 'version'");
    if (root["version"].get<int>() != kChainSchemaVersion)
      throw Error(ErrorCode::version_mismatch,
                  "unsupported chain version " + root["version"].dump());

    MotionChain chain;
    chain.frame_count = root.at("frame_count").get<int>();
    chain.source_width = root.at("source_width").get<int>();
    chain.source_height = root.at("source_height").get<int>();
    if (chain.frame_count < 2 || chain.source_width < 1 || chain.source_height < 1)
      throw Error(ErrorCode::schema_violation, "implausible header fields");

    const nlohmann::json& pairs = root.at("pairs");
    if (!pairs.is_array() ||
        static_cast<int>(pairs.size()) != chain.frame_count - 1)
      throw Error(ErrorCode::schema_violation, "pairs length must equal frame_count - 1");

    int expected_index = 1;
    for (const nlohmann::json& p : pairs) {
      PairEntry entry;
      entry.index = p.at("i").get<int>();
      if (entry.index != expected_index++)
        throw Error(ErrorCode::schema_violation, "pair indices must run 1..N-1 in order");
      auto status = pair_status_from_string(p.at("status").get<std::string>());
      if (!status)
        throw Error(ErrorCode::schema_violation, "unknown status " + p.at("status").dump());
      entry.status = *status;
      entry.inlier_count = p.at("inliers").get<int>();
      entry.match_count = p.at("matches").get<int>();
      if (entry.status == PairStatus::ok) {
        const nlohmann::json& m = p.at("h");
        if (!m.is_array() || m.size() != 9)
          throw Error(ErrorCode::schema_violation, "'h' must hold 9 numbers");
        Eigen::Matrix3d mat;
        for (int k = 0; k < 9; ++k) {
          if (!m[k].is_number())
            throw Error(ErrorCode::schema_violation, "'h' must hold 9 numbers");
          mat(k / 3, k % 3) = m[k].get<double>();
        }
        if (!mat.allFinite() || mat.determinant() == 0.0)
          throw Error(ErrorCode::schema_violation, "matrix must be finite and invertible");
        entry.h = Homography{mat, CoordinateSpace::normalized}.canonical();
      }
      chain.pairs.push_back(std::move(entry));
    }
    return chain;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("bad chain document: ") + e.what());
  }
}

}  // namespace camchain
