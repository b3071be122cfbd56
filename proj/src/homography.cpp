#include "camchain/homography.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace camchain {

namespace {

constexpr double kSmallPivot = 1e-8;        // gauge switch for canonical scale
constexpr double kInfinityGuard = 1e-12;    // |w| below this is "at infinity"
constexpr double kCollinearArea = 1e-9;     // on Hartley-normalized points

struct Normalization {
  Eigen::Matrix3d t;
  std::vector<Eigen::Vector2d> points;
};

Normalization hartley_normalize(const CorrespondenceSet& c, bool second) {
  const std::size_t n = c.pairs.size();
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const PointPair& p : c.pairs) centroid += second ? p.b : p.a;
  centroid /= static_cast<double>(n);

  double mean_dist = 0.0;
  for (const PointPair& p : c.pairs) mean_dist += ((second ? p.b : p.a) - centroid).norm();
  mean_dist /= static_cast<double>(n);
  if (!(mean_dist > 0.0))
    throw Error(ErrorCode::degenerate_configuration, "coincident points");

  const double s = std::sqrt(2.0) / mean_dist;
  Normalization out;
  out.t << s, 0.0, -s * centroid.x(), 0.0, s, -s * centroid.y(), 0.0, 0.0, 1.0;
  out.points.reserve(n);
  for (const PointPair& p : c.pairs)
    out.points.push_back(((second ? p.b : p.a) - centroid) * s);
  return out;
}

bool has_collinear_triple(const std::vector<Eigen::Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector2d u = pts[j] - pts[i];
        Eigen::Vector2d v = pts[k] - pts[i];
        if (0.5 * std::abs(u.x() * v.y() - u.y() * v.x()) < kCollinearArea) return true;
      }
  return false;
}

// Error terms shared by the public metric and the RANSAC scorer; the
// inverse is hoisted out of the per-pair loop there.
bool transfer_error_squared(const Eigen::Matrix3d& h, const Eigen::Matrix3d& h_inv,
                            const PointPair& pair, double* out) {
  Eigen::Vector3d f = h * pair.a.homogeneous();
  Eigen::Vector3d r = h_inv * pair.b.homogeneous();
  if (std::abs(f.z()) < kInfinityGuard || std::abs(r.z()) < kInfinityGuard) return false;
  double e = (f.hnormalized() - pair.b).squaredNorm() + (r.hnormalized() - pair.a).squaredNorm();
  if (!std::isfinite(e)) return false;
  *out = e;
  return true;
}

int count_inliers(const Eigen::Matrix3d& h, const Eigen::Matrix3d& h_inv,
                  const CorrespondenceSet& c, double threshold, std::vector<bool>* mask) {
  int count = 0;
  const double t2 = threshold * threshold;
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    double e2 = 0.0;
    bool ok = transfer_error_squared(h, h_inv, c.pairs[i], &e2) && e2 < t2;
    (*mask)[i] = ok;
    if (ok) ++count;
  }
  return count;
}

std::array<int, 4> sample_distinct_4(std::mt19937_64& rng, int n) {
  std::array<int, 4> idx{};
  for (int k = 0; k < 4; ++k) {
    int v;
    bool fresh;
    do {
      v = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      fresh = true;
      for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != v;
    } while (!fresh);
    idx[k] = v;
  }
  return idx;
}

Homography scale_conjugate(const Homography& h, double sx, double sy, CoordinateSpace space) {
  // diag(sx, sy, 1) * m * diag(1/sx, 1/sy, 1)
  const double s[3] = {sx, sy, 1.0};
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = h.m(i, j) * s[i] / s[j];
  return Homography{out, space}.canonical();
}

}  // namespace

Homography Homography::identity(CoordinateSpace space) {
  return Homography{Eigen::Matrix3d::Identity(), space};
}

Homography Homography::canonical() const {
  Eigen::Matrix3d r = m;
  const double pivot = r(2, 2);
  if (std::abs(pivot) > kSmallPivot) {
    if (pivot != 1.0) {
      r /= pivot;
      r(2, 2) = 1.0;
    }
  } else {
    const double n = r.norm();
    if (!(n > 0.0))
      throw Error(ErrorCode::numerical_failure, "cannot canonicalize the zero matrix");
    // Skipping rescale when the norm is already 1 (to rounding) makes a
    // second canonicalization the exact identity.
    if (std::abs(n - 1.0) > 1e-12) r /= n;
    double extreme = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (std::abs(r(i, j)) > std::abs(extreme)) extreme = r(i, j);
    if (extreme < 0.0) r = -r;
  }
  return {r, space};
}

Homography Homography::inverse() const {
  const double det = m.determinant();
  if (!std::isfinite(det) || det == 0.0)
    throw Error(ErrorCode::singular_homography, "matrix is not invertible");
  Eigen::Matrix3d inv = m.inverse();
  if (!inv.allFinite())
    throw Error(ErrorCode::singular_homography, "inverse is not finite");
  return {inv, space};
}

Homography dlt_homography(const CorrespondenceSet& correspondences) {
  const std::size_t n = correspondences.pairs.size();
  if (n < 4)
    throw Error(ErrorCode::degenerate_configuration, "need at least 4 correspondences");

  Normalization src = hartley_normalize(correspondences, false);
  Normalization dst = hartley_normalize(correspondences, true);
  // Collinearity makes a 4-point system rank deficient; larger systems are
  // screened through the singular values below instead of all triples.
  if (n == 4 && (has_collinear_triple(src.points) || has_collinear_triple(dst.points)))
    throw Error(ErrorCode::degenerate_configuration, "3 of 4 points are collinear");

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = src.points[i].x(), y = src.points[i].y();
    const double u = dst.points[i].x(), v = dst.points[i].y();
    a.row(2 * i) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(7) <= 1e-12 * sv(0))
    throw Error(ErrorCode::degenerate_configuration, "solution is not unique");

  Eigen::VectorXd hv = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);

  Eigen::Matrix3d result = dst.t.inverse() * hn * src.t;
  if (!result.allFinite())
    throw Error(ErrorCode::numerical_failure, "non-finite result");
  Homography h = Homography{result, CoordinateSpace::pixel}.canonical();
  if (std::abs(h.m.determinant()) < 1e-12)
    throw Error(ErrorCode::numerical_failure, "estimated matrix is singular");
  return h;
}

double symmetric_transfer_error(const Homography& h, const PointPair& pair) {
  Eigen::Matrix3d inv = h.inverse().m;
  Eigen::Vector3d f = h.m * pair.a.homogeneous();
  Eigen::Vector3d r = inv * pair.b.homogeneous();
  if (std::abs(f.z()) < kInfinityGuard || std::abs(r.z()) < kInfinityGuard)
    throw Error(ErrorCode::point_at_infinity, "mapped point has |w| < 1e-12");
  return std::sqrt((f.hnormalized() - pair.b).squaredNorm() +
                   (r.hnormalized() - pair.a).squaredNorm());
}

RansacResult ransac_homography(const CorrespondenceSet& correspondences,
                               const RansacParams& params) {
  const int n = static_cast<int>(correspondences.pairs.size());
  if (n < 4)
    throw Error(ErrorCode::insufficient_matches, "need at least 4 correspondences");
  if (!(params.inlier_threshold > 0.0))
    throw Error(ErrorCode::invalid_argument, "inlier_threshold must be > 0");
  if (!(params.confidence > 0.0) || params.confidence >= 1.0)
    throw Error(ErrorCode::invalid_argument, "confidence must lie in (0, 1)");
  if (params.max_iterations < 1)
    throw Error(ErrorCode::invalid_argument, "max_iterations must be >= 1");

  std::mt19937_64 rng(params.seed);
  Homography best_h;
  std::vector<bool> mask(n, false), best_mask(n, false);
  int best_count = 0;
  int cap = params.max_iterations;

  for (int iter = 0; iter < cap; ++iter) {
    std::array<int, 4> idx = sample_distinct_4(rng, n);
    CorrespondenceSet minimal;
    minimal.pairs = {correspondences.pairs[idx[0]], correspondences.pairs[idx[1]],
                     correspondences.pairs[idx[2]], correspondences.pairs[idx[3]]};
    Homography candidate;
    try {
      candidate = dlt_homography(minimal);
    } catch (const Error&) {
      continue;  // degenerate sample, the iteration still counts
    }
    Eigen::Matrix3d inv;
    {
      double det = candidate.m.determinant();
      if (det == 0.0) continue;
      inv = candidate.m.inverse();
      if (!inv.allFinite()) continue;
    }
    int count = count_inliers(candidate.m, inv, correspondences, params.inlier_threshold, &mask);
    if (count > best_count) {
      best_count = count;
      best_h = candidate;
      best_mask = mask;
      // Adaptive bound: iterations needed to hit an all-inlier sample with
      // the requested confidence, given the observed inlier ratio.
      const double ratio = static_cast<double>(count) / n;
      const double p_sample = std::pow(ratio, 4.0);
      if (p_sample >= 1.0) {
        cap = iter + 1;
      } else {
        const double denom = std::log1p(-p_sample);
        if (denom < 0.0) {
          double bound = std::ceil(std::log1p(-params.confidence) / denom);
          cap = static_cast<int>(
              std::min<double>(params.max_iterations, std::max<double>(iter + 1, bound)));
        }
      }
    }
  }

  if (best_count < kMinConsensus)
    throw Error(ErrorCode::no_consensus,
                "best consensus " + std::to_string(best_count) + " < " +
                    std::to_string(kMinConsensus));

  CorrespondenceSet consensus;
  for (int i = 0; i < n; ++i)
    if (best_mask[i]) consensus.pairs.push_back(correspondences.pairs[i]);
  Homography final_h = best_h;
  try {
    final_h = dlt_homography(consensus);
  } catch (const Error&) {
    final_h = best_h;  // the minimal-sample model is already acceptable
  }

  RansacResult result;
  result.h = final_h.canonical();
  result.inlier_mask.assign(n, false);
  result.inlier_count = count_inliers(result.h.m, result.h.inverse().m, correspondences,
                                      params.inlier_threshold, &result.inlier_mask);
  return result;
}

const char* to_string(PairStatus status) {
  switch (status) {
    case PairStatus::ok: return "ok";
    case PairStatus::insufficient_matches: return "insufficient_matches";
    case PairStatus::no_consensus: return "no_consensus";
  }
  return "unknown";
}

std::optional<PairStatus> pair_status_from_string(std::string_view text) {
  if (text == "ok") return PairStatus::ok;
  if (text == "insufficient_matches") return PairStatus::insufficient_matches;
  if (text == "no_consensus") return PairStatus::no_consensus;
  return std::nullopt;
}

FrameFeatures compute_features(const Frame& frame) {
  LumaFrame luma = to_luma(frame);
  FrameFeatures f;
  f.keypoints = detect_corners(luma);
  f.descriptors = describe(luma, f.keypoints);
  return f;
}

PairResult estimate_pair_from_features(const FrameFeatures& a, const FrameFeatures& b,
                                       int width, int height, const RansacParams& params) {
  PairResult result;
  if (a.descriptors.empty() || b.descriptors.empty()) {
    result.status = PairStatus::insufficient_matches;
    return result;
  }
  std::vector<Match> matches = match_descriptors(a.descriptors, b.descriptors);
  result.match_count = static_cast<int>(matches.size());
  if (result.match_count < 4) {
    result.status = PairStatus::insufficient_matches;
    return result;
  }

  CorrespondenceSet set;
  set.pairs.reserve(matches.size());
  for (const Match& m : matches) {
    const Keypoint& ka = a.keypoints[m.index_a];
    const Keypoint& kb = b.keypoints[m.index_b];
    set.pairs.push_back({Eigen::Vector2d(ka.x, ka.y), Eigen::Vector2d(kb.x, kb.y)});
  }

  try {
    RansacResult rr = ransac_homography(set, params);
    result.status = PairStatus::ok;
    result.inlier_count = rr.inlier_count;
    result.h = to_normalized(rr.h, width, height);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) throw;
    result.status = (e.code() == ErrorCode::insufficient_matches)
                        ? PairStatus::insufficient_matches
                        : PairStatus::no_consensus;
  }
  return result;
}

PairResult estimate_pair_homography(const Frame& a, const Frame& b, const RansacParams& params) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorCode::mixed_dimensions, "frames must share one resolution");
  return estimate_pair_from_features(compute_features(a), compute_features(b), a.width(),
                                     a.height(), params);
}

Homography to_normalized(const Homography& pixel_h, int width, int height) {
  return scale_conjugate(pixel_h, 1.0 / width, 1.0 / height, CoordinateSpace::normalized);
}

Homography to_pixel(const Homography& normalized_h, int width, int height) {
  return scale_conjugate(normalized_h, static_cast<double>(width),
                         static_cast<double>(height), CoordinateSpace::pixel);
}

}  // namespace camchain
