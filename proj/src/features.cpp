#include "camchain/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "camchain/sampling_pattern.hpp"

namespace camchain {

namespace {

// Radius-3 circle, clockwise from the top pixel.
constexpr int kCircle[16][2] = {
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},   {3, 1},   {2, 2},   {1, 3},
    {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0},  {-3, -1}, {-2, -2}, {-1, -3}};

// Largest threshold at which some 9-long contiguous arc is entirely
// brighter (or entirely darker) than the center.
double corner_response(const double* diff) {
  double best = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < 16; ++start) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k) {
      double d = diff[(start + k) & 15];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    best = std::max(best, lo);    // all-brighter arc margin
    best = std::max(best, -hi);   // all-darker arc margin
  }
  return best;
}

struct Candidate {
  int x, y;
  double response;
};

}  // namespace

int hamming_distance(const Descriptor& a, const Descriptor& b) {
  int d = 0;
  for (int w = 0; w < 4; ++w) d += std::popcount(a.bits[w] ^ b.bits[w]);
  return d;
}

std::vector<Keypoint> detect_corners(const LumaFrame& frame, int max_count, double threshold) {
  if (max_count < 1)
    throw Error(ErrorCode::invalid_argument, "max_count must be >= 1");
  if (!(threshold > 0.0))
    throw Error(ErrorCode::invalid_argument, "threshold must be > 0");
  const int w = frame.width();
  const int h = frame.height();
  if (w < 16 || h < 16)
    throw Error(ErrorCode::frame_too_small, "corner detection needs at least 16x16");

  const double* v = frame.values().data();
  std::vector<double> response(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<Candidate> candidates;

  const int x_end = w - kFeatureBorder;  // exclusive
  const int y_end = h - kFeatureBorder;
  for (int y = kFeatureBorder; y < y_end; ++y) {
    for (int x = kFeatureBorder; x < x_end; ++x) {
      const double c = v[static_cast<std::size_t>(y) * w + x];
      // Compass pre-test: a 9-long arc always covers two of the four
      // compass pixels, so fewer than two extreme ones cannot be a corner.
      int bright = 0, dark = 0;
      for (int k = 0; k < 16; k += 4) {
        double d = v[static_cast<std::size_t>(y + kCircle[k][1]) * w + (x + kCircle[k][0])] - c;
        if (d > threshold) ++bright;
        if (d < -threshold) ++dark;
      }
      if (bright < 2 && dark < 2) continue;

      double diff[16];
      for (int k = 0; k < 16; ++k)
        diff[k] = v[static_cast<std::size_t>(y + kCircle[k][1]) * w + (x + kCircle[k][0])] - c;
      double score = corner_response(diff);
      if (score > threshold) {
        response[static_cast<std::size_t>(y) * w + x] = score;
        candidates.push_back({x, y, score});
      }
    }
  }

  // 3x3 non-maximum suppression. Ties keep the earlier pixel in scan order
  // so plateaus still yield exactly one keypoint.
  std::vector<Keypoint> kept;
  for (const Candidate& cand : candidates) {
    bool maximal = true;
    for (int dy = -1; dy <= 1 && maximal; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        double r = response[static_cast<std::size_t>(cand.y + dy) * w + (cand.x + dx)];
        if (r > cand.response ||
            (r == cand.response && (dy < 0 || (dy == 0 && dx < 0)))) {
          maximal = false;
          break;
        }
      }
    }
    if (maximal)
      kept.push_back({cand.x + 0.5, cand.y + 0.5, cand.response});
  }

  std::sort(kept.begin(), kept.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (static_cast<int>(kept.size()) > max_count) kept.resize(max_count);
  return kept;
}

std::vector<Descriptor> describe(const LumaFrame& frame, const std::vector<Keypoint>& keypoints) {
  const int w = frame.width();
  const int h = frame.height();
  const double* v = frame.values().data();

  std::vector<Descriptor> out;
  out.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints) {
    const int cx = static_cast<int>(std::floor(kp.x));
    const int cy = static_cast<int>(std::floor(kp.y));
    if (cx < kFeatureBorder || cy < kFeatureBorder || cx >= w - kFeatureBorder ||
        cy >= h - kFeatureBorder)
      throw Error(ErrorCode::keypoint_near_border,
                  "keypoint (" + std::to_string(kp.x) + ", " + std::to_string(kp.y) +
                      ") too close to the frame edge");
    Descriptor d;
    for (int i = 0; i < 256; ++i) {
      const SamplingPair& s = kSamplingPattern[i];
      double p = v[static_cast<std::size_t>(cy + s.py) * w + (cx + s.px)];
      double q = v[static_cast<std::size_t>(cy + s.qy) * w + (cx + s.qx)];
      if (p < q) d.bits[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    out.push_back(d);
  }
  return out;
}

std::vector<Match> match_descriptors(const std::vector<Descriptor>& a,
                                     const std::vector<Descriptor>& b, double ratio) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::empty_input, "cannot match empty descriptor lists");
  if (!(ratio > 0.0) || ratio >= 1.0)
    throw Error(ErrorCode::invalid_argument, "ratio must lie in (0, 1)");

  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  struct Best {
    int dist = std::numeric_limits<int>::max();
    int index = -1;
  };
  std::vector<Best> best_for_b(nb);  // nearest a for each b, for the cross check

  std::vector<Match> matches;
  for (int i = 0; i < na; ++i) {
    int d1 = std::numeric_limits<int>::max(), j1 = -1;
    int d2 = std::numeric_limits<int>::max();
    for (int j = 0; j < nb; ++j) {
      int d = hamming_distance(a[i], b[j]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        j1 = j;
      } else if (d < d2) {
        d2 = d;
      }
      Best& bb = best_for_b[j];
      if (d < bb.dist) {
        bb.dist = d;
        bb.index = i;
      }
    }
    // With a single candidate there is no second neighbour to test against.
    double second = (nb > 1) ? static_cast<double>(d2)
                             : std::numeric_limits<double>::infinity();
    if (static_cast<double>(d1) < ratio * second)
      matches.push_back({i, j1, d1});
  }

  std::vector<Match> mutual;
  for (const Match& m : matches)
    if (best_for_b[m.index_b].index == m.index_a) mutual.push_back(m);
  return mutual;
}

}  // namespace camchain
