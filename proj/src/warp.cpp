#include "camchain/warp.hpp"

#include <cmath>

namespace camchain {

WarpResult warp_frame(const Frame& src, const Homography& h, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1)
    throw Error(ErrorCode::invalid_argument, "output dimensions must be >= 1");

  // Normalized chain entry -> pixel map between the two raster grids.
  Eigen::Matrix3d to_out = Eigen::Vector3d(out_width, out_height, 1.0).asDiagonal();
  Eigen::Matrix3d from_src =
      Eigen::Vector3d(1.0 / src.width(), 1.0 / src.height(), 1.0).asDiagonal();
  Eigen::Matrix3d pixel_map = to_out * h.m * from_src;

  const double det = pixel_map.determinant();
  if (!std::isfinite(det) || det == 0.0)
    throw Error(ErrorCode::singular_homography, "warp matrix is not invertible");
  Eigen::Matrix3d inv = pixel_map.inverse();
  if (!inv.allFinite())
    throw Error(ErrorCode::singular_homography, "warp matrix is not invertible");

  WarpResult result{Frame(out_width, out_height),
                    ValidityMask{out_width, out_height,
                                 std::vector<std::uint8_t>(
                                     static_cast<std::size_t>(out_width) * out_height, 0)}};
  const int sw = src.width();
  const int sh = src.height();
  const std::uint8_t* sp = src.pixels().data();
  std::uint8_t* op = result.frame.pixels().data();

  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      Eigen::Vector3d p = inv * Eigen::Vector3d(x + 0.5, y + 0.5, 1.0);
      if (std::abs(p.z()) < 1e-12) continue;  // stays black, mask false
      const double sx = p.x() / p.z() - 0.5;  // pixel-index space
      const double sy = p.y() / p.z() - 0.5;
      if (!std::isfinite(sx) || !std::isfinite(sy)) continue;

      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double ax = sx - fx0;
      const double ay = sy - fy0;

      // The (x0, y0) tap always carries weight; the +1 taps only matter for
      // fractional offsets, so exact integer samples stay valid at the far
      // edges of the source.
      const bool need_x1 = ax > 0.0;
      const bool need_y1 = ay > 0.0;
      if (x0 < 0 || y0 < 0) continue;
      if ((need_x1 ? x0 + 1 : x0) > sw - 1) continue;
      if ((need_y1 ? y0 + 1 : y0) > sh - 1) continue;

      const double w00 = (1.0 - ax) * (1.0 - ay);
      const double w10 = ax * (1.0 - ay);
      const double w01 = (1.0 - ax) * ay;
      const double w11 = ax * ay;

      std::size_t out_base = (static_cast<std::size_t>(y) * out_width + x) * 3;
      for (int c = 0; c < 3; ++c) {
        double acc = w00 * sp[(static_cast<std::size_t>(y0) * sw + x0) * 3 + c];
        if (need_x1) acc += w10 * sp[(static_cast<std::size_t>(y0) * sw + x0 + 1) * 3 + c];
        if (need_y1) acc += w01 * sp[((static_cast<std::size_t>(y0) + 1) * sw + x0) * 3 + c];
        if (need_x1 && need_y1)
          acc += w11 * sp[((static_cast<std::size_t>(y0) + 1) * sw + x0 + 1) * 3 + c];
        long v = std::lround(acc);
        op[out_base + c] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
      }
      result.mask.bits[static_cast<std::size_t>(y) * out_width + x] = 1;
    }
  }
  return result;
}

SynthesisResult synthesize_pseudo_video(const Frame& image, const MotionChain& chain,
                                        const SynthesisOptions& options) {
  SynthesisResult result;
  result.frames.reserve(chain.frame_count);
  result.masks.reserve(chain.frame_count);

  result.frames.push_back(image);
  result.masks.push_back(ValidityMask{
      image.width(), image.height(),
      std::vector<std::uint8_t>(static_cast<std::size_t>(image.width()) * image.height(), 1)});

  Eigen::Matrix3d cumulative = Eigen::Matrix3d::Identity();
  for (const PairEntry& entry : chain.pairs) {
    if (entry.status == PairStatus::ok && entry.h) {
      cumulative = entry.h->m * cumulative;
    } else if (options.skip_gaps) {
      result.substituted_pairs.push_back(entry.index);  // identity step
    } else {
      throw Error(ErrorCode::gap_in_chain,
                  "pair " + std::to_string(entry.index) + " is " + to_string(entry.status));
    }
    Homography step{cumulative, CoordinateSpace::normalized};
    WarpResult warped = warp_frame(image, step.canonical(), image.width(), image.height());
    result.frames.push_back(std::move(warped.frame));
    result.masks.push_back(std::move(warped.mask));
  }
  return result;
}

}  // namespace camchain
