#pragma once

#include <filesystem>
#include <vector>

#include "camchain/frame.hpp"

namespace camchain {

/// Reads one binary PPM (P6, maxval 255) image.
Frame load_frame(const std::filesystem::path& path);

/// Writes a binary PPM (P6, maxval 255) image. Round-trips are bit-exact.
void save_frame(const Frame& frame, const std::filesystem::path& path);

/// Loads a sequence from either a single image file or a directory of
/// .ppm files ordered by filename (zero-padded numeric names sort correctly).
FrameSequence load_sequence(const std::filesystem::path& path);

/// Writes frames as frame_0001.ppm .. frame_NNNN.ppm, creating the
/// directory when needed.
void save_sequence(const FrameSequence& sequence, const std::filesystem::path& directory);

/// Writes a binary PGM (P5, maxval 255) image; used for validity masks.
void save_pgm(int width, int height, const std::vector<std::uint8_t>& gray,
              const std::filesystem::path& path);

}  // namespace camchain
