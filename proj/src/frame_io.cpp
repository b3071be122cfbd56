#include "camchain/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

namespace camchain {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed on " + path.string());
  return bytes;
}

// Advances past whitespace and '#' comments, then parses one decimal field.
int parse_header_int(const std::vector<std::uint8_t>& bytes, std::size_t& pos,
                     const std::filesystem::path& path) {
  while (pos < bytes.size()) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
    throw Error(ErrorCode::unsupported_format, "malformed header in " + path.string());
  long value = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1 << 26)
      throw Error(ErrorCode::unsupported_format, "header field out of range in " + path.string());
    ++pos;
  }
  return static_cast<int>(value);
}

}  // namespace

Frame load_frame(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::missing_path, path.string());
  if (path.extension() != ".ppm")
    throw Error(ErrorCode::unsupported_format,
                "only binary PPM input is supported: " + path.string());
  std::vector<std::uint8_t> bytes = read_all(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
    throw Error(ErrorCode::unsupported_format, "not a P6 file: " + path.string());
  std::size_t pos = 2;
  int width = parse_header_int(bytes, pos, path);
  int height = parse_header_int(bytes, pos, path);
  int maxval = parse_header_int(bytes, pos, path);
  if (width < 1 || height < 1)
    throw Error(ErrorCode::unsupported_format, "bad dimensions in " + path.string());
  if (maxval != 255)
    throw Error(ErrorCode::unsupported_format, "only maxval 255 is supported: " + path.string());
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw Error(ErrorCode::unsupported_format, "missing data separator in " + path.string());
  ++pos;  // exactly one whitespace byte before the raster
  std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - pos < need)
    throw Error(ErrorCode::unsupported_format, "truncated pixel data in " + path.string());
  return Frame(width, height,
               std::vector<std::uint8_t>(bytes.begin() + pos, bytes.begin() + pos + need));
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot create " + path.string());
  out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels().data()),
            static_cast<std::streamsize>(frame.pixels().size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed on " + path.string());
}

FrameSequence load_sequence(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::missing_path, path.string());

  if (std::filesystem::is_regular_file(path)) {
    std::vector<Frame> frames;
    frames.push_back(load_frame(path));
    return FrameSequence(std::move(frames));
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm")
      files.push_back(entry.path());
  }
  if (files.empty())
    throw Error(ErrorCode::missing_path, "no .ppm files under " + path.string());
  std::sort(files.begin(), files.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });

  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& file : files) {
    Frame f = load_frame(file);
    if (!frames.empty() &&
        (f.width() != frames[0].width() || f.height() != frames[0].height()))
      throw Error(ErrorCode::mixed_dimensions, file.string());
    frames.push_back(std::move(f));
  }
  return FrameSequence(std::move(frames));
}

void save_sequence(const FrameSequence& sequence, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec || !std::filesystem::is_directory(directory))
    throw Error(ErrorCode::io_failure, "cannot create directory " + directory.string());
  for (int i = 0; i < sequence.frame_count(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.ppm", i + 1);
    save_frame(sequence.frame(i), directory / name);
  }
}

void save_pgm(int width, int height, const std::vector<std::uint8_t>& gray,
              const std::filesystem::path& path) {
  if (gray.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::invalid_argument, "gray buffer length != w*h");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot create " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()),
            static_cast<std::streamsize>(gray.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed on " + path.string());
}

}  // namespace camchain
