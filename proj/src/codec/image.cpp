// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "incodec/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace incodec {

Plane::Plane(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ContractViolation("plane dimensions must be positive");
  samples.assign(static_cast<std::size_t>(w) * h, fill);
}

Frame::Frame(int w, int h, std::uint8_t luma, std::uint8_t chroma)
    : y(w, h, luma), u((w + 1) / 2, (h + 1) / 2, chroma), v((w + 1) / 2, (h + 1) / 2, chroma) {}

Frame Frame::from_luma(Plane luma) {
  Frame f(luma.width, luma.height);
  f.y = std::move(luma);
  return f;
}

Plane pad_to_multiple(const Plane& p, int block) {
  const int w = (p.width + block - 1) / block * block;
  const int h = (p.height + block - 1) / block * block;
  if (w == p.width && h == p.height) return p;
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = p.at(std::min(x, p.width - 1), std::min(y, p.height - 1));
  return out;
}

Plane crop(const Plane& p, int width, int height) {
  if (width > p.width || height > p.height) throw ContractViolation("crop larger than plane");
  Plane out(width, height);
  for (int y = 0; y < height; ++y)
    std::copy_n(p.samples.begin() + static_cast<std::size_t>(y) * p.width, width,
                out.samples.begin() + static_cast<std::size_t>(y) * width);
  return out;
}

std::size_t yuv420_frame_bytes(int width, int height) {
  const std::size_t cw = (width + 1) / 2, ch = (height + 1) / 2;
  return static_cast<std::size_t>(width) * height + 2 * cw * ch;
}

Frame read_yuv420(const std::filesystem::path& path, int width, int height, int frame_index) {
  if (width <= 0 || height <= 0 || frame_index < 0)
    throw ContractViolation("read_yuv420: invalid dimensions or frame index");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  is.seekg(0, std::ios::end);
  const std::size_t actual = static_cast<std::size_t>(is.tellg());
  const std::size_t frame_bytes = yuv420_frame_bytes(width, height);
  const std::size_t expected = frame_bytes * (frame_index + 1);
  if (actual < expected)
    throw IoError(path.string() + ": file too short for frame " + std::to_string(frame_index) +
                  " (expected at least " + std::to_string(expected) + " bytes, got " +
                  std::to_string(actual) + ")");
  is.seekg(static_cast<std::streamoff>(frame_bytes * frame_index));
  Frame f(width, height);
  for (int c = 0; c < 3; ++c) {
    Plane& p = f.plane(c);
    is.read(reinterpret_cast<char*>(p.samples.data()), static_cast<std::streamsize>(p.samples.size()));
  }
  if (!is) throw IoError("failed reading " + path.string());
  return f;
}

void write_yuv420(const std::filesystem::path& path, const Frame& frame, bool append) {
  std::ofstream os(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!os) throw IoError("cannot write " + path.string());
  for (int c = 0; c < 3; ++c) {
    const Plane& p = frame.plane(c);
    os.write(reinterpret_cast<const char*>(p.samples.data()),
             static_cast<std::streamsize>(p.samples.size()));
  }
  if (!os) throw IoError("failed writing " + path.string());
}

Plane parse_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* field) {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      throw IoError(std::string("PGM header: missing ") + field);
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 20) throw IoError(std::string("PGM header: ") + field + " too large");
    }
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw IoError("PGM header: expected binary P5 magic");
  pos = 2;
  const int w = number("width");
  const int h = number("height");
  const int maxval = number("maxval");
  if (maxval != 255) throw IoError("PGM maxval must be 255, got " + std::to_string(maxval));
  if (w <= 0 || h <= 0) throw IoError("PGM dimensions must be positive");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw IoError("PGM header: truncated");
  ++pos;  // single whitespace before raster
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos < need)
    throw IoError("PGM raster too short (expected " + std::to_string(need) + " bytes, got " +
                  std::to_string(bytes.size() - pos) + ")");
  Plane p(w, h);
  std::copy_n(bytes.begin() + pos, need, p.samples.begin());
  return p;
}

std::vector<std::uint8_t> format_pgm(const Plane& plane) {
  const std::string header =
      "P5\n" + std::to_string(plane.width) + " " + std::to_string(plane.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), plane.samples.begin(), plane.samples.end());
  return out;
}

Plane read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                        std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, const Plane& plane) {
  const auto bytes = format_pgm(plane);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace incodec
