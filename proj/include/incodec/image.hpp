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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "incodec/error.hpp"

namespace incodec {

// 8-bit single-component picture, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  Plane() = default;
  Plane(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Plane&) const = default;
};

// YUV 4:2:0; chroma planes are ceil(w/2) x ceil(h/2).
struct Frame {
  Plane y, u, v;

  Frame() = default;
  Frame(int w, int h, std::uint8_t luma = 0, std::uint8_t chroma = 128);
  // Wraps a luma plane with neutral (128) chroma.
  static Frame from_luma(Plane y);

  int width() const { return y.width; }
  int height() const { return y.height; }
  Plane& plane(int c) { return c == 0 ? y : (c == 1 ? u : v); }
  const Plane& plane(int c) const { return c == 0 ? y : (c == 1 ? u : v); }
  bool operator==(const Frame&) const = default;
};

// Edge-replicate to multiples of `block`.
Plane pad_to_multiple(const Plane& p, int block);
Plane crop(const Plane& p, int width, int height);

Frame read_yuv420(const std::filesystem::path& path, int width, int height, int frame_index);
// Appends when `append` is set, otherwise truncates.
void write_yuv420(const std::filesystem::path& path, const Frame& frame, bool append = false);
std::size_t yuv420_frame_bytes(int width, int height);

Plane read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Plane& plane);
Plane parse_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> format_pgm(const Plane& plane);

}  // namespace incodec
