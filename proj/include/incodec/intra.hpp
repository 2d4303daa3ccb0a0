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

#include <span>
#include <vector>

#include "incodec/graph.hpp"
#include "incodec/image.hpp"

namespace incodec {

inline constexpr int kPlanarMode = 0;
inline constexpr int kDcMode = 1;
inline constexpr int kHorizontalMode = 10;
inline constexpr int kVerticalMode = 26;
inline constexpr int kNumClassicalModes = 35;
// Index used for the neural mode in mode decisions and statistics.
inline constexpr int kNeuralMode = 35;

// Reference samples around an N x N block, after substitution.
struct RefArray {
  int size = 0;
  std::vector<int> above;  // 2N+1: [0] corner, [1..N] above, [N+1..2N] above-right
  std::vector<int> left;   // 2N: [0..N) left, [N..2N) below-left
  bool corner_available = false;
  bool above_available = false;
  bool above_right_available = false;
  bool left_available = false;
  bool below_left_available = false;

  int corner() const { return above[0]; }
};

// Collects references for the block at (x0, y0) from `recon`, treating
// every block earlier in raster order as reconstructed. Missing segments are
// filled by nearest-available substitution from below-left to above-right,
// or with 128 when nothing is available.
RefArray gather_references(const Plane& recon, int x0, int y0, int block_size);

// Planar (0), DC (1) and angular (2..34) prediction with 1/32-pel
// interpolation; no reference smoothing and no boundary filters.
Plane predict_intra(const RefArray& refs, int mode, int block_size);

// L-shaped causal context of width K: K rows over the (N+K)-wide strip above
// the block (including the above-left corner), then K columns left of the
// block, row-major, normalized to [0,1]. Unavailable samples take the
// matching substituted reference.
std::vector<float> gather_context(const Plane& recon, int x0, int y0, int block_size,
                                  int context_width, const RefArray& refs);

// Fully-connected prediction, de-normalized, rounded half away from zero and
// clamped to [0, 255].
Plane predict_neural(std::span<const float> context, const NetworkGraph& graph,
                     const WeightStore& model, int block_size);

}  // namespace incodec
