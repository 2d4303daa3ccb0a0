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

#include "incodec/intra.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace incodec {

namespace {

// Angle per mode 2..34 in 1/32 sample units.
constexpr std::array<int, 33> kIntraPredAngle = {
    32, 26, 21, 17, 13, 9, 5, 2, 0, -2, -5, -9, -13, -17, -21, -26, -32,
    -26, -21, -17, -13, -9, -5, -2, 0, 2, 5, 9, 13, 17, 21, 26, 32};

// 256 * 32 / angle for the negative angles of modes 11..25.
constexpr std::array<int, 15> kInvAngle = {-4096, -1638, -910, -630, -482, -390, -315, -256,
                                           -315,  -390,  -482, -630, -910, -1638, -4096};

int log2_size(int n) {
  if (n < 4 || n > 64 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw ContractViolation("block size must be a power of two in [4, 64], got " +
                            std::to_string(n));
  return std::countr_zero(static_cast<unsigned>(n));
}

}  // namespace

RefArray gather_references(const Plane& recon, int x0, int y0, int n) {
  log2_size(n);
  if (x0 % n || y0 % n || x0 < 0 || y0 < 0 || x0 + n > recon.width || y0 + n > recon.height)
    throw ContractViolation("gather_references: block (" + std::to_string(x0) + "," +
                            std::to_string(y0) + ") is not on the block grid of the plane");
  RefArray r;
  r.size = n;
  r.above.assign(2 * n + 1, 0);
  r.left.assign(2 * n, 0);
  r.left_available = x0 > 0;
  r.above_available = y0 > 0;
  r.corner_available = x0 > 0 && y0 > 0;
  r.above_right_available = y0 > 0 && x0 + n < recon.width;
  r.below_left_available = false;  // the block below-left comes later in raster order

  // Scan order: left[2N-1] .. left[0], corner, above[1] .. above[2N].
  const int total = 4 * n + 1;
  std::vector<int> value(total);
  std::vector<bool> avail(total);
  for (int i = 0; i < 2 * n; ++i) {
    const int k = 2 * n - 1 - i;  // left index
    const bool ok = k < n ? r.left_available : r.below_left_available;
    avail[i] = ok;
    if (ok) value[i] = recon.at(x0 - 1, y0 + k);
  }
  avail[2 * n] = r.corner_available;
  if (r.corner_available) value[2 * n] = recon.at(x0 - 1, y0 - 1);
  for (int k = 1; k <= 2 * n; ++k) {
    const bool ok = k <= n ? r.above_available : r.above_right_available;
    avail[2 * n + k] = ok;
    if (ok) value[2 * n + k] = recon.at(x0 + k - 1, y0 - 1);
  }

  const auto first = std::find(avail.begin(), avail.end(), true);
  if (first == avail.end()) {
    std::fill(value.begin(), value.end(), 128);
  } else {
    if (!avail[0]) value[0] = value[first - avail.begin()];
    for (int i = 1; i < total; ++i)
      if (!avail[i]) value[i] = value[i - 1];
  }

  for (int i = 0; i < 2 * n; ++i) r.left[2 * n - 1 - i] = value[i];
  for (int k = 0; k <= 2 * n; ++k) r.above[k] = value[2 * n + k];
  return r;
}

Plane predict_intra(const RefArray& refs, int mode, int n) {
  const int log2n = log2_size(n);
  if (mode < 0 || mode >= kNumClassicalModes)
    throw ContractViolation("predict_intra: invalid mode " + std::to_string(mode));
  if (refs.size != n || refs.above.size() != static_cast<std::size_t>(2 * n + 1) ||
      refs.left.size() != static_cast<std::size_t>(2 * n))
    throw ContractViolation("predict_intra: reference array does not match block size");

  Plane pred(n, n);
  if (mode == kPlanarMode) {
    const int top_right = refs.above[n + 1];
    const int bottom_left = refs.left[n];
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        pred.at(x, y) = static_cast<std::uint8_t>(
            ((n - 1 - x) * refs.left[y] + (x + 1) * top_right + (n - 1 - y) * refs.above[x + 1] +
             (y + 1) * bottom_left + n) >>
            (log2n + 1));
    return pred;
  }
  if (mode == kDcMode) {
    int sum = n;
    for (int i = 0; i < n; ++i) sum += refs.above[i + 1] + refs.left[i];
    std::fill(pred.samples.begin(), pred.samples.end(), static_cast<std::uint8_t>(sum >> (log2n + 1)));
    return pred;
  }

  const bool vertical = mode >= 18;
  const int angle = kIntraPredAngle[mode - 2];
  // main_ref[off + i] holds ref[i] for i in [-n, 2n].
  const int off = n;
  std::vector<int> main_ref(3 * n + 1);
  const std::vector<int>& side = vertical ? refs.left : refs.above;
  for (int i = 0; i <= 2 * n; ++i)
    main_ref[off + i] = vertical ? refs.above[i] : (i == 0 ? refs.corner() : refs.left[i - 1]);
  if (angle < 0) {
    const int inv = kInvAngle[mode - 11];
    const int last = (n * angle) >> 5;
    for (int i = last; i <= -1; ++i) {
      const int proj = (i * inv + 128) >> 8;
      // Vertical: p[-1][-1 + proj] = left[proj - 1]; horizontal: p[-1 + proj][-1] = above[proj].
      main_ref[off + i] = vertical ? side[proj - 1] : side[proj];
    }
  }

  for (int j = 0; j < n; ++j) {  // j: row for vertical modes, column for horizontal
    const int pos = (j + 1) * angle;
    const int idx = pos >> 5;
    const int fact = pos & 31;
    for (int i = 0; i < n; ++i) {
      const int a = main_ref[off + i + idx + 1];
      const int v = fact ? ((32 - fact) * a + fact * main_ref[off + i + idx + 2] + 16) >> 5 : a;
      if (vertical)
        pred.at(i, j) = static_cast<std::uint8_t>(v);
      else
        pred.at(j, i) = static_cast<std::uint8_t>(v);
    }
  }
  return pred;
}

std::vector<float> gather_context(const Plane& recon, int x0, int y0, int n, int k,
                                  const RefArray& refs) {
  if (k < 1 || refs.size != n) throw ContractViolation("gather_context: invalid arguments");
  std::vector<float> ctx;
  ctx.reserve(static_cast<std::size_t>(fc_context_length(n, k)));
  auto push = [&](int v) { ctx.push_back(static_cast<float>(v) / 255.0f); };
  const bool above_ok = y0 >= k && refs.above_available;
  const bool corner_ok = above_ok && x0 >= k && refs.corner_available;
  const bool left_ok = x0 >= k && refs.left_available;
  for (int r = 0; r < k; ++r) {
    const int y = y0 - k + r;
    for (int c = 0; c < n + k; ++c) {
      const int x = x0 - k + c;
      if (x < x0)
        push(corner_ok ? recon.at(x, y) : refs.corner());
      else
        push(above_ok ? recon.at(x, y) : refs.above[1 + (x - x0)]);
    }
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < k; ++c) push(left_ok ? recon.at(x0 - k + c, y0 + r) : refs.left[r]);
  return ctx;
}

Plane predict_neural(std::span<const float> context, const NetworkGraph& graph,
                     const WeightStore& model, int n) {
  if (graph.spatial() || graph.output_channels() != n * n)
    throw ContractViolation("predict_neural: graph " + graph.arch_tag() +
                            " does not predict a " + std::to_string(n) + "x" + std::to_string(n) +
                            " block");
  if (context.size() != static_cast<std::size_t>(graph.input_channels()))
    throw ContractViolation("predict_neural: context length " + std::to_string(context.size()) +
                            " does not match graph input " +
                            std::to_string(graph.input_channels()));
  Tensor in(Shape3{graph.input_channels(), 1, 1},
            std::vector<float>(context.begin(), context.end()));
  const Tensor out = forward(graph, model, in);
  Plane pred(n, n);
  for (int i = 0; i < n * n; ++i) {
    const float v = std::round(out.data()[i] * 255.0f);
    pred.samples[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0f, 255.0f));
  }
  return pred;
}

}  // namespace incodec
