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

namespace incodec {

// Orthonormal separable DCT-II (inverse: DCT-III) on an n x n row-major block.
std::vector<double> dct2d(std::span<const double> block, int n, bool inverse);

struct QuantParams {
  int qp = 0;
  double qstep = 1.0;

  // qstep = 2^((qp - 4) / 6); qp must lie in [0, 51].
  static QuantParams from_qp(int qp);
};

// level = round(coef / qstep), halves away from zero.
std::vector<int> quantize(std::span<const double> coefs, const QuantParams& q);
std::vector<double> dequantize(std::span<const int> levels, const QuantParams& q);

// scan[i] = raster index of the i-th coefficient in zigzag order.
const std::vector<int>& zigzag_scan(int n);

std::vector<int> to_zigzag(std::span<const int> raster, int n);
std::vector<int> from_zigzag(std::span<const int> scanned, int n);

}  // namespace incodec
