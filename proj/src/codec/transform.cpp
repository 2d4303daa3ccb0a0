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

#include "incodec/transform.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "incodec/error.hpp"

namespace incodec {

namespace {

// basis[k * n + i] = c_k cos(pi (2i + 1) k / 2n)
const std::vector<double>& dct_basis(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> b(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i)
      b[k * n + i] = scale * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  }
  return cache.emplace(n, std::move(b)).first->second;
}

}  // namespace

std::vector<double> dct2d(std::span<const double> block, int n, bool inverse) {
  if (n <= 0 || block.size() != static_cast<std::size_t>(n) * n)
    throw ContractViolation("dct2d: block of " + std::to_string(block.size()) +
                            " samples is not " + std::to_string(n) + "x" + std::to_string(n));
  const std::vector<double>& b = dct_basis(n);
  std::vector<double> tmp(block.size(), 0.0), out(block.size(), 0.0);
  // Rows, then columns. Forward: X = B x B^T; inverse: x = B^T X B.
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += (inverse ? b[i * n + k] : b[k * n + i]) * block[r * n + i];
      tmp[r * n + k] = s;
    }
  for (int c = 0; c < n; ++c)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += (inverse ? b[i * n + k] : b[k * n + i]) * tmp[i * n + c];
      out[k * n + c] = s;
    }
  return out;
}

QuantParams QuantParams::from_qp(int qp) {
  if (qp < 0 || qp > 51) throw ContractViolation("qp must be in [0, 51], got " + std::to_string(qp));
  return {qp, std::pow(2.0, (qp - 4) / 6.0)};
}

std::vector<int> quantize(std::span<const double> coefs, const QuantParams& q) {
  std::vector<int> levels(coefs.size());
  for (std::size_t i = 0; i < coefs.size(); ++i)
    levels[i] = static_cast<int>(std::round(coefs[i] / q.qstep));
  return levels;
}

std::vector<double> dequantize(std::span<const int> levels, const QuantParams& q) {
  std::vector<double> coefs(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) coefs[i] = levels[i] * q.qstep;
  return coefs;
}

const std::vector<int>& zigzag_scan(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<int>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<int> scan;
  scan.reserve(static_cast<std::size_t>(n) * n);
  for (int d = 0; d < 2 * n - 1; ++d) {
    // Even anti-diagonals run bottom-left to top-right, odd ones the reverse.
    for (int t = 0; t <= d; ++t) {
      const int row = d % 2 == 0 ? d - t : t;
      const int col = d - row;
      if (row < n && col < n) scan.push_back(row * n + col);
    }
  }
  return cache.emplace(n, std::move(scan)).first->second;
}

std::vector<int> to_zigzag(std::span<const int> raster, int n) {
  const auto& scan = zigzag_scan(n);
  if (raster.size() != scan.size()) throw ContractViolation("to_zigzag: size mismatch");
  std::vector<int> out(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) out[i] = raster[scan[i]];
  return out;
}

std::vector<int> from_zigzag(std::span<const int> scanned, int n) {
  const auto& scan = zigzag_scan(n);
  if (scanned.size() != scan.size()) throw ContractViolation("from_zigzag: size mismatch");
  std::vector<int> out(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) out[scan[i]] = scanned[i];
  return out;
}

}  // namespace incodec
