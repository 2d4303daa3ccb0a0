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

// Bjontegaard deltas by dense trapezoid quadrature over the curve through
// four points, which is evaluated in Lagrange form rather than fitted.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double lagrange(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
    s += ys[i] * l;
  }
  return s;
}

// Mean of (yt - ya) over the shared x range, both curves interpolated.
inline double mean_gap(const std::vector<double>& xa, const std::vector<double>& ya,
                       const std::vector<double>& xt, const std::vector<double>& yt,
                       int intervals = 200000) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xt.begin(), xt.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xt.begin(), xt.end()));
  const double h = (hi - lo) / intervals;
  double s = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double x = lo + k * h;
    const double g = lagrange(xt, yt, x) - lagrange(xa, ya, x);
    s += (k == 0 || k == intervals) ? 0.5 * g : g;
  }
  return s * h / (hi - lo);
}

// Rates in any positive unit, PSNR in dB; four points per curve.
inline double bd_rate(const std::vector<double>& rate_a, const std::vector<double>& psnr_a,
                      const std::vector<double>& rate_t, const std::vector<double>& psnr_t) {
  std::vector<double> la, lt;
  for (double r : rate_a) la.push_back(std::log10(r));
  for (double r : rate_t) lt.push_back(std::log10(r));
  return (std::pow(10.0, mean_gap(psnr_a, la, psnr_t, lt)) - 1.0) * 100.0;
}

inline double bd_psnr(const std::vector<double>& rate_a, const std::vector<double>& psnr_a,
                      const std::vector<double>& rate_t, const std::vector<double>& psnr_t) {
  std::vector<double> la, lt;
  for (double r : rate_a) la.push_back(std::log10(r));
  for (double r : rate_t) lt.push_back(std::log10(r));
  return mean_gap(la, psnr_a, lt, psnr_t);
}

}  // namespace oracle
