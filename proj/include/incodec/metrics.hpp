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

#include <limits>
#include <string>
#include <vector>

#include "incodec/codec.hpp"
#include "incodec/image.hpp"

namespace incodec {

inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

double mse(const Plane& a, const Plane& b);
// 10 log10(255^2 / MSE); identical planes give kPsnrInfinite.
double psnr(const Plane& a, const Plane& b);
// "inf" for the identical-plane sentinel, otherwise fixed with `digits` decimals.
std::string format_psnr(double db, int digits = 4);

// Payload bits (header excluded) per luma sample.
double bits_per_pixel(std::size_t payload_bits, int luma_width, int luma_height);
double bits_per_pixel(const Bitstream& stream);

struct RDPoint {
  double rate = 0.0;  // bpp, > 0
  double psnr = 0.0;  // dB
};

// Ordered by QP; at least four points, rates strictly monotone, PSNR finite.
struct RDCurve {
  std::vector<RDPoint> points;

  // Throws ContractViolation when the invariants above do not hold.
  void validate() const;
};

// Bjontegaard delta rate in percent (negative: the test curve saves bits).
double bd_rate(const RDCurve& anchor, const RDCurve& test);
// Bjontegaard delta PSNR in dB (positive: the test curve is better).
double bd_psnr(const RDCurve& anchor, const RDCurve& test);

// Least-squares polynomial fit; coefficients lowest order first.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree);

}  // namespace incodec
