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

#include "incodec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

namespace incodec {

double mse(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height)
    throw ContractViolation("psnr: plane dimensions differ (" + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.samples.size());
}

double psnr(const Plane& a, const Plane& b) {
  const double e = mse(a, b);
  if (e == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

std::string format_psnr(double db, int digits) {
  if (std::isinf(db)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, db);
  return buf;
}

double bits_per_pixel(std::size_t payload_bits, int luma_width, int luma_height) {
  if (luma_width <= 0 || luma_height <= 0) throw ContractViolation("bits_per_pixel: empty frame");
  return static_cast<double>(payload_bits) / (static_cast<double>(luma_width) * luma_height);
}

double bits_per_pixel(const Bitstream& stream) {
  return bits_per_pixel(stream.payload_bits, stream.width, stream.height);
}

void RDCurve::validate() const {
  if (points.size() < 4)
    throw ContractViolation("RD curve needs at least 4 points, got " +
                            std::to_string(points.size()));
  for (const RDPoint& p : points) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate))
      throw ContractViolation("RD curve rate must be positive and finite");
    if (!std::isfinite(p.psnr)) throw ContractViolation("RD curve contains a non-finite PSNR");
  }
  const bool decreasing = points[1].rate < points[0].rate;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const bool ok = decreasing ? points[i].rate < points[i - 1].rate
                               : points[i].rate > points[i - 1].rate;
    if (!ok) throw ContractViolation("RD curve rates are not strictly monotone");
  }
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y,
                            int degree) {
  if (x.size() != y.size() || x.size() < static_cast<std::size_t>(degree + 1))
    throw ContractViolation("polyfit: need at least degree + 1 points");
  Eigen::MatrixXd a(x.size(), degree + 1);
  Eigen::VectorXd b(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      a(i, d) = p;
      p *= x[i];
    }
    b(i) = y[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

namespace {

// Integral of the polynomial over [lo, hi].
double integrate(const std::vector<double>& c, double lo, double hi) {
  double s = 0.0;
  for (std::size_t d = 0; d < c.size(); ++d) {
    const double k = static_cast<double>(d + 1);
    s += c[d] * (std::pow(hi, k) - std::pow(lo, k)) / k;
  }
  return s;
}

// Mean difference test - anchor of y(x) over the shared x range, with y a
// cubic fit through each curve.
double mean_delta(const std::vector<double>& xa, const std::vector<double>& ya,
                  const std::vector<double>& xt, const std::vector<double>& yt) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xt.begin(), xt.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xt.begin(), xt.end()));
  if (!(hi > lo)) throw ContractViolation("BD metric: the curves do not overlap");
  const auto pa = polyfit(xa, ya, 3);
  const auto pt = polyfit(xt, yt, 3);
  return (integrate(pt, lo, hi) - integrate(pa, lo, hi)) / (hi - lo);
}

void split(const RDCurve& c, std::vector<double>& log_rate, std::vector<double>& quality) {
  c.validate();
  for (const RDPoint& p : c.points) {
    log_rate.push_back(std::log10(p.rate));
    quality.push_back(p.psnr);
  }
}

}  // namespace

double bd_rate(const RDCurve& anchor, const RDCurve& test) {
  std::vector<double> ra, qa, rt, qt;
  split(anchor, ra, qa);
  split(test, rt, qt);
  const double delta = mean_delta(qa, ra, qt, rt);
  return (std::pow(10.0, delta) - 1.0) * 100.0;
}

double bd_psnr(const RDCurve& anchor, const RDCurve& test) {
  std::vector<double> ra, qa, rt, qt;
  split(anchor, ra, qa);
  split(test, rt, qt);
  return mean_delta(ra, qa, rt, qt);
}

}  // namespace incodec
