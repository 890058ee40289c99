// Copyright (c) the ofic project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ofic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <string>

#include "ofic/common.hpp"

namespace ofic {

double grid_mse(const Grid& a, const Grid& b) {
  if (a.c != b.c || a.h != b.h || a.w != b.w) {
    throw contract_error("grid_mse: shape mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a.v[i] - b.v[i];
    acc += d * d;
  }
  return acc / double(a.size());
}

double image_mse(const ImageU8& a, const ImageU8& b) {
  if (a.h != b.h || a.w != b.w) {
    throw data_error("images differ in shape");
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    double d = (double(a.rgb[i]) - double(b.rgb[i])) / 255.0;
    acc += d * d;
  }
  return acc / double(a.rgb.size());
}

double image_psnr(const ImageU8& a, const ImageU8& b) {
  double m = image_mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(m);
}

std::vector<RdPoint> make_rd_curve(std::vector<RdPoint> pts) {
  if (pts.size() < 4) {
    throw data_error("a rate-distortion curve needs at least four points");
  }
  std::sort(pts.begin(), pts.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].rate > 0.0) || !std::isfinite(pts[i].rate) ||
        !std::isfinite(pts[i].psnr)) {
      throw data_error("rate-distortion point is not finite and positive");
    }
    if (i > 0 && !(pts[i].rate > pts[i - 1].rate)) {
      throw data_error("curve rates must be strictly increasing");
    }
    if (i > 0 && !(pts[i].psnr > pts[i - 1].psnr)) {
      throw data_error("curve PSNR must increase with rate");
    }
  }
  return pts;
}

namespace {

// Least-squares cubic of log10(rate) in t = (2*psnr - lo - hi)/(hi - lo).
// The shared normalization keeps a uniform rate scaling between two curves a
// pure shift of the constant coefficient.
void fit_log_rate(const std::vector<RdPoint>& pts, double lo, double hi,
                  double coef[4]) {
  double a[4][4] = {};
  double rhs[4] = {};
  for (const RdPoint& p : pts) {
    double t = (2.0 * p.psnr - lo - hi) / (hi - lo);
    double y = std::log10(p.rate);
    double tp[7];
    tp[0] = 1.0;
    for (int k = 1; k < 7; ++k) tp[k] = tp[k - 1] * t;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) a[i][j] += tp[i + j];
      rhs[i] += tp[i] * y;
    }
  }
  solve4(a, rhs, coef);
}

}  // namespace

double bd_rate(const std::vector<RdPoint>& anchor,
               const std::vector<RdPoint>& test) {
  std::vector<RdPoint> ca = make_rd_curve(anchor);
  std::vector<RdPoint> ct = make_rd_curve(test);
  double lo = std::max(ca.front().psnr, ct.front().psnr);
  double hi = std::min(ca.back().psnr, ct.back().psnr);
  if (!(hi > lo)) {
    throw data_error("rate-distortion curves do not share a PSNR range");
  }
  double fa[4], ft[4];
  fit_log_rate(ca, lo, hi, fa);
  fit_log_rate(ct, lo, hi, ft);
  // Mean of the fitted difference over t in [-1, 1]; odd powers integrate
  // away.
  double d = (ft[0] - fa[0]) + (ft[2] - fa[2]) / 3.0;
  return (std::pow(10.0, d) - 1.0) * 100.0;
}

std::vector<RdPoint> parse_rd_csv(std::istream& in) {
  std::vector<RdPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    char c = line[begin];
    bool numeric = (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
    if (!numeric) {
      if (lineno == 1) continue;  // header row
      throw data_error("malformed rate-distortion row at line " +
                       std::to_string(lineno));
    }
    const char* s = line.c_str() + begin;
    char* end = nullptr;
    RdPoint p;
    p.rate = std::strtod(s, &end);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (!end || *end != ',') {
      throw data_error("malformed rate-distortion row at line " +
                       std::to_string(lineno));
    }
    s = end + 1;
    p.psnr = std::strtod(s, &end);
    if (end == s) {
      throw data_error("malformed rate-distortion row at line " +
                       std::to_string(lineno));
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace ofic
