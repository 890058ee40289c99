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

#ifndef OFIC_METRICS_HPP_
#define OFIC_METRICS_HPP_

#include <iosfwd>
#include <vector>

#include "ofic/grid.hpp"
#include "ofic/image.hpp"

namespace ofic {

// Mean squared error over all samples; shapes must match.
double grid_mse(const Grid& a, const Grid& b);
// MSE on the [0,1] scale (pixels divided by 255).
double image_mse(const ImageU8& a, const ImageU8& b);
// -10*log10(mse); +infinity when the images are identical.
double image_psnr(const ImageU8& a, const ImageU8& b);

struct RdPoint {
  double rate = 0.0;  // any positive unit, e.g. bpp
  double psnr = 0.0;  // dB
};

// Sorts by rate and validates: at least four points, rates strictly
// increasing and finite, PSNR strictly increasing (rate must be expressible
// as a function of PSNR for the fit below).
std::vector<RdPoint> make_rd_curve(std::vector<RdPoint> pts);

// Average rate difference of test against anchor in percent, negative when
// test is cheaper: least-squares cubic fit of log10(rate) against PSNR per
// curve, averaged difference over the shared PSNR interval, (10^d - 1)*100.
double bd_rate(const std::vector<RdPoint>& anchor,
               const std::vector<RdPoint>& test);

// CSV rows "rate,psnr". Blank lines and a non-numeric header line are
// skipped; anything else malformed is an error.
std::vector<RdPoint> parse_rd_csv(std::istream& in);

}  // namespace ofic

#endif  // OFIC_METRICS_HPP_
