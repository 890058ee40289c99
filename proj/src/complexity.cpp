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

#include "ofic/complexity.hpp"

#include <vector>

#include "ofic/latent.hpp"

namespace ofic {

ComplexityReport count_macs(CodecConfig cfg, int levels, int h, int w) {
  if (levels <= 0) throw contract_error("count_macs: levels must be positive");

  // Latent samples per pixel for each level.
  std::vector<double> frac(levels);
  if (h > 0 && w > 0) {
    std::vector<std::pair<int, int>> shapes = pyramid_shapes(h, w, levels);
    double pixels = double(h) * double(w);
    for (int l = 0; l < levels; ++l) {
      frac[l] = double(shapes[l].first) * double(shapes[l].second) / pixels;
    }
  } else {
    double f = 1.0;
    for (int l = 0; l < levels; ++l, f *= 0.25) frac[l] = f;
  }

  int c = arm_context_size(cfg);
  double arm_per_sample = double(2 * c * c + 2 * c);  // two hidden + head

  ComplexityReport r;
  for (int l = 0; l < levels; ++l) r.arm += arm_per_sample * frac[l];

  // Level l reaches the image grid through l doubling stages; the stage
  // producing the grid of level j costs 16 multiplies per produced sample.
  for (int l = 1; l < levels; ++l) {
    for (int j = 0; j < l; ++j) r.upsampling += 16.0 * frac[j];
  }

  // Pointwise layers cost ci*co each, 3x3 residual branches 81.
  if (cfg == CodecConfig::kMain) {
    r.synthesis = double(levels) * 40 + 40 * 3 + 81 + 81;
  } else {
    r.synthesis = double(levels) * 18 + 18 * 3 + 81;
  }
  return r;
}

}  // namespace ofic
