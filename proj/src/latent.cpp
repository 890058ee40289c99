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

#include "ofic/latent.hpp"

#include <cmath>

namespace ofic {

std::vector<std::pair<int, int>> pyramid_shapes(int h, int w, int levels) {
  if (h < 1 || w < 1 || levels < 1)
    throw contract_error("pyramid_shapes: empty geometry");
  std::vector<std::pair<int, int>> s;
  s.reserve(levels);
  int lh = h, lw = w;
  for (int l = 0; l < levels; ++l) {
    s.emplace_back(lh, lw);
    lh = std::max(1, (lh + 1) / 2);
    lw = std::max(1, (lw + 1) / 2);
  }
  return s;
}

LatentPyramid init_pyramid(int h, int w, int levels) {
  LatentPyramid pyr;
  pyr.image_h = h;
  pyr.image_w = w;
  for (auto [lh, lw] : pyramid_shapes(h, w, levels))
    pyr.level.emplace_back(std::vector<int>{lh, lw});
  return pyr;
}

void relax_pyramid(const LatentPyramid& pyr, QuantMode mode, Rng& rng,
                   std::vector<Grid>& out) {
  out.resize(pyr.level.size());
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  for (size_t l = 0; l < pyr.level.size(); ++l) {
    const ParamTensor& lv = pyr.level[l];
    Grid& g = out[l];
    if (g.h != lv.shape[0] || g.w != lv.shape[1]) g = Grid(1, lv.shape[0], lv.shape[1]);
    if (mode == QuantMode::kNoise) {
      for (size_t i = 0; i < lv.size(); ++i) g.v[i] = lv.w[i] + noise(rng);
    } else {
      for (size_t i = 0; i < lv.size(); ++i)
        g.v[i] = double(quantize_round(lv.w[i]));
    }
  }
}

std::vector<IntGrid> quantize_pyramid(const LatentPyramid& pyr) {
  std::vector<IntGrid> out;
  out.reserve(pyr.level.size());
  for (const ParamTensor& lv : pyr.level) {
    IntGrid g(lv.shape[0], lv.shape[1]);
    for (size_t i = 0; i < lv.size(); ++i)
      g.v[i] = int32_t(quantize_round(lv.w[i]));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace ofic
