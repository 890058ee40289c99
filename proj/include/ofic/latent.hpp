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

#ifndef OFIC_LATENT_HPP_
#define OFIC_LATENT_HPP_

#include <utility>
#include <vector>

#include "ofic/common.hpp"
#include "ofic/grid.hpp"

namespace ofic {

// Level 0 matches the image; each level above halves both sides with ceil
// rounding and floors at 1x1.
std::vector<std::pair<int, int>> pyramid_shapes(int h, int w, int levels);

// Continuous latents under optimization, one single-channel plane per level.
struct LatentPyramid {
  int image_h = 0, image_w = 0;
  std::vector<ParamTensor> level;  // shape {h_l, w_l}
};

LatentPyramid init_pyramid(int h, int w, int levels);

// How the decoder-facing view of the latents is produced during training.
//   kRound: hard round, ties away from zero (also the coding path)
//   kNoise: additive uniform noise on [-0.5, 0.5)
//   kSte:   round in the forward pass, scaled straight-through backward
enum class QuantMode { kRound, kNoise, kSte };

// Derivative the quantizer contributes on the backward path.
inline double quant_backward_factor(QuantMode mode, double ste_eps) {
  return mode == QuantMode::kSte ? ste_eps : 1.0;
}

// Fills `out` with the relaxed view of every level.
void relax_pyramid(const LatentPyramid& pyr, QuantMode mode, Rng& rng,
                   std::vector<Grid>& out);

// Hard-rounded integer pyramid for the coding path.
std::vector<IntGrid> quantize_pyramid(const LatentPyramid& pyr);

}  // namespace ofic

#endif  // OFIC_LATENT_HPP_
