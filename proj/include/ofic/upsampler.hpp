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

#ifndef OFIC_UPSAMPLER_HPP_
#define OFIC_UPSAMPLER_HPP_

#include <array>
#include <vector>

#include "ofic/common.hpp"
#include "ofic/grid.hpp"

namespace ofic {

// Half-pel weights of the cubic through knots at -1, 0, 1, 2, obtained by
// solving the Vandermonde system and evaluating at 1/2:
// {-1/16, 9/16, 9/16, -1/16}.
std::array<double, 4> bicubic_halfpel_kernel();

// Stride-2 scatter profile: even taps pass the knots through unchanged, odd
// taps hold the half-pel weights.
std::array<double, 8> bicubic_stride2_profile();

// One shared 8x8 transposed-convolution kernel for every x2 stage.
struct Upsampler {
  ParamTensor kern;  // shape {8, 8}
};

// Separable outer product of the stride-2 profile.
Upsampler init_bicubic_upsampler();

// Chain intermediates per level, kept for the backward pass. stages[l][s] is
// the plane entering stage s of level l (s = 0 is the latent plane itself).
struct UpsampleWorkspace {
  std::vector<std::vector<Grid>> stages;
  bool has_forward = false;
};

// Upsamples each latent plane to the image grid through chained x2 stages,
// cropping every stage to the recorded shape of the next level down.
// out gets one channel per level; level 0 is copied. ws may be null when no
// backward pass will follow.
void upsample_pyramid(const Upsampler& ups, const std::vector<Grid>& levels,
                      Grid& out, UpsampleWorkspace* ws);

// Accumulates the kernel gradient and writes per-level plane gradients.
void upsample_backward(Upsampler& ups, const Grid& gout,
                       UpsampleWorkspace& ws, std::vector<Grid>& glevels);

}  // namespace ofic

#endif  // OFIC_UPSAMPLER_HPP_
