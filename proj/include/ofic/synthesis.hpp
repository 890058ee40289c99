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

#ifndef OFIC_SYNTHESIS_HPP_
#define OFIC_SYNTHESIS_HPP_

#include <vector>

#include "ofic/common.hpp"
#include "ofic/grid.hpp"

namespace ofic {

struct SynthLayer {
  int k = 1;              // kernel side, 1 or 3
  bool residual = false;  // y = x + branch(x); in/out channels match
  bool relu = false;      // applied to the branch output
  ParamTensor kern, bias;
};

// Two pointwise layers mapping the upsampled latents to RGB, then residual
// 3x3 post-filters. Main: 7/40, 40/3, two residuals (first with ReLU).
// Light: 7/18, 18/3, one residual. Pixel values live on [0, 1] and are only
// clamped at image write-out.
struct SynthNet {
  std::vector<SynthLayer> layers;
};

// Pointwise weights start uniform on +-sqrt(1/fan_in); residual kernels
// start at zero so the post-filters begin as identities.
SynthNet init_synth(CodecConfig cfg, int in_channels, Rng& rng);

struct SynthWorkspace {
  // in[i] is the input of layer i; in[0] copies z. pre[i] is the conv output
  // before activation and is only kept where the backward pass cannot read
  // the mask off the next layer's input: residual branches and a trailing
  // ReLU layer.
  std::vector<Grid> in;
  std::vector<Grid> pre;
  bool has_forward = false;
};

// ws may be null when no backward pass will follow.
void synth_forward(const SynthNet& net, const Grid& z, Grid& out,
                   SynthWorkspace* ws);

// Accumulates parameter grads, writes gz.
void synth_backward(SynthNet& net, const Grid& gy, SynthWorkspace& ws,
                    Grid& gz);

}  // namespace ofic

#endif  // OFIC_SYNTHESIS_HPP_
