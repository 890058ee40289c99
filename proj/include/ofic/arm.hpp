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

#ifndef OFIC_ARM_HPP_
#define OFIC_ARM_HPP_

#include <vector>

#include "ofic/common.hpp"
#include "ofic/grid.hpp"
#include "ofic/latent.hpp"

namespace ofic {

// Probability that a symbol can cost at most 16 bits; scales below kScaleMin
// behave like kScaleMin would at the CDF quantization stage.
constexpr double kProbFloor = 1.0 / 65536.0;
constexpr double kScaleMin = 1e-3;

double laplace_cdf(double x, double mu, double b);
// Mass of the integer bin around y: F(y+0.5) - F(y-0.5), no floor.
double laplace_bin_prob(double y, double mu, double b);
// Coding cost in bits with the probability floor applied.
double laplace_rate_bits(double y, double mu, double b);

// Causal neighborhood, nearest rows first, offsets (dy, dx) with dy <= 0 and
// strictly before (0,0) in raster order. Frozen per context size: 24 for the
// main configuration, 12 for light.
struct ContextTemplate {
  int n;
  const int (*off)[2];
};
const ContextTemplate& context_template(int n);

// Out-of-grid neighbors read as zero.
void extract_context(const double* plane, int h, int w, int y, int x,
                     const ContextTemplate& tpl, double* ctx);
void extract_context_int(const IntGrid& g, int y, int x,
                         const ContextTemplate& tpl, double* ctx);

// Two hidden layers of width c with ReLU, then a linear head giving the
// Laplace location and the log of its scale.
struct ArmNet {
  int c = 0;
  ParamTensor w1, b1, w2, b2, w3, b3;
};

ArmNet init_arm(int c, Rng& rng);

struct LaplaceParams {
  double mu, b;
};

// One context vector to (mu, b); b = max(exp(raw), kScaleMin).
LaplaceParams arm_forward(const ArmNet& net, const double* ctx);

// Batched activations for one plane, kept for the backward pass.
struct ArmWorkspace {
  size_t n = 0;
  int h = 0, w = 0;
  bool has_forward = false;
  std::vector<double> ctx, h1p, h1, h2p, h2, out;
  std::vector<double> gmu, gb_raw, gsym;  // d(bits_i) pieces from the rate
  std::vector<double> gout, gh, ghp, gctx;
};

// Total rate in bits of one relaxed plane: contexts and coded symbol both
// read `plane`. Fills ws so arm_plane_rate_backward can run afterwards.
double arm_plane_rate_bits(const ArmNet& net, const Grid& plane,
                           ArmWorkspace& ws);

// Rate only, no workspace bookkeeping. Shared helper for evaluation paths.
double arm_plane_rate_bits_eval(const ArmNet& net, const Grid& plane);

// Propagates upstream * d(total bits) into net gradients and gplane
// (context fan-out plus the symbol term). gplane is resized and overwritten.
void arm_plane_rate_backward(ArmNet& net, ArmWorkspace& ws, double upstream,
                             Grid& gplane);

}  // namespace ofic

#endif  // OFIC_ARM_HPP_
