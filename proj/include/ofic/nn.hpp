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

#ifndef OFIC_NN_HPP_
#define OFIC_NN_HPP_

#include <cstddef>
#include <cstdint>

#include "ofic/grid.hpp"

namespace ofic {

// y[o] = b[o] + sum_i w[o*in_n+i] * x[i], accumulated in ascending i.
// Every dense evaluation on the coded path funnels through this routine so
// encoder and decoder arithmetic agrees bitwise.
void dense_forward(const double* w, const double* b, int out_n, int in_n,
                   const double* x, double* y);

// Row-batched dense layer. x is n rows of in_n, y n rows of out_n.
void dense_forward_batch(const double* w, const double* b, int out_n,
                         int in_n, const double* x, size_t n, double* y);

// Accumulates into gw/gb, writes gx (may be null when input grads are not
// needed, e.g. for the first layer).
void dense_backward_batch(const double* w, double* gw, double* gb, int out_n,
                          int in_n, const double* x, const double* gy,
                          size_t n, double* gx);

void relu_forward(double* x, size_t n);  // in place
// pre holds the pre-activation values; the subgradient at 0 is 0.
void relu_backward(const double* pre, const double* gy, double* gx, size_t n);

// 2-D convolution, odd kernel, zero padding k/2, stride 1.
// kern shape {co, ci, k, k}, bias {co}. With k=1 the per-pixel accumulation
// order matches dense_forward exactly.
void conv2d_forward(const ParamTensor& kern, const ParamTensor& bias,
                    const Grid& x, Grid& y);
void conv2d_backward(ParamTensor& kern, ParamTensor& bias, const Grid& x,
                     const Grid& gy, Grid& gx);

// Transposed convolution on one plane: 8x8 kernel, stride 2. The output is
// the full scatter result cropped by 4 on each side (so it covers exactly
// 2h x 2w) and then truncated to th x tw from the top-left corner.
// Each output sample gathers 16 taps.
void tconv8s2_forward(const double* kern, const double* x, int h, int w,
                      double* y, int th, int tw);
// gkern accumulates; gx is overwritten.
void tconv8s2_backward(const double* kern, double* gkern, const double* x,
                       int h, int w, const double* gy, int th, int tw,
                       double* gx);

struct AdamConfig {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

// One Adam update with bias correction at step t (1-based). Returns false
// and leaves the tensor untouched when the gradient has a non-finite entry;
// the caller treats that as training divergence.
bool adam_step(ParamTensor& p, double lr, int64_t t,
               const AdamConfig& cfg = {});

}  // namespace ofic

#endif  // OFIC_NN_HPP_
