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

#include "ofic/upsampler.hpp"

#include <cstring>

#include "ofic/nn.hpp"

namespace ofic {

std::array<double, 4> bicubic_halfpel_kernel() {
  // Cubic p(t) with p(x_i) = s_i at x = -1, 0, 1, 2; the weight of sample i
  // on p(1/2) solves B^T w = v with v = powers of 1/2.
  const double nodes[4] = {-1.0, 0.0, 1.0, 2.0};
  // B[i][j] = nodes[i]^j, so B^T[i][j] = nodes[j]^i.
  double bt[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double p = 1.0;
      for (int e = 0; e < i; ++e) p *= nodes[j];
      bt[i][j] = p;
    }
  double v[4] = {1.0, 0.5, 0.25, 0.125};
  double w[4];
  solve4(bt, v, w);
  return {w[0], w[1], w[2], w[3]};
}

std::array<double, 8> bicubic_stride2_profile() {
  const std::array<double, 4> hp = bicubic_halfpel_kernel();
  std::array<double, 8> p{};
  p[4] = 1.0;  // knot pass-through
  // With the centered crop, full index 2m+5-2n selects the odd taps: the
  // weight of s(m-1+t) lands at tap 7-2t.
  p[7] = hp[0];
  p[5] = hp[1];
  p[3] = hp[2];
  p[1] = hp[3];
  return p;
}

Upsampler init_bicubic_upsampler() {
  Upsampler u;
  u.kern = ParamTensor({8, 8});
  const std::array<double, 8> p = bicubic_stride2_profile();
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) u.kern.w[y * 8 + x] = p[y] * p[x];
  return u;
}

void upsample_pyramid(const Upsampler& ups, const std::vector<Grid>& levels,
                      Grid& out, UpsampleWorkspace* ws) {
  const int n = int(levels.size());
  if (n < 1) throw contract_error("upsample_pyramid: empty pyramid");
  const int h = levels[0].h, w = levels[0].w;
  if (out.c != n || out.h != h || out.w != w) out = Grid(n, h, w);
  if (ws) {
    ws->stages.resize(n);
    ws->has_forward = true;
  }
  std::memcpy(out.chan(0), levels[0].v.data(), levels[0].plane() * sizeof(double));
  if (ws) ws->stages[0].clear();
  for (int l = 1; l < n; ++l) {
    std::vector<Grid> local;
    std::vector<Grid>& chain = ws ? ws->stages[l] : local;
    chain.resize(l);
    chain[0] = levels[l];
    for (int s = 0; s < l; ++s) {
      const Grid& in = chain[s];
      const int th = levels[l - 1 - s].h, tw = levels[l - 1 - s].w;
      double* dst;
      if (s == l - 1) {
        dst = out.chan(l);
      } else {
        // chain was sized to l entries up front, so s + 1 is always in
        // range and `in` stays valid across this assignment.
        if (chain[s + 1].h != th || chain[s + 1].w != tw)
          chain[s + 1] = Grid(1, th, tw);
        dst = chain[s + 1].v.data();
      }
      tconv8s2_forward(ups.kern.w.data(), in.v.data(), in.h, in.w, dst, th, tw);
    }
  }
}

void upsample_backward(Upsampler& ups, const Grid& gout,
                       UpsampleWorkspace& ws, std::vector<Grid>& glevels) {
  if (!ws.has_forward)
    throw contract_error("upsample_backward: no recorded forward");
  const int n = gout.c;
  glevels.resize(n);
  if (glevels[0].h != gout.h || glevels[0].w != gout.w)
    glevels[0] = Grid(1, gout.h, gout.w);
  std::memcpy(glevels[0].v.data(), gout.chan(0), gout.plane() * sizeof(double));
  Grid ga, gb;
  for (int l = 1; l < n; ++l) {
    const std::vector<Grid>& chain = ws.stages[l];
    // Walk the chain backwards; the gradient entering stage s has the shape
    // of that stage's output.
    ga = Grid(1, gout.h, gout.w);
    std::memcpy(ga.v.data(), gout.chan(l), gout.plane() * sizeof(double));
    for (int s = l - 1; s >= 0; --s) {
      const Grid& in = chain[s];
      if (gb.h != in.h || gb.w != in.w) gb = Grid(1, in.h, in.w);
      tconv8s2_backward(ups.kern.w.data(), ups.kern.g.data(), in.v.data(),
                        in.h, in.w, ga.v.data(), ga.h, ga.w, gb.v.data());
      std::swap(ga, gb);
    }
    std::swap(glevels[l], ga);
  }
  ws.has_forward = false;
}

}  // namespace ofic
