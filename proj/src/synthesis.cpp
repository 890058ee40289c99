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

#include "ofic/synthesis.hpp"

#include "ofic/nn.hpp"

namespace ofic {

namespace {

SynthLayer make_layer(int k, int ci, int co, bool residual, bool relu,
                      Rng& rng) {
  SynthLayer l;
  l.k = k;
  l.residual = residual;
  l.relu = relu;
  l.kern = ParamTensor({co, ci, k, k});
  l.bias = ParamTensor({co});
  if (!residual) {
    const double s = std::sqrt(1.0 / (ci * k * k));
    std::uniform_real_distribution<double> u(-s, s);
    for (double& v : l.kern.w) v = u(rng);
  }
  return l;
}

}  // namespace

SynthNet init_synth(CodecConfig cfg, int in_channels, Rng& rng) {
  const int hidden = cfg == CodecConfig::kMain ? 40 : 18;
  SynthNet net;
  net.layers.push_back(make_layer(1, in_channels, hidden, false, true, rng));
  net.layers.push_back(make_layer(1, hidden, 3, false, true, rng));
  if (cfg == CodecConfig::kMain) {
    net.layers.push_back(make_layer(3, 3, 3, true, true, rng));
    net.layers.push_back(make_layer(3, 3, 3, true, false, rng));
  } else {
    net.layers.push_back(make_layer(3, 3, 3, true, false, rng));
  }
  return net;
}

namespace {

// The backward pass can take the ReLU mask from the layer's own output: the
// output is positive exactly where the pre-activation is. Only residual
// branches and a trailing ReLU layer need the pre-activation kept around.
bool keep_pre(const SynthLayer& l, size_t i, size_t n) {
  return l.residual || (l.relu && i + 1 == n);
}

}  // namespace

void synth_forward(const SynthNet& net, const Grid& z, Grid& out,
                   SynthWorkspace* ws) {
  const size_t n = net.layers.size();
  Grid local_in, local_pre;
  if (ws) {
    ws->in.resize(n);
    ws->pre.resize(n);
    ws->has_forward = true;
    ws->in[0] = z;
  } else {
    local_in = z;
  }
  for (size_t i = 0; i < n; ++i) {
    const SynthLayer& l = net.layers[i];
    const bool last = i + 1 == n;
    Grid& cur = ws ? ws->in[i] : local_in;
    Grid& dst = ws && !last ? ws->in[i + 1] : out;
    if (keep_pre(l, i, n)) {
      Grid& pre = ws ? ws->pre[i] : local_pre;
      conv2d_forward(l.kern, l.bias, cur, pre);
      if (dst.c != pre.c || dst.h != pre.h || dst.w != pre.w)
        dst = Grid(pre.c, pre.h, pre.w);
      const size_t m = pre.size();
      if (l.residual) {
        for (size_t p = 0; p < m; ++p) {
          const double a = l.relu ? std::max(pre.v[p], 0.0) : pre.v[p];
          dst.v[p] = a + cur.v[p];
        }
      } else {
        for (size_t p = 0; p < m; ++p) dst.v[p] = std::max(pre.v[p], 0.0);
      }
    } else {
      conv2d_forward(l.kern, l.bias, cur, dst);
      if (l.relu) relu_forward(dst.v.data(), dst.size());
    }
    if (!ws && !last) std::swap(local_in, out);
  }
}

void synth_backward(SynthNet& net, const Grid& gy, SynthWorkspace& ws,
                    Grid& gz) {
  if (!ws.has_forward)
    throw contract_error("synth_backward: no recorded forward");
  const size_t n = net.layers.size();
  Grid g = gy, gb, gx;
  for (int i = int(n) - 1; i >= 0; --i) {
    SynthLayer& l = net.layers[i];
    // Gradient hitting the conv output. Residual layers still need the
    // unmasked gradient for the skip path, so they mask into a copy.
    Grid* gconv = &g;
    if (l.relu) {
      const Grid& mask =
          keep_pre(l, size_t(i), n) ? ws.pre[i] : ws.in[size_t(i) + 1];
      if (l.residual) {
        gb = g;
        relu_backward(mask.v.data(), gb.v.data(), gb.v.data(), gb.size());
        gconv = &gb;
      } else {
        relu_backward(mask.v.data(), g.v.data(), g.v.data(), g.size());
      }
    }
    conv2d_backward(l.kern, l.bias, ws.in[i], *gconv, gx);
    if (l.residual)
      for (size_t p = 0; p < gx.size(); ++p) gx.v[p] += g.v[p];
    g = std::move(gx);
    gx = Grid();
  }
  gz = std::move(g);
  ws.has_forward = false;
}

}  // namespace ofic
