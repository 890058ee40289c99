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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ofic/synthesis.hpp"
#include "oracles.hpp"

using namespace ofic;
using namespace ofic::testing;

namespace {

Grid random_grid(int c, int h, int w, Rng& rng, double s = 1.0) {
  std::uniform_real_distribution<double> u(-s, s);
  Grid g(c, h, w);
  for (double& v : g.v) v = u(rng);
  return g;
}

}  // namespace

TEST_CASE("layer stack layout per configuration") {
  Rng rng(1);
  SynthNet main_net = init_synth(CodecConfig::kMain, 7, rng);
  REQUIRE(main_net.layers.size() == 4);
  CHECK(main_net.layers[0].k == 1);
  CHECK(main_net.layers[0].kern.shape == std::vector<int>{40, 7, 1, 1});
  CHECK(main_net.layers[0].relu);
  CHECK(!main_net.layers[0].residual);
  CHECK(main_net.layers[1].kern.shape == std::vector<int>{3, 40, 1, 1});
  CHECK(main_net.layers[1].relu);
  CHECK(main_net.layers[2].k == 3);
  CHECK(main_net.layers[2].kern.shape == std::vector<int>{3, 3, 3, 3});
  CHECK(main_net.layers[2].residual);
  CHECK(main_net.layers[2].relu);
  CHECK(main_net.layers[3].residual);
  CHECK(!main_net.layers[3].relu);

  SynthNet light = init_synth(CodecConfig::kLight, 7, rng);
  REQUIRE(light.layers.size() == 3);
  CHECK(light.layers[0].kern.shape == std::vector<int>{18, 7, 1, 1});
  CHECK(light.layers[1].kern.shape == std::vector<int>{3, 18, 1, 1});
  CHECK(light.layers[2].k == 3);
  CHECK(light.layers[2].residual);
  CHECK(!light.layers[2].relu);

  // Residual branches start at zero, pointwise weights inside +-sqrt(1/fan).
  for (const SynthNet* net : {&main_net, &light}) {
    for (const SynthLayer& l : net->layers) {
      if (l.residual) {
        for (double v : l.kern.w) CHECK(v == 0.0);
      } else {
        const double bound = std::sqrt(1.0 / l.kern.shape[1]);
        for (double v : l.kern.w) CHECK(std::fabs(v) <= bound);
      }
      for (double v : l.bias.w) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("residual post-filters start as identities") {
  Rng rng(2);
  SynthNet net = init_synth(CodecConfig::kMain, 7, rng);
  Grid z = random_grid(7, 5, 6, rng);
  Grid full, head;
  synth_forward(net, z, full, nullptr);
  // A net truncated to the two pointwise layers produces the same output.
  SynthNet trunc;
  trunc.layers = {net.layers[0], net.layers[1]};
  synth_forward(trunc, z, head, nullptr);
  REQUIRE(full.size() == head.size());
  for (size_t i = 0; i < full.size(); ++i) CHECK(full.v[i] == head.v[i]);
}

TEST_CASE("forward matches a naive convolution chain") {
  Rng rng(3);
  for (CodecConfig cfg : {CodecConfig::kMain, CodecConfig::kLight}) {
    SynthNet net = init_synth(cfg, 7, rng);
    // Give residual branches real weights so the whole chain is exercised.
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (SynthLayer& l : net.layers) {
      for (double& v : l.kern.w) v += u(rng);
      for (double& v : l.bias.w) v += 0.1 * u(rng);
    }
    Grid z = random_grid(7, 6, 5, rng);
    Grid got;
    synth_forward(net, z, got, nullptr);

    Grid cur = z;
    for (const SynthLayer& l : net.layers) {
      Grid nxt = naive_conv2d(l.kern, l.bias, cur);
      if (l.relu)
        for (double& v : nxt.v) v = std::max(v, 0.0);
      if (l.residual)
        for (size_t i = 0; i < nxt.size(); ++i) nxt.v[i] += cur.v[i];
      cur = nxt;
    }
    REQUIRE(got.c == cur.c);
    double worst = 0.0;
    for (size_t i = 0; i < got.size(); ++i)
      worst = std::max(worst, std::fabs(got.v[i] - cur.v[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("backward against finite differences") {
  Rng rng(4);
  for (CodecConfig cfg : {CodecConfig::kMain, CodecConfig::kLight}) {
    CAPTURE(int(cfg));
    SynthNet net = init_synth(cfg, 7, rng);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (SynthLayer& l : net.layers) {
      for (double& v : l.kern.w) v += u(rng);
      for (double& v : l.bias.w) v += 0.1 * u(rng);
    }
    Grid z = random_grid(7, 5, 4, rng);
    Grid target = random_grid(3, 5, 4, rng);

    auto loss = [&]() {
      Grid out;
      synth_forward(net, z, out, nullptr);
      double s = 0.0;
      for (size_t i = 0; i < out.size(); ++i) {
        const double d = out.v[i] - target.v[i];
        s += d * d;
      }
      return 0.5 * s;
    };

    SynthWorkspace ws;
    Grid out;
    synth_forward(net, z, out, &ws);
    Grid gy(3, 5, 4);
    for (size_t i = 0; i < out.size(); ++i) gy.v[i] = out.v[i] - target.v[i];
    for (SynthLayer& l : net.layers) {
      l.kern.zero_grad();
      l.bias.zero_grad();
    }
    Grid gz;
    synth_backward(net, gy, ws, gz);

    std::vector<GradCheck> checks = {{z.v.data(), gz.v.data(), z.size()}};
    for (SynthLayer& l : net.layers) {
      checks.push_back({l.kern.w.data(), l.kern.g.data(), l.kern.size()});
      checks.push_back({l.bias.w.data(), l.bias.g.data(), l.bias.size()});
    }
    CHECK(max_fd_rel_err(loss, checks) < 1e-4);
  }
}

TEST_CASE("channel mismatch and missing forward are contract errors") {
  Rng rng(5);
  SynthNet net = init_synth(CodecConfig::kMain, 7, rng);
  Grid z = random_grid(6, 4, 4, rng);  // 6 channels, net expects 7
  Grid out;
  CHECK_THROWS_AS(synth_forward(net, z, out, nullptr), contract_error);
  SynthWorkspace ws;
  Grid gy(3, 4, 4), gz;
  CHECK_THROWS_AS(synth_backward(net, gy, ws, gz), contract_error);
}
