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
#include <set>
#include <vector>

#include "doctest.h"
#include "ofic/arm.hpp"
#include "oracles.hpp"

using namespace ofic;
using namespace ofic::testing;

namespace {

Grid random_plane(int h, int w, Rng& rng, double s = 2.0) {
  std::uniform_real_distribution<double> u(-s, s);
  Grid g(1, h, w);
  for (double& v : g.v) v = u(rng);
  return g;
}

}  // namespace

TEST_CASE("laplace cdf: center, symmetry, monotonicity") {
  CHECK(laplace_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(laplace_cdf(3.0, 3.0, 0.2) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(laplace_cdf(x, 0.0, 1.0) + laplace_cdf(-x, 0.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(laplace_cdf(x, 0.0, 1.0) ==
          doctest::Approx(ref_laplace_cdf(x, 0.0, 1.0)).epsilon(1e-14));
  }
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double f = laplace_cdf(x, 0.5, 0.7);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("laplace bin probability against hand sums") {
  // mu=0, b=1, y=0: F(1/2) - F(-1/2) = 1 - e^{-1/2}
  CHECK(laplace_bin_prob(0.0, 0.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
  // y=1: (1 - e^{-3/2}/2) - (1 - e^{-1/2}/2) = (e^{-1/2} - e^{-3/2}) / 2
  CHECK(laplace_bin_prob(1.0, 0.0, 1.0) ==
        doctest::Approx(0.5 * (std::exp(-0.5) - std::exp(-1.5)))
            .epsilon(1e-14));
  // All-mass check: the bins of a wide range sum to ~1.
  double total = 0.0;
  for (int y = -60; y <= 60; ++y) {
    total += laplace_bin_prob(double(y), 0.3, 2.0);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rate floors at 16 bits in the far tail") {
  CHECK(laplace_rate_bits(0.0, 0.0, 1.0) ==
        doctest::Approx(-std::log2(1.0 - std::exp(-0.5))));
  CHECK(laplace_rate_bits(500.0, 0.0, 0.5) == doctest::Approx(16.0));
  CHECK(laplace_rate_bits(-500.0, 0.0, 0.5) == doctest::Approx(16.0));
}

TEST_CASE("context templates are frozen, causal and nearest-first") {
  for (int n : {24, 12}) {
    const ContextTemplate& tpl = context_template(n);
    REQUIRE(tpl.n == n);
    std::set<std::pair<int, int>> seen;
    for (int j = 0; j < tpl.n; ++j) {
      const int dy = tpl.off[j][0], dx = tpl.off[j][1];
      // Strictly before (0,0) in raster order.
      CHECK(dy <= 0);
      if (dy == 0) CHECK(dx < 0);
      CHECK(seen.insert({dy, dx}).second);  // no duplicates
    }
    // First entries are the immediate left neighbor, then the row above.
    CHECK(tpl.off[0][0] == 0);
    CHECK(tpl.off[0][1] == -1);
  }
  CHECK(context_template(24).off != context_template(12).off);
  CHECK_THROWS_AS(context_template(16), contract_error);
}

TEST_CASE("context extraction reads zero outside the plane") {
  const ContextTemplate& tpl = context_template(12);
  Grid g(1, 4, 4);
  for (size_t i = 0; i < g.size(); ++i) g.v[i] = double(i) + 1.0;
  double ctx[24];
  // Top-left corner: everything out of grid except nothing (no causal
  // neighbor exists), so the context is all zero.
  extract_context(g.v.data(), 4, 4, 0, 0, tpl, ctx);
  for (int j = 0; j < tpl.n; ++j) CHECK(ctx[j] == 0.0);
  // Interior pixel: values match manual lookups.
  extract_context(g.v.data(), 4, 4, 2, 2, tpl, ctx);
  for (int j = 0; j < tpl.n; ++j) {
    const int sy = 2 + tpl.off[j][0], sx = 2 + tpl.off[j][1];
    const double want =
        (sy >= 0 && sx >= 0 && sx < 4) ? g.v[size_t(sy) * 4 + sx] : 0.0;
    CHECK(ctx[j] == want);
  }
  // Integer grids give the same view.
  IntGrid ig(4, 4);
  for (size_t i = 0; i < ig.size(); ++i) ig.v[i] = int32_t(i) + 1;
  double ctx2[24];
  extract_context_int(ig, 2, 2, tpl, ctx2);
  for (int j = 0; j < tpl.n; ++j) CHECK(ctx2[j] == ctx[j]);
}

TEST_CASE("arm net shapes and scale clamp") {
  Rng rng(7);
  ArmNet net = init_arm(12, rng);
  CHECK(net.w1.shape == std::vector<int>{12, 12});
  CHECK(net.w3.shape == std::vector<int>{2, 12});
  for (double v : net.b1.w) CHECK(v == 0.0);

  // Force a hugely negative raw scale through the head bias: b clamps.
  ArmNet clamped = init_arm(12, rng);
  for (double& v : clamped.w1.w) v = 0.0;
  for (double& v : clamped.w2.w) v = 0.0;
  for (double& v : clamped.w3.w) v = 0.0;
  clamped.b3.w[1] = -50.0;
  double ctx[12] = {};
  LaplaceParams lp = arm_forward(clamped, ctx);
  CHECK(lp.b == kScaleMin);
}

TEST_CASE("batched plane rate matches the sequential evaluation") {
  Rng rng(8);
  for (int c : {24, 12}) {
    ArmNet net = init_arm(c, rng);
    Grid plane = random_plane(9, 13, rng);
    for (double& v : plane.v) v = double(quantize_round(v * 2.0));
    ArmWorkspace ws;
    const double batched = arm_plane_rate_bits(net, plane, ws);
    const double sequential = arm_plane_rate_bits_eval(net, plane);
    // Same math and order; the two code paths may fuse multiply-adds
    // differently, so agreement is to rounding, not bitwise.
    CHECK(batched == doctest::Approx(sequential).epsilon(1e-12));
  }
}

TEST_CASE("predictions are strictly causal") {
  Rng rng(9);
  ArmNet net = init_arm(24, rng);
  Grid plane = random_plane(6, 7, rng);
  const int ty = 3, tx = 4;  // probe position
  const size_t probe = size_t(ty) * plane.w + tx;

  auto params_at = [&](const Grid& p, int y, int x) {
    double ctx[24];
    extract_context(p.v.data(), p.h, p.w, y, x, context_template(24), ctx);
    return arm_forward(net, ctx);
  };
  std::vector<LaplaceParams> before;
  for (int y = 0; y < plane.h; ++y) {
    for (int x = 0; x < plane.w; ++x) before.push_back(params_at(plane, y, x));
  }
  Grid mutated = plane;
  mutated.v[probe] += 100.0;
  size_t i = 0;
  for (int y = 0; y < plane.h; ++y) {
    for (int x = 0; x < plane.w; ++x, ++i) {
      const LaplaceParams after = params_at(mutated, y, x);
      const bool at_or_before = (y < ty) || (y == ty && x <= tx);
      if (at_or_before) {
        // Positions up to and including the probe never see its value.
        CHECK(after.mu == before[i].mu);
        CHECK(after.b == before[i].b);
      }
    }
  }
  // And at least one later position does depend on it.
  bool any_changed = false;
  i = 0;
  for (int y = 0; y < plane.h; ++y) {
    for (int x = 0; x < plane.w; ++x, ++i) {
      if (y > ty || (y == ty && x > tx)) {
        const LaplaceParams after = params_at(mutated, y, x);
        if (after.mu != before[i].mu) any_changed = true;
      }
    }
  }
  CHECK(any_changed);
}

TEST_CASE("plane rate backward against finite differences") {
  Rng rng(10);
  for (int c : {24, 12}) {
    CAPTURE(c);
    ArmNet net = init_arm(c, rng);
    // The top-left pixel has an all-zero context, so with zero biases its
    // pre-activations land exactly on the ReLU kink where central
    // differences and the subgradient disagree. Random biases avoid that.
    std::uniform_real_distribution<double> ub(-0.3, 0.3);
    for (double& v : net.b1.w) v = ub(rng);
    for (double& v : net.b2.w) v = ub(rng);
    for (double& v : net.b3.w) v = ub(rng);
    Grid plane = random_plane(6, 6, rng, 1.3);
    ArmWorkspace ws;
    const double upstream = 0.37;
    auto loss = [&]() {
      ArmWorkspace tmp;
      return upstream * arm_plane_rate_bits(net, plane, tmp);
    };
    arm_plane_rate_bits(net, plane, ws);
    for (ParamTensor* t : {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3,
                           &net.b3}) {
      t->zero_grad();
    }
    Grid gplane;
    arm_plane_rate_backward(net, ws, upstream, gplane);
    std::vector<GradCheck> checks = {
        {net.w1.w.data(), net.w1.g.data(), net.w1.size()},
        {net.b1.w.data(), net.b1.g.data(), net.b1.size()},
        {net.w2.w.data(), net.w2.g.data(), net.w2.size()},
        {net.b2.w.data(), net.b2.g.data(), net.b2.size()},
        {net.w3.w.data(), net.w3.g.data(), net.w3.size()},
        {net.b3.w.data(), net.b3.g.data(), net.b3.size()},
        {plane.v.data(), gplane.v.data(), plane.size()}};
    CHECK(max_fd_rel_err(loss, checks) < 1e-4);
  }
}

TEST_CASE("backward demands a recorded forward") {
  Rng rng(11);
  ArmNet net = init_arm(12, rng);
  ArmWorkspace ws;
  Grid gplane;
  CHECK_THROWS_AS(arm_plane_rate_backward(net, ws, 1.0, gplane),
                  contract_error);
  Grid plane = random_plane(3, 3, rng);
  arm_plane_rate_bits(net, plane, ws);
  arm_plane_rate_backward(net, ws, 1.0, gplane);  // consumes the forward
  CHECK_THROWS_AS(arm_plane_rate_backward(net, ws, 1.0, gplane),
                  contract_error);
}
