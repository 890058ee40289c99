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
#include <limits>
#include <vector>

#include "doctest.h"
#include "ofic/common.hpp"
#include "ofic/nn.hpp"
#include "oracles.hpp"

using namespace ofic;
using namespace ofic::testing;

namespace {

std::vector<double> random_vec(size_t n, Rng& rng, double s = 1.0) {
  std::uniform_real_distribution<double> u(-s, s);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void randomize(ParamTensor& t, Rng& rng, double s = 1.0) {
  std::uniform_real_distribution<double> u(-s, s);
  for (double& x : t.w) x = u(rng);
}

}  // namespace

TEST_CASE("dense_forward matches the naive dot product") {
  Rng rng(101);
  for (int in_n : {1, 2, 3, 4, 5, 7, 8, 12, 24, 41}) {
    for (int out_n : {1, 2, 3, 24}) {
      std::vector<double> w = random_vec(size_t(out_n) * in_n, rng);
      std::vector<double> b = random_vec(out_n, rng);
      std::vector<double> x = random_vec(in_n, rng);
      std::vector<double> y(out_n), yref(out_n);
      dense_forward(w.data(), b.data(), out_n, in_n, x.data(), y.data());
      naive_dense(w.data(), b.data(), out_n, in_n, x.data(), yref.data());
      for (int o = 0; o < out_n; ++o) {
        CHECK(y[o] == doctest::Approx(yref[o]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("dense_forward_batch rows match single-row calls") {
  Rng rng(102);
  const int in_n = 24, out_n = 24;
  const size_t n = 17;
  std::vector<double> w = random_vec(size_t(out_n) * in_n, rng);
  std::vector<double> b = random_vec(out_n, rng);
  std::vector<double> x = random_vec(n * in_n, rng);
  std::vector<double> y(n * out_n);
  dense_forward_batch(w.data(), b.data(), out_n, in_n, x.data(), n, y.data());
  for (size_t r = 0; r < n; ++r) {
    std::vector<double> yr(out_n);
    dense_forward(w.data(), b.data(), out_n, in_n, x.data() + r * in_n,
                  yr.data());
    // Same summation order; only multiply-add fusion may differ, so the
    // two paths agree to a final-bit rounding.
    for (int o = 0; o < out_n; ++o)
      CHECK(y[r * out_n + o] == doctest::Approx(yr[o]).epsilon(1e-14));
  }
}

TEST_CASE("dense backward against finite differences") {
  Rng rng(103);
  const int in_n = 6, out_n = 5;
  const size_t n = 4;
  ParamTensor w({out_n, in_n}), b({out_n});
  randomize(w, rng);
  randomize(b, rng);
  std::vector<double> x = random_vec(n * in_n, rng);
  // loss = sum of squared outputs
  std::vector<double> y(n * out_n), gy(n * out_n), gx(n * in_n);
  auto loss = [&]() {
    dense_forward_batch(w.w.data(), b.w.data(), out_n, in_n, x.data(), n,
                        y.data());
    double acc = 0.0;
    for (double v : y) acc += v * v;
    return acc;
  };
  loss();
  for (size_t i = 0; i < y.size(); ++i) gy[i] = 2.0 * y[i];
  w.zero_grad();
  b.zero_grad();
  dense_backward_batch(w.w.data(), w.g.data(), b.g.data(), out_n, in_n,
                       x.data(), gy.data(), n, gx.data());
  // gx depends on x, which itself feeds the loss; check it too.
  std::vector<GradCheck> checks = {{w.w.data(), w.g.data(), w.size()},
                                   {b.w.data(), b.g.data(), b.size()},
                                   {x.data(), gx.data(), x.size()}};
  CHECK(max_fd_rel_err(loss, checks) < 1e-4);
}

TEST_CASE("relu forward and backward") {
  double x[5] = {-2.0, -0.0, 0.0, 0.5, 3.0};
  relu_forward(x, 5);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
  CHECK(x[2] == 0.0);
  CHECK(x[3] == 0.5);
  CHECK(x[4] == 3.0);
  const double pre[4] = {-1.0, 0.0, 1e-12, 2.0};
  const double gy[4] = {5.0, 5.0, 5.0, 5.0};
  double gx[4];
  relu_backward(pre, gy, gx, 4);
  CHECK(gx[0] == 0.0);
  CHECK(gx[1] == 0.0);  // subgradient at 0 is 0
  CHECK(gx[2] == 5.0);
  CHECK(gx[3] == 5.0);
}

TEST_CASE("conv2d matches the naive convolution") {
  Rng rng(104);
  for (int k : {1, 3}) {
    ParamTensor kern({3, 2, k, k}), bias({3});
    randomize(kern, rng);
    randomize(bias, rng);
    Grid x(2, 5, 7);
    for (double& v : x.v) v = random_vec(1, rng)[0];
    Grid y;
    conv2d_forward(kern, bias, x, y);
    Grid yref = naive_conv2d(kern, bias, x);
    REQUIRE(y.size() == yref.size());
    for (size_t i = 0; i < y.size(); ++i) {
      CHECK(y.v[i] == doctest::Approx(yref.v[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("1x1 conv equals a dense layer per pixel") {
  Rng rng(105);
  const int ci = 7, co = 40;
  ParamTensor kern({co, ci, 1, 1}), bias({co});
  randomize(kern, rng);
  randomize(bias, rng);
  Grid x(ci, 3, 4);
  for (double& v : x.v) v = random_vec(1, rng)[0];
  Grid y;
  conv2d_forward(kern, bias, x, y);
  std::vector<double> xv(ci), yv(co);
  for (size_t p = 0; p < x.plane(); ++p) {
    for (int i = 0; i < ci; ++i) xv[i] = x.chan(i)[p];
    dense_forward(kern.w.data(), bias.w.data(), co, ci, xv.data(), yv.data());
    for (int o = 0; o < co; ++o)
      CHECK(y.chan(o)[p] == doctest::Approx(yv[o]).epsilon(1e-14));
  }
}

TEST_CASE("conv2d backward against finite differences") {
  Rng rng(106);
  for (int k : {1, 3}) {
    CAPTURE(k);
    ParamTensor kern({2, 3, k, k}), bias({2});
    randomize(kern, rng);
    randomize(bias, rng);
    Grid x(3, 4, 5);
    for (double& v : x.v) v = random_vec(1, rng)[0];
    Grid y, gy, gx;
    auto loss = [&]() {
      conv2d_forward(kern, bias, x, y);
      double acc = 0.0;
      for (double v : y.v) acc += v * v;
      return acc;
    };
    loss();
    gy = y;
    for (size_t i = 0; i < gy.size(); ++i) gy.v[i] = 2.0 * y.v[i];
    kern.zero_grad();
    bias.zero_grad();
    conv2d_backward(kern, bias, x, gy, gx);
    std::vector<GradCheck> checks = {
        {kern.w.data(), kern.g.data(), kern.size()},
        {bias.w.data(), bias.g.data(), bias.size()},
        {x.v.data(), gx.v.data(), x.size()}};
    CHECK(max_fd_rel_err(loss, checks) < 1e-4);
  }
}

TEST_CASE("transposed convolution matches the scatter oracle") {
  Rng rng(107);
  std::vector<double> kern = random_vec(64, rng);
  for (auto [h, w] : std::vector<std::pair<int, int>>{
           {1, 1}, {2, 3}, {4, 4}, {5, 7}, {8, 8}}) {
    // Target both the exact double and a ceil-halved parent shape.
    for (auto [th, tw] : std::vector<std::pair<int, int>>{
             {2 * h, 2 * w}, {2 * h - 1, 2 * w - 1}}) {
      if (th < 1 || tw < 1) continue;
      std::vector<double> x = random_vec(size_t(h) * w, rng);
      std::vector<double> y(size_t(th) * tw);
      tconv8s2_forward(kern.data(), x.data(), h, w, y.data(), th, tw);
      std::vector<double> yref =
          scatter_tconv8s2(kern.data(), x.data(), h, w, th, tw);
      for (size_t i = 0; i < y.size(); ++i) {
        CHECK(y[i] == doctest::Approx(yref[i]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("transposed convolution backward against finite differences") {
  Rng rng(108);
  const int h = 3, w = 4, th = 6, tw = 7;
  std::vector<double> kern = random_vec(64, rng);
  std::vector<double> x = random_vec(size_t(h) * w, rng);
  std::vector<double> y(size_t(th) * tw);
  auto loss = [&]() {
    tconv8s2_forward(kern.data(), x.data(), h, w, y.data(), th, tw);
    double acc = 0.0;
    for (double v : y) acc += v * v;
    return acc;
  };
  loss();
  std::vector<double> gy(y.size());
  for (size_t i = 0; i < y.size(); ++i) gy[i] = 2.0 * y[i];
  std::vector<double> gkern(64, 0.0), gx(x.size());
  tconv8s2_backward(kern.data(), gkern.data(), x.data(), h, w, gy.data(), th,
                    tw, gx.data());
  std::vector<GradCheck> checks = {{kern.data(), gkern.data(), kern.size()},
                                   {x.data(), gx.data(), x.size()}};
  CHECK(max_fd_rel_err(loss, checks) < 1e-4);
}

TEST_CASE("adam matches a scalar reference over many steps") {
  ParamTensor p({2});
  p.w = {1.0, -2.0};
  ScalarAdam ref0, ref1;
  double w0 = 1.0, w1 = -2.0;
  Rng rng(109);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 1; t <= 50; ++t) {
    p.g[0] = u(rng);
    p.g[1] = u(rng);
    REQUIRE(adam_step(p, 1e-2, t));
    ref0.step(w0, p.g[0], 1e-2, t);
    ref1.step(w1, p.g[1], 1e-2, t);
    CHECK(p.w[0] == doctest::Approx(w0).epsilon(1e-12));
    CHECK(p.w[1] == doctest::Approx(w1).epsilon(1e-12));
  }
}

TEST_CASE("adam first step moves by roughly lr regardless of gradient size") {
  for (double g : {1e-6, 1.0, 1e6}) {
    ParamTensor p({1});
    p.w[0] = 0.0;
    p.g[0] = g;
    REQUIRE(adam_step(p, 1e-2, 1));
    // mhat/sqrt(vhat) = sign(g) at t=1, up to the epsilon regularizer.
    CHECK(p.w[0] == doctest::Approx(-1e-2).epsilon(1e-4));
  }
}

TEST_CASE("adam rejects non-finite gradients and leaves state untouched") {
  ParamTensor p({2});
  p.w = {1.0, 2.0};
  p.g = {0.5, std::numeric_limits<double>::quiet_NaN()};
  CHECK_FALSE(adam_step(p, 1e-2, 1));
  CHECK(p.w[0] == 1.0);
  CHECK(p.w[1] == 2.0);
  CHECK(p.m[0] == 0.0);
  CHECK(p.v[0] == 0.0);
  p.g[1] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(adam_step(p, 1e-2, 1));
  CHECK(p.w[1] == 2.0);
}
