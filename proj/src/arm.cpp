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

#include "ofic/arm.hpp"

#include <cmath>

#include "ofic/nn.hpp"

namespace ofic {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr int kMaxContext = 24;

// Nearest causal neighbors first: left in the current row, then the rows
// above ordered by distance, center outward within a row.
const int kCtx24[24][2] = {
    {0, -1},  {0, -2},  {0, -3},  {-1, 0},  {-1, -1}, {-1, 1},
    {-1, -2}, {-1, 2},  {-1, -3}, {-1, 3},  {-2, 0},  {-2, -1},
    {-2, 1},  {-2, -2}, {-2, 2},  {-2, -3}, {-2, 3},  {-3, 0},
    {-3, -1}, {-3, 1},  {-3, -2}, {-3, 2},  {-3, -3}, {-3, 3},
};

const int kCtx12[12][2] = {
    {0, -1},  {0, -2}, {-1, 0},  {-1, -1}, {-1, 1},  {-1, -2},
    {-1, 2},  {-2, 0}, {-2, -1}, {-2, 1},  {-2, -2}, {-2, 2},
};

const ContextTemplate kTpl24{24, kCtx24};
const ContextTemplate kTpl12{12, kCtx12};

}  // namespace

double laplace_cdf(double x, double mu, double b) {
  const double d = x - mu;
  if (d < 0.0) return 0.5 * std::exp(d / b);
  return 1.0 - 0.5 * std::exp(-d / b);
}

double laplace_bin_prob(double y, double mu, double b) {
  return laplace_cdf(y + 0.5, mu, b) - laplace_cdf(y - 0.5, mu, b);
}

double laplace_rate_bits(double y, double mu, double b) {
  return -std::log2(std::max(laplace_bin_prob(y, mu, b), kProbFloor));
}

const ContextTemplate& context_template(int n) {
  if (n == 24) return kTpl24;
  if (n == 12) return kTpl12;
  throw contract_error("context_template: unsupported size");
}

void extract_context(const double* plane, int /*h*/, int w, int y, int x,
                     const ContextTemplate& tpl, double* ctx) {
  // Offsets are causal (dy <= 0), so only the top edge can fall outside.
  for (int j = 0; j < tpl.n; ++j) {
    const int sy = y + tpl.off[j][0], sx = x + tpl.off[j][1];
    ctx[j] = (sy >= 0 && sx >= 0 && sx < w) ? plane[size_t(sy) * w + sx] : 0.0;
  }
}

void extract_context_int(const IntGrid& g, int y, int x,
                         const ContextTemplate& tpl, double* ctx) {
  for (int j = 0; j < tpl.n; ++j) {
    const int sy = y + tpl.off[j][0], sx = x + tpl.off[j][1];
    ctx[j] = (sy >= 0 && sx >= 0 && sx < g.w) ? double(g.v[size_t(sy) * g.w + sx])
                                              : 0.0;
  }
}

ArmNet init_arm(int c, Rng& rng) {
  context_template(c);  // validates the size
  ArmNet net;
  net.c = c;
  net.w1 = ParamTensor({c, c});
  net.b1 = ParamTensor({c});
  net.w2 = ParamTensor({c, c});
  net.b2 = ParamTensor({c});
  net.w3 = ParamTensor({2, c});
  net.b3 = ParamTensor({2});
  const double s = std::sqrt(1.0 / c);
  std::uniform_real_distribution<double> u(-s, s);
  for (double& v : net.w1.w) v = u(rng);
  for (double& v : net.w2.w) v = u(rng);
  for (double& v : net.w3.w) v = u(rng);
  return net;
}

LaplaceParams arm_forward(const ArmNet& net, const double* ctx) {
  double h1[kMaxContext], h2[kMaxContext], out[2];
  dense_forward(net.w1.w.data(), net.b1.w.data(), net.c, net.c, ctx, h1);
  relu_forward(h1, net.c);
  dense_forward(net.w2.w.data(), net.b2.w.data(), net.c, net.c, h1, h2);
  relu_forward(h2, net.c);
  dense_forward(net.w3.w.data(), net.b3.w.data(), 2, net.c, h2, out);
  return {out[0], std::max(std::exp(out[1]), kScaleMin)};
}

namespace {

// Shared rate + per-sample derivative pieces. Returns bits for one sample
// given its (mu, raw scale) head outputs and symbol y.
struct RatePieces {
  double bits, dmu, draw, dsym;
};

inline RatePieces rate_and_grads(double y, double mu, double raw) {
  const double eb = std::exp(raw);
  const double b = std::max(eb, kScaleMin);
  const bool clamped = eb < kScaleMin;
  const double hi = y + 0.5 - mu, lo = y - 0.5 - mu;
  const double ehi = std::exp(-std::fabs(hi) / b);
  const double elo = std::exp(-std::fabs(lo) / b);
  const double fhi = hi < 0.0 ? 0.5 * ehi : 1.0 - 0.5 * ehi;
  const double flo = lo < 0.0 ? 0.5 * elo : 1.0 - 0.5 * elo;
  const double p = fhi - flo;
  RatePieces r{};
  if (p > kProbFloor) {
    const double pdf_hi = ehi / (2.0 * b), pdf_lo = elo / (2.0 * b);
    const double dbits_dp = -1.0 / (p * kLn2);
    r.bits = -std::log2(p);
    r.dmu = dbits_dp * (pdf_lo - pdf_hi);
    r.dsym = dbits_dp * (pdf_hi - pdf_lo);
    // dp/db times db/draw = b; the b factors cancel.
    r.draw = clamped ? 0.0 : dbits_dp * (lo * pdf_lo - hi * pdf_hi);
  } else {
    // Floored region is flat; a NaN p still propagates through log2.
    r.bits = -std::log2(std::max(p, kProbFloor));
  }
  return r;
}

}  // namespace

double arm_plane_rate_bits(const ArmNet& net, const Grid& plane,
                           ArmWorkspace& ws) {
  const ContextTemplate& tpl = context_template(net.c);
  const size_t n = plane.plane();
  const int c = net.c;
  ws.n = n;
  ws.h = plane.h;
  ws.w = plane.w;
  ws.ctx.resize(n * c);
  ws.h1p.resize(n * c);
  ws.h1.resize(n * c);
  ws.h2p.resize(n * c);
  ws.h2.resize(n * c);
  ws.out.resize(n * 2);
  ws.gmu.resize(n);
  ws.gb_raw.resize(n);
  ws.gsym.resize(n);
  const double* pv = plane.v.data();
  for (int y = 0; y < plane.h; ++y)
    for (int x = 0; x < plane.w; ++x)
      extract_context(pv, plane.h, plane.w, y, x, tpl,
                      ws.ctx.data() + (size_t(y) * plane.w + x) * c);
  dense_forward_batch(net.w1.w.data(), net.b1.w.data(), c, c, ws.ctx.data(), n,
                      ws.h1p.data());
  ws.h1 = ws.h1p;
  relu_forward(ws.h1.data(), n * c);
  dense_forward_batch(net.w2.w.data(), net.b2.w.data(), c, c, ws.h1.data(), n,
                      ws.h2p.data());
  ws.h2 = ws.h2p;
  relu_forward(ws.h2.data(), n * c);
  dense_forward_batch(net.w3.w.data(), net.b3.w.data(), 2, c, ws.h2.data(), n,
                      ws.out.data());
  double bits = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const RatePieces r = rate_and_grads(pv[i], ws.out[2 * i], ws.out[2 * i + 1]);
    bits += r.bits;
    ws.gmu[i] = r.dmu;
    ws.gb_raw[i] = r.draw;
    ws.gsym[i] = r.dsym;
  }
  ws.has_forward = true;
  return bits;
}

double arm_plane_rate_bits_eval(const ArmNet& net, const Grid& plane) {
  const ContextTemplate& tpl = context_template(net.c);
  double ctx[kMaxContext];
  double bits = 0.0;
  for (int y = 0; y < plane.h; ++y) {
    for (int x = 0; x < plane.w; ++x) {
      extract_context(plane.v.data(), plane.h, plane.w, y, x, tpl, ctx);
      const LaplaceParams lp = arm_forward(net, ctx);
      bits += laplace_rate_bits(plane.at(0, y, x), lp.mu, lp.b);
    }
  }
  return bits;
}

void arm_plane_rate_backward(ArmNet& net, ArmWorkspace& ws, double upstream,
                             Grid& gplane) {
  if (!ws.has_forward)
    throw contract_error("arm_plane_rate_backward: no recorded forward");
  const int c = net.c;
  const size_t n = ws.n;
  const ContextTemplate& tpl = context_template(c);
  ws.gout.resize(n * 2);
  ws.gh.resize(n * c);
  ws.gctx.resize(n * c);
  for (size_t i = 0; i < n; ++i) {
    ws.gout[2 * i] = upstream * ws.gmu[i];
    ws.gout[2 * i + 1] = upstream * ws.gb_raw[i];
  }
  dense_backward_batch(net.w3.w.data(), net.w3.g.data(), net.b3.g.data(), 2, c,
                       ws.h2.data(), ws.gout.data(), n, ws.gh.data());
  relu_backward(ws.h2p.data(), ws.gh.data(), ws.gh.data(), n * c);
  dense_backward_batch(net.w2.w.data(), net.w2.g.data(), net.b2.g.data(), c, c,
                       ws.h1.data(), ws.gh.data(), n, ws.gctx.data());
  relu_backward(ws.h1p.data(), ws.gctx.data(), ws.gctx.data(), n * c);
  dense_backward_batch(net.w1.w.data(), net.w1.g.data(), net.b1.g.data(), c, c,
                       ws.ctx.data(), ws.gctx.data(), n, ws.gh.data());
  // gh now holds d(bits)/d(ctx entries); scatter back onto the plane.
  if (gplane.c != 1 || gplane.h != ws.h || gplane.w != ws.w) {
    gplane = Grid(1, ws.h, ws.w);
  } else {
    std::fill(gplane.v.begin(), gplane.v.end(), 0.0);
  }
  double* gp = gplane.v.data();
  const int h = ws.h, w = ws.w;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = size_t(y) * w + x;
      gp[i] += upstream * ws.gsym[i];
      const double* gc = ws.gh.data() + i * c;
      for (int j = 0; j < c; ++j) {
        const int sy = y + tpl.off[j][0], sx = x + tpl.off[j][1];
        if (sy >= 0 && sx >= 0 && sx < w) gp[size_t(sy) * w + sx] += gc[j];
      }
    }
  }
  ws.has_forward = false;
}

}  // namespace ofic
