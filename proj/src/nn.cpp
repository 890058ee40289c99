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

#include "ofic/nn.hpp"

#include <cmath>

#include "ofic/common.hpp"

namespace ofic {

void dense_forward(const double* w, const double* b, int out_n, int in_n,
                   const double* x, double* y) {
  // Strict ascending-index accumulation: deterministic, and shared by the
  // symbol coder on both the encode and decode side.
  for (int o = 0; o < out_n; ++o) {
    const double* wr = w + size_t(o) * in_n;
    double acc = b[o];
    for (int i = 0; i < in_n; ++i) acc += wr[i] * x[i];
    y[o] = acc;
  }
}

namespace {

// Output block small enough that the accumulators live in registers across
// the whole input loop.
template <int kOut>
void dense_fwd_fixed(const double* __restrict wt, const double* __restrict b,
                     int in_n, const double* __restrict x, size_t n,
                     double* __restrict y) {
  for (size_t r = 0; r < n; ++r) {
    const double* __restrict xr = x + r * in_n;
    double* __restrict yr = y + r * kOut;
    double acc[kOut];
    for (int o = 0; o < kOut; ++o) acc[o] = b[o];
    for (int i = 0; i < in_n; ++i) {
      const double xi = xr[i];
      const double* __restrict wti = wt + size_t(i) * kOut;
      for (int o = 0; o < kOut; ++o) acc[o] += xi * wti[o];
    }
    for (int o = 0; o < kOut; ++o) yr[o] = acc[o];
  }
}

}  // namespace

void dense_forward_batch(const double* w, const double* b, int out_n,
                         int in_n, const double* x, size_t n, double* y) {
  // Transposed weights make the inner loop contiguous over one sample's
  // outputs. Sums run in the same ascending input order as dense_forward;
  // results may still differ from it in the last bit where the compiler
  // fuses multiply-adds differently.
  std::vector<double> wt(size_t(in_n) * out_n);
  for (int o = 0; o < out_n; ++o)
    for (int i = 0; i < in_n; ++i)
      wt[size_t(i) * out_n + o] = w[size_t(o) * in_n + i];
  switch (out_n) {
    case 24:
      dense_fwd_fixed<24>(wt.data(), b, in_n, x, n, y);
      return;
    case 12:
      dense_fwd_fixed<12>(wt.data(), b, in_n, x, n, y);
      return;
    case 2:
      dense_fwd_fixed<2>(wt.data(), b, in_n, x, n, y);
      return;
    default:
      break;
  }
  for (size_t r = 0; r < n; ++r) {
    const double* xr = x + r * in_n;
    double* yr = y + r * out_n;
    for (int o = 0; o < out_n; ++o) yr[o] = b[o];
    for (int i = 0; i < in_n; ++i) {
      const double xi = xr[i];
      const double* wti = wt.data() + size_t(i) * out_n;
      for (int o = 0; o < out_n; ++o) yr[o] += xi * wti[o];
    }
  }
}

namespace {

// Input block sized so the input-gradient accumulator stays cached across
// the output loop.
template <int kIn>
void dense_bwd_fixed(const double* __restrict w, double* __restrict gw,
                     double* __restrict gb, int out_n,
                     const double* __restrict x, const double* __restrict gy,
                     size_t n, double* __restrict gx) {
  for (size_t r = 0; r < n; ++r) {
    const double* __restrict xr = x + r * kIn;
    const double* __restrict gyr = gy + r * out_n;
    double gacc[kIn] = {};
    for (int o = 0; o < out_n; ++o) {
      const double g = gyr[o];
      const double* __restrict wr = w + size_t(o) * kIn;
      double* __restrict gwr = gw + size_t(o) * kIn;
      gb[o] += g;
      for (int i = 0; i < kIn; ++i) {
        gwr[i] += g * xr[i];
        gacc[i] += g * wr[i];
      }
    }
    if (gx) {
      double* __restrict gxr = gx + r * kIn;
      for (int i = 0; i < kIn; ++i) gxr[i] = gacc[i];
    }
  }
}

}  // namespace

void dense_backward_batch(const double* w, double* gw, double* gb, int out_n,
                          int in_n, const double* x, const double* gy,
                          size_t n, double* gx) {
  switch (in_n) {
    case 24:
      dense_bwd_fixed<24>(w, gw, gb, out_n, x, gy, n, gx);
      return;
    case 12:
      dense_bwd_fixed<12>(w, gw, gb, out_n, x, gy, n, gx);
      return;
    default:
      break;
  }
  for (size_t r = 0; r < n; ++r) {
    const double* xr = x + r * in_n;
    const double* gyr = gy + r * out_n;
    double* gxr = gx ? gx + r * in_n : nullptr;
    if (gxr)
      for (int i = 0; i < in_n; ++i) gxr[i] = 0.0;
    for (int o = 0; o < out_n; ++o) {
      const double g = gyr[o];
      const double* wr = w + size_t(o) * in_n;
      double* gwr = gw + size_t(o) * in_n;
      gb[o] += g;
      for (int i = 0; i < in_n; ++i) gwr[i] += g * xr[i];
      if (gxr)
        for (int i = 0; i < in_n; ++i) gxr[i] += g * wr[i];
    }
  }
}

void relu_forward(double* x, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
}

void relu_backward(const double* pre, const double* gy, double* gx, size_t n) {
  for (size_t i = 0; i < n; ++i) gx[i] = pre[i] > 0.0 ? gy[i] : 0.0;
}

void conv2d_forward(const ParamTensor& kern, const ParamTensor& bias,
                    const Grid& x, Grid& y) {
  const int co = kern.shape[0], ci = kern.shape[1], k = kern.shape[2];
  const int pad = k / 2, h = x.h, w = x.w;
  if (x.c != ci) throw contract_error("conv2d: channel mismatch");
  if (y.c != co || y.h != h || y.w != w) y = Grid(co, h, w);
  if (k == 1) {
    // Channel planes are contiguous, so running pixels innermost turns the
    // layer into streaming multiply-adds. Pixel tiles keep every channel
    // slice cache resident while the taps revisit it. Per pixel the inputs
    // add in the same ascending order as a dense layer would.
    const size_t np = x.plane(), tile = 1024;
    for (size_t p0 = 0; p0 < np; p0 += tile) {
      const size_t nb = std::min(tile, np - p0);
      for (int o = 0; o < co; ++o) {
        double* __restrict yo = y.chan(o) + p0;
        const double bo = bias.w[o];
        for (size_t p = 0; p < nb; ++p) yo[p] = bo;
        for (int i = 0; i < ci; ++i) {
          const double kv = kern.w[size_t(o) * ci + i];
          const double* __restrict xi = x.chan(i) + p0;
          for (size_t p = 0; p < nb; ++p) yo[p] += kv * xi[p];
        }
      }
    }
    return;
  }
  if (k == 3) {
    // One sweep over the output: each output row gathers the three
    // neighbouring input rows of every channel while they are still hot.
    // Per pixel the taps add in the same (i, ky, kx) order as the generic
    // path below.
    for (int o = 0; o < co; ++o) {
      double* yo = y.chan(o);
      const double bo = bias.w[o];
      const double* ko = kern.w.data() + size_t(o) * ci * 9;
      for (int py = 0; py < h; ++py) {
        double* __restrict yrow = yo + size_t(py) * w;
        for (int px = 0; px < w; ++px) yrow[px] = bo;
        for (int i = 0; i < ci; ++i) {
          const double* xi = x.chan(i);
          const double* ki = ko + size_t(i) * 9;
          for (int ky = 0; ky < 3; ++ky) {
            const int sy = py + ky - 1;
            if (sy < 0 || sy >= h) continue;
            const double* xrow = xi + size_t(sy) * w;
            for (int kx = 0; kx < 3; ++kx) {
              const double kv = ki[ky * 3 + kx];
              const int x0 = std::max(0, 1 - kx), x1 = std::min(w, w + 1 - kx);
              const double* __restrict xs = xrow + (kx - 1);
              for (int px = x0; px < x1; ++px) yrow[px] += kv * xs[px];
            }
          }
        }
      }
    }
    return;
  }
  // Row-wise accumulation: for each kernel tap, add a shifted input row into
  // the output row. The x-range clamp keeps the inner loop branch-free.
  for (int o = 0; o < co; ++o) {
    double* yo = y.chan(o);
    const double bo = bias.w[o];
    for (size_t p = 0; p < x.plane(); ++p) yo[p] = bo;
    const double* ko = kern.w.data() + size_t(o) * ci * k * k;
    for (int i = 0; i < ci; ++i) {
      const double* xi = x.chan(i);
      const double* ki = ko + size_t(i) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double kv = ki[ky * k + kx];
          const int x0 = std::max(0, pad - kx), x1 = std::min(w, w + pad - kx);
          for (int py = 0; py < h; ++py) {
            const int sy = py + ky - pad;
            if (sy < 0 || sy >= h) continue;
            double* __restrict yrow = yo + size_t(py) * w;
            const double* __restrict xrow = xi + size_t(sy) * w + (kx - pad);
            for (int px = x0; px < x1; ++px) yrow[px] += kv * xrow[px];
          }
        }
      }
    }
  }
}

namespace {

// Eight fixed partial sums: lets the compiler vectorize the reduction while
// keeping the summation order independent of the surrounding code.
inline double reduce_dot(const double* a, const double* b, size_t n) {
  double lane[8] = {};
  size_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int l = 0; l < 8; ++l) lane[l] += a[p + l] * b[p + l];
  for (; p < n; ++p) lane[p % 8] += a[p] * b[p];
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
         ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

inline double reduce_sum(const double* a, size_t n) {
  double lane[8] = {};
  size_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int l = 0; l < 8; ++l) lane[l] += a[p + l];
  for (; p < n; ++p) lane[p % 8] += a[p];
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
         ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

}  // namespace

void conv2d_backward(ParamTensor& kern, ParamTensor& bias, const Grid& x,
                     const Grid& gy, Grid& gx) {
  const int co = kern.shape[0], ci = kern.shape[1], k = kern.shape[2];
  const int pad = k / 2, h = x.h, w = x.w;
  if (gx.c != ci || gx.h != h || gx.w != w) gx = Grid(ci, h, w);
  std::fill(gx.v.begin(), gx.v.end(), 0.0);
  if (k == 1) {
    // Pixel tiles keep each gy slice in cache across all input channels.
    const size_t np = x.plane(), tile = 1024;
    for (size_t p0 = 0; p0 < np; p0 += tile) {
      const size_t nb = std::min(tile, np - p0);
      for (int o = 0; o < co; ++o) {
        const double* g = gy.chan(o) + p0;
        bias.g[o] += reduce_sum(g, nb);
        for (int i = 0; i < ci; ++i)
          kern.g[size_t(o) * ci + i] += reduce_dot(g, x.chan(i) + p0, nb);
      }
      for (int i = 0; i < ci; ++i) {
        double* __restrict gxi = gx.chan(i) + p0;
        for (int o = 0; o < co; ++o) {
          const double kv = kern.w[size_t(o) * ci + i];
          const double* __restrict g = gy.chan(o) + p0;
          for (size_t p = 0; p < nb; ++p) gxi[p] += kv * g[p];
        }
      }
    }
    return;
  }
  if (k == 3) {
    // Row sweep with all nine taps fused: the three input and gradient rows
    // a given output row touches stay cache resident across taps.
    for (int o = 0; o < co; ++o) {
      const double* gyo = gy.chan(o);
      bias.g[o] += reduce_sum(gyo, gy.plane());
      for (int i = 0; i < ci; ++i) {
        const double* xi = x.chan(i);
        double* gxi = gx.chan(i);
        const size_t kbase = (size_t(o) * ci + i) * 9;
        double gk[9] = {};
        for (int py = 0; py < h; ++py) {
          const double* __restrict grow = gyo + size_t(py) * w;
          for (int ky = 0; ky < 3; ++ky) {
            const int sy = py + ky - 1;
            if (sy < 0 || sy >= h) continue;
            const double* xrow = xi + size_t(sy) * w;
            double* gxrow = gxi + size_t(sy) * w;
            for (int kx = 0; kx < 3; ++kx) {
              const double kv = kern.w[kbase + ky * 3 + kx];
              const int x0 = std::max(0, 1 - kx), x1 = std::min(w, w + 1 - kx);
              gk[ky * 3 + kx] +=
                  reduce_dot(grow + x0, xrow + (kx - 1) + x0, size_t(x1 - x0));
              double* __restrict gxs = gxrow + (kx - 1);
              for (int px = x0; px < x1; ++px) gxs[px] += grow[px] * kv;
            }
          }
        }
        for (int t = 0; t < 9; ++t) kern.g[kbase + t] += gk[t];
      }
    }
    return;
  }
  for (int o = 0; o < co; ++o) {
    const double* gyo = gy.chan(o);
    double acc = 0.0;
    for (size_t p = 0; p < gy.plane(); ++p) acc += gyo[p];
    bias.g[o] += acc;
    for (int i = 0; i < ci; ++i) {
      const double* xi = x.chan(i);
      double* gxi = gx.chan(i);
      const size_t kbase = (size_t(o) * ci + i) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double kv = kern.w[kbase + ky * k + kx];
          double gk = 0.0;
          for (int py = 0; py < h; ++py) {
            const int sy = py + ky - pad;
            if (sy < 0 || sy >= h) continue;
            const int x0 = std::max(0, pad - kx), x1 = std::min(w, w + pad - kx);
            const double* __restrict grow = gyo + size_t(py) * w;
            const double* __restrict xrow = xi + size_t(sy) * w + (kx - pad);
            double* __restrict gxrow = gxi + size_t(sy) * w + (kx - pad);
            gk += reduce_dot(grow + x0, xrow + x0, size_t(x1 - x0));
            for (int px = x0; px < x1; ++px) gxrow[px] += grow[px] * kv;
          }
          kern.g[kbase + ky * k + kx] += gk;
        }
      }
    }
  }
}

void tconv8s2_forward(const double* kern, const double* x, int h, int w,
                      double* y, int th, int tw) {
  // Full output index fy = ty + 4; contributing rows iy = (fy - ky) / 2 for
  // the four kernel rows ky with fy parity.
  for (int ty = 0; ty < th; ++ty) {
    const int fy = ty + 4;
    for (int tx = 0; tx < tw; ++tx) {
      const int fx = tx + 4;
      double acc = 0.0;
      for (int ky = fy & 1; ky < 8; ky += 2) {
        const int iy = (fy - ky) >> 1;
        if (iy < 0 || iy >= h) continue;
        const double* krow = kern + ky * 8;
        const double* xrow = x + size_t(iy) * w;
        for (int kx = fx & 1; kx < 8; kx += 2) {
          const int ix = (fx - kx) >> 1;
          if (ix < 0 || ix >= w) continue;
          acc += krow[kx] * xrow[ix];
        }
      }
      y[size_t(ty) * tw + tx] = acc;
    }
  }
}

void tconv8s2_backward(const double* kern, double* gkern, const double* x,
                       int h, int w, const double* gy, int th, int tw,
                       double* gx) {
  for (size_t i = 0; i < size_t(h) * w; ++i) gx[i] = 0.0;
  for (int ty = 0; ty < th; ++ty) {
    const int fy = ty + 4;
    for (int tx = 0; tx < tw; ++tx) {
      const int fx = tx + 4;
      const double g = gy[size_t(ty) * tw + tx];
      if (g == 0.0) continue;
      for (int ky = fy & 1; ky < 8; ky += 2) {
        const int iy = (fy - ky) >> 1;
        if (iy < 0 || iy >= h) continue;
        for (int kx = fx & 1; kx < 8; kx += 2) {
          const int ix = (fx - kx) >> 1;
          if (ix < 0 || ix >= w) continue;
          const size_t xi = size_t(iy) * w + ix;
          gkern[ky * 8 + kx] += g * x[xi];
          gx[xi] += g * kern[ky * 8 + kx];
        }
      }
    }
  }
}

bool adam_step(ParamTensor& p, double lr, int64_t t, const AdamConfig& cfg) {
  for (double g : p.g)
    if (!std::isfinite(g)) return false;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(t));
  for (size_t i = 0; i < p.w.size(); ++i) {
    const double g = p.g[i];
    p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
    p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = p.m[i] / c1;
    const double vhat = p.v[i] / c2;
    p.w[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  return true;
}

}  // namespace ofic
