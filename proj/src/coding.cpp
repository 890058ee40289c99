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

#include "ofic/coding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ofic/rc.hpp"

namespace ofic {

namespace {

constexpr int kRawLo = -32768, kRawHi = 32767;

// Uniform model for the raw 16-bit escape payload, one byte per symbol.
inline void encode_uniform_byte(RangeEncoder& rc, uint32_t byte) {
  rc.encode(byte * 256, 256);
}

inline uint32_t decode_uniform_byte(RangeDecoder& rc) {
  const uint32_t byte = rc.target() / 256;
  rc.advance(byte * 256, 256);
  return byte;
}

}  // namespace

void build_cdf(double mu, double b, SymbolCdf& cdf) {
  // Laplace CDF at the half-integer stops x_k = -256.5 + k, k = 0..512,
  // built by geometric recurrence outward from the bin containing mu. The
  // recurrence underflows to zero in the far tails, which the per-symbol
  // count floor absorbs.
  double F[kNumSymbols + 1];
  double p[kNumSymbols];
  if (!std::isfinite(mu) || !(b > 0.0) || !std::isfinite(b)) {
    // Degenerate model: flat distribution keeps the coder well defined.
    for (int s = 0; s <= kNumSymbols; ++s)
      cdf.cum[s] = uint32_t((uint64_t(kRcTotal) * s) / kNumSymbols);
    return;
  }
  const double t = std::exp(-1.0 / b);
  const int kc = std::clamp(int(std::floor(mu + 256.5)), -1, kNumSymbols);
  if (kc >= 0) {
    const int k0 = std::min(kc, kNumSymbols);
    F[k0] = 0.5 * std::exp(((kAlphabetLo - 0.5 + k0) - mu) / b);
    for (int k = k0 - 1; k >= 0; --k) F[k] = F[k + 1] * t;
  }
  if (kc < kNumSymbols) {
    const int k1 = kc + 1;
    double g = 0.5 * std::exp(-((kAlphabetLo - 0.5 + k1) - mu) / b);
    F[k1] = 1.0 - g;
    for (int k = k1 + 1; k <= kNumSymbols; ++k) {
      g *= t;
      F[k] = 1.0 - g;
    }
  }
  double mass = 0.0;
  for (int k = 0; k < kNumSymbols - 1; ++k) {
    p[k] = std::clamp(F[k + 1] - F[k], 0.0, 1.0);
    mass += p[k];
  }
  p[kEscapeSym] = std::clamp(1.0 - mass, 0.0, 1.0);

  const double budget = double(kRcTotal - kNumSymbols);
  uint32_t f[kNumSymbols];
  int64_t sum = 0;
  int argmax = 0;
  for (int s = 0; s < kNumSymbols; ++s) {
    f[s] = uint32_t(std::floor(p[s] * budget)) + 1;
    sum += f[s];
    if (p[s] > p[argmax]) argmax = s;
  }
  // Rounding can leave the sum a few counts off 2^16 in either direction;
  // the mode absorbs the difference.
  const int64_t r = int64_t(kRcTotal) - sum;
  if (int64_t(f[argmax]) + r < 1)
    throw contract_error("build_cdf: mass normalization failed");
  f[argmax] = uint32_t(int64_t(f[argmax]) + r);
  cdf.cum[0] = 0;
  for (int s = 0; s < kNumSymbols; ++s) cdf.cum[s + 1] = cdf.cum[s] + f[s];
}

namespace {

// Shared symbol emit: regular alphabet or escape plus raw 16-bit offset.
void encode_symbol(RangeEncoder& rc, const SymbolCdf& cdf, int32_t v) {
  if (v >= kAlphabetLo && v <= kAlphabetHi) {
    const int s = v - kAlphabetLo;
    rc.encode(cdf.cum[s], cdf.cum[s + 1] - cdf.cum[s]);
    return;
  }
  if (v < kRawLo || v > kRawHi)
    throw data_error("coded value outside the 16-bit escape range");
  rc.encode(cdf.cum[kEscapeSym], cdf.cum[kEscapeSym + 1] - cdf.cum[kEscapeSym]);
  const uint32_t u = uint32_t(v - kRawLo);
  encode_uniform_byte(rc, u >> 8);
  encode_uniform_byte(rc, u & 0xFF);
}

int32_t decode_symbol(RangeDecoder& rc, const SymbolCdf& cdf) {
  const uint32_t tgt = rc.target();
  const auto it = std::upper_bound(cdf.cum.begin(), cdf.cum.end(), tgt);
  const int s = int(it - cdf.cum.begin()) - 1;
  rc.advance(cdf.cum[s], cdf.cum[s + 1] - cdf.cum[s]);
  if (s != kEscapeSym) return int32_t(s) + kAlphabetLo;
  const uint32_t hi = decode_uniform_byte(rc);
  const uint32_t lo = decode_uniform_byte(rc);
  return int32_t((hi << 8) | lo) + kRawLo;
}

}  // namespace

StreamResult encode_plane(const ArmNet& net, const IntGrid& g,
                          std::vector<uint8_t>& out) {
  const ContextTemplate& tpl = context_template(net.c);
  const size_t start = out.size();
  RangeEncoder rc(out);
  SymbolCdf cdf;
  double ctx[32];
  StreamResult res;
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      extract_context_int(g, y, x, tpl, ctx);
      const LaplaceParams lp = arm_forward(net, ctx);
      const int32_t v = g.at(y, x);
      res.est_bits += laplace_rate_bits(double(v), lp.mu, lp.b);
      build_cdf(lp.mu, lp.b, cdf);
      encode_symbol(rc, cdf, v);
    }
  }
  rc.flush();
  res.bytes = out.size() - start;
  return res;
}

void decode_plane(const ArmNet& net, IntGrid& g, const uint8_t* data,
                  size_t len, int level_index) {
  const ContextTemplate& tpl = context_template(net.c);
  RangeDecoder rc(data, len);
  SymbolCdf cdf;
  double ctx[32];
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      extract_context_int(g, y, x, tpl, ctx);
      const LaplaceParams lp = arm_forward(net, ctx);
      build_cdf(lp.mu, lp.b, cdf);
      g.at(y, x) = decode_symbol(rc, cdf);
    }
  }
  if (rc.overrun())
    throw data_error("latent stream truncated (level " +
                     std::to_string(level_index) + ")");
  if (rc.consumed() != len)
    throw data_error("latent stream length mismatch (level " +
                     std::to_string(level_index) + ")");
}

uint16_t weight_scale_fp(const std::vector<int32_t>& ints) {
  if (ints.empty()) throw contract_error("weight_scale_fp: empty network");
  double acc = 0.0;
  for (int32_t v : ints) acc += std::abs(double(v));
  const double mean = acc / double(ints.size());
  const long fp = std::lround(mean * 16.0);
  return uint16_t(std::clamp(fp, 1l, 65535l));
}

StreamResult encode_weights(const std::vector<int32_t>& ints,
                            uint16_t scale_fp, std::vector<uint8_t>& out) {
  const size_t start = out.size();
  RangeEncoder rc(out);
  SymbolCdf cdf;
  const double b = scale_fp / 16.0;
  build_cdf(0.0, b, cdf);
  StreamResult res;
  for (int32_t v : ints) {
    res.est_bits += laplace_rate_bits(double(v), 0.0, b);
    encode_symbol(rc, cdf, v);
  }
  rc.flush();
  res.bytes = out.size() - start;
  return res;
}

std::vector<int32_t> decode_weights(size_t count, uint16_t scale_fp,
                                    const uint8_t* data, size_t len) {
  RangeDecoder rc(data, len);
  SymbolCdf cdf;
  build_cdf(0.0, scale_fp / 16.0, cdf);
  std::vector<int32_t> ints(count);
  for (size_t i = 0; i < count; ++i) ints[i] = decode_symbol(rc, cdf);
  if (rc.overrun()) throw data_error("weight stream truncated");
  if (rc.consumed() != len) throw data_error("weight stream length mismatch");
  return ints;
}

double weight_rate_bits(const std::vector<int32_t>& ints, uint16_t scale_fp) {
  const double b = scale_fp / 16.0;
  double bits = 0.0;
  for (int32_t v : ints) bits += laplace_rate_bits(double(v), 0.0, b);
  return bits;
}

std::vector<int32_t> quantize_weight_ints(
    const std::vector<ParamTensor*>& params, int q) {
  const double step_inv = std::ldexp(1.0, q);
  std::vector<int32_t> ints;
  for (const ParamTensor* p : params)
    for (double w : p->w) ints.push_back(int32_t(quantize_round(w * step_inv)));
  return ints;
}

void load_weight_ints(const std::vector<ParamTensor*>& params,
                      const std::vector<int32_t>& ints, int q) {
  const double step = std::ldexp(1.0, -q);
  size_t i = 0;
  for (ParamTensor* p : params) {
    for (double& w : p->w) w = double(ints[i++]) * step;
  }
  if (i != ints.size()) throw contract_error("load_weight_ints: count mismatch");
}

QuantizedNet quantize_network(const std::vector<ParamTensor*>& params,
                              double lambda, size_t pixels,
                              const std::function<double()>& eval) {
  std::vector<std::vector<double>> orig;
  orig.reserve(params.size());
  for (const ParamTensor* p : params) orig.push_back(p->w);

  QuantizedNet best;
  double best_obj = 0.0;
  bool have = false;
  for (int q = kQMin; q <= kQMax; ++q) {
    std::vector<int32_t> ints = quantize_weight_ints(params, q);
    const bool fits = std::all_of(ints.begin(), ints.end(), [](int32_t v) {
      return v >= kRawLo && v <= kRawHi;
    });
    if (!fits) continue;
    load_weight_ints(params, ints, q);
    const uint16_t sfp = weight_scale_fp(ints);
    const double wbits = weight_rate_bits(ints, sfp);
    const double obj = eval() + lambda * wbits / double(pixels);
    if (!have || obj < best_obj) {
      best.q = q;
      best.scale_fp = sfp;
      best.ints = std::move(ints);
      best.est_bits = wbits;
      best_obj = obj;
      have = true;
    }
    for (size_t i = 0; i < params.size(); ++i) params[i]->w = orig[i];
  }
  if (!have) throw data_error("network weights exceed every coder step");
  load_weight_ints(params, best.ints, best.q);
  return best;
}

}  // namespace ofic
