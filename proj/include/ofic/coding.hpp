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

#ifndef OFIC_CODING_HPP_
#define OFIC_CODING_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ofic/arm.hpp"
#include "ofic/grid.hpp"

namespace ofic {

// Coded alphabet: the values -256..255 map to symbols 0..511; symbol 512 is
// an escape followed by the value as a raw 16-bit offset integer.
constexpr int kAlphabetLo = -256;
constexpr int kAlphabetHi = 255;
constexpr int kEscapeSym = 512;
constexpr int kNumSymbols = 513;

// Cumulative 16-bit frequencies, cum[0] = 0, cum[513] = 65536, strictly
// increasing. Built identically on both codec sides from (mu, b).
struct SymbolCdf {
  std::array<uint32_t, kNumSymbols + 1> cum;
};

void build_cdf(double mu, double b, SymbolCdf& cdf);

struct StreamResult {
  size_t bytes = 0;
  double est_bits = 0.0;  // model cost of the coded symbols, floored
};

// One latent plane, raster order, contexts over previously coded values.
StreamResult encode_plane(const ArmNet& net, const IntGrid& g,
                          std::vector<uint8_t>& out);
// level_index only labels errors.
void decode_plane(const ArmNet& net, IntGrid& g, const uint8_t* data,
                  size_t len, int level_index);

// Network weight streams: one zero-mean Laplace model per network whose
// scale is the mean absolute integerized weight, stored in the header as a
// 1/16-step fixed-point value.
uint16_t weight_scale_fp(const std::vector<int32_t>& ints);
StreamResult encode_weights(const std::vector<int32_t>& ints,
                            uint16_t scale_fp, std::vector<uint8_t>& out);
std::vector<int32_t> decode_weights(size_t count, uint16_t scale_fp,
                                    const uint8_t* data, size_t len);
double weight_rate_bits(const std::vector<int32_t>& ints, uint16_t scale_fp);

// Step quantization of a network's tensors to 2^-q.
std::vector<int32_t> quantize_weight_ints(
    const std::vector<ParamTensor*>& params, int q);
void load_weight_ints(const std::vector<ParamTensor*>& params,
                      const std::vector<int32_t>& ints, int q);

constexpr int kQMin = 4, kQMax = 12;

struct QuantizedNet {
  int q = kQMin;
  uint16_t scale_fp = 1;
  std::vector<int32_t> ints;
  double est_bits = 0.0;
};

// Requantizes the tensors at every step 2^-q, q in {kQMin..kQMax}, scoring
// eval() + lambda * weight_bits(q) / pixels with the candidate loaded, and
// keeps the argmin (ties take the smaller q). eval() must measure the rest
// of the RD objective under the currently loaded weights. On return the
// tensors hold the winning dequantized weights. Steps where a weight leaves
// the 16-bit escape range are skipped.
QuantizedNet quantize_network(const std::vector<ParamTensor*>& params,
                              double lambda, size_t pixels,
                              const std::function<double()>& eval);

}  // namespace ofic

#endif  // OFIC_CODING_HPP_
