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

#ifndef OFIC_COMMON_HPP_
#define OFIC_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ofic {

// Malformed input: unreadable file, bad header, truncated stream.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss and retries were exhausted.
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse, e.g. backward before forward.
class contract_error : public std::logic_error {
 public:
  explicit contract_error(const std::string& msg) : std::logic_error(msg) {}
};

using Rng = std::mt19937_64;

// Decoder preset: kMain = 24-neighbor context, 40-wide synthesis, two
// residual layers; kLight = 12-neighbor context, 18-wide synthesis, one.
enum class CodecConfig : uint8_t { kMain = 0, kLight = 1 };

inline int arm_context_size(CodecConfig c) {
  return c == CodecConfig::kMain ? 24 : 12;
}

// Round to nearest, ties away from zero. lround matches that convention.
inline long quantize_round(double x) { return std::lround(x); }

// Solves A x = b for a 4x4 system by Gaussian elimination with partial
// pivoting. A and b are overwritten; the solution lands in x.
void solve4(double a[4][4], double b[4], double x[4]);

}  // namespace ofic

#endif  // OFIC_COMMON_HPP_
