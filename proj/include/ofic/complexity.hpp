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

#ifndef OFIC_COMPLEXITY_HPP_
#define OFIC_COMPLEXITY_HPP_

#include "ofic/common.hpp"

namespace ofic {

// Decoder multiplies per decoded pixel. Counting convention: one multiply is
// one MAC; biases, additions and activations are free; border taps count as
// if the kernel were fully applied.
struct ComplexityReport {
  double arm = 0.0;
  double upsampling = 0.0;
  double synthesis = 0.0;
  double total() const { return arm + upsampling + synthesis; }
};

// With h, w > 0 the per-level sample counts are exact (ceil-halved shapes);
// with h = w = 0 each level l is taken to hold 4^-l of the pixels (the
// dyadic limit used for reporting).
ComplexityReport count_macs(CodecConfig cfg, int levels, int h = 0, int w = 0);

}  // namespace ofic

#endif  // OFIC_COMPLEXITY_HPP_
