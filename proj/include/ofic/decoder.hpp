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

#ifndef OFIC_DECODER_HPP_
#define OFIC_DECODER_HPP_

#include <cstdint>
#include <vector>

#include "ofic/arm.hpp"
#include "ofic/bitstream.hpp"
#include "ofic/image.hpp"
#include "ofic/synthesis.hpp"
#include "ofic/upsampler.hpp"

namespace ofic {

struct CodecNets {
  ArmNet arm;
  Upsampler ups;
  SynthNet synth;
};

// Tensor enumeration order shared by the weight coder on both sides.
std::vector<ParamTensor*> arm_param_list(ArmNet& net);
std::vector<ParamTensor*> ups_param_list(Upsampler& ups);
std::vector<ParamTensor*> synth_param_list(SynthNet& net);

// Integer latents through the upsampler and synthesis. The result is RGB on
// the image grid, before the [0, 1] clamp of the 8-bit mapping.
Grid reconstruct(const CodecNets& nets, const std::vector<IntGrid>& latents,
                 int h, int w);

struct DecodeResult {
  ContainerHeader header;
  ImageU8 image;
};

DecodeResult decode_stream(const uint8_t* data, size_t size);
DecodeResult decode_stream(const std::vector<uint8_t>& data);

}  // namespace ofic

#endif  // OFIC_DECODER_HPP_
