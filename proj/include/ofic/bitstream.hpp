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

#ifndef OFIC_BITSTREAM_HPP_
#define OFIC_BITSTREAM_HPP_

#include <cstdint>
#include <vector>

#include "ofic/common.hpp"

namespace ofic {

// Container layout (little-endian, see FORMAT.md):
//   "oFiC" magic, version byte, height u16, width u16, config u8, levels u8,
//   three network entries {step exponent u8, scale u16, length u32} in the
//   order context model / upsampler / synthesis, ceil(levels/8) zero-flag
//   bytes (LSB first), one u32 payload length per level, then the payload
//   streams in header order.
constexpr uint8_t kMagic[4] = {'o', 'F', 'i', 'C'};
constexpr uint8_t kFormatVersion = 1;

struct NetStreamInfo {
  uint8_t q = 0;          // weight step is 2^-q
  uint16_t scale_fp = 0;  // Laplace scale of the weight ints, 1/16 units
  uint32_t length = 0;    // payload bytes
};

struct ContainerHeader {
  uint16_t height = 0, width = 0;
  CodecConfig config = CodecConfig::kMain;
  uint8_t levels = 0;
  NetStreamInfo net[3];  // arm, upsampler, synthesis
  std::vector<uint8_t> zero_flag;     // one entry per level, 0 or 1
  std::vector<uint32_t> level_length;  // payload bytes per level

  size_t byte_size() const;
};

void serialize_header(const ContainerHeader& h, std::vector<uint8_t>& out);
// Reads from the front of data; returns the header and sets consumed.
ContainerHeader parse_header(const uint8_t* data, size_t size,
                             size_t* consumed);

}  // namespace ofic

#endif  // OFIC_BITSTREAM_HPP_
