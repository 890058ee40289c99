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

#include "ofic/bitstream.hpp"

#include <cstring>
#include <string>

namespace ofic {
namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xFF));
  out.push_back(uint8_t(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

struct Reader {
  const uint8_t* p;
  size_t size;
  size_t pos = 0;

  uint8_t u8() {
    if (pos >= size) throw data_error("container header truncated");
    return p[pos++];
  }
  uint16_t u16() {
    uint16_t lo = u8();
    return uint16_t(lo | (uint16_t(u8()) << 8));
  }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
    return v;
  }
};

}  // namespace

size_t ContainerHeader::byte_size() const {
  return 4 + 1 + 2 + 2 + 1 + 1 + 3 * 7 + (size_t(levels) + 7) / 8 +
         4 * size_t(levels);
}

void serialize_header(const ContainerHeader& h, std::vector<uint8_t>& out) {
  if (h.levels == 0 || h.zero_flag.size() != h.levels ||
      h.level_length.size() != h.levels) {
    throw contract_error("container header fields inconsistent");
  }
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kFormatVersion);
  put_u16(out, h.height);
  put_u16(out, h.width);
  out.push_back(uint8_t(h.config));
  out.push_back(h.levels);
  for (const NetStreamInfo& n : h.net) {
    out.push_back(n.q);
    put_u16(out, n.scale_fp);
    put_u32(out, n.length);
  }
  for (int base = 0; base < h.levels; base += 8) {
    uint8_t byte = 0;
    for (int b = 0; b < 8 && base + b < h.levels; ++b) {
      if (h.zero_flag[base + b]) byte |= uint8_t(1u << b);
    }
    out.push_back(byte);
  }
  for (uint32_t len : h.level_length) put_u32(out, len);
}

ContainerHeader parse_header(const uint8_t* data, size_t size,
                             size_t* consumed) {
  Reader r{data, size};
  uint8_t magic[4];
  for (uint8_t& m : magic) m = r.u8();
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw data_error("not an ofic stream (bad magic)");
  }
  uint8_t version = r.u8();
  if (version != kFormatVersion) {
    throw data_error("unsupported stream version " + std::to_string(version));
  }
  ContainerHeader h;
  h.height = r.u16();
  h.width = r.u16();
  if (h.height == 0 || h.width == 0) {
    throw data_error("container declares an empty image");
  }
  uint8_t config = r.u8();
  if (config > 1) {
    throw data_error("unknown codec configuration " + std::to_string(config));
  }
  h.config = CodecConfig(config);
  h.levels = r.u8();
  if (h.levels == 0) throw data_error("container declares zero latent levels");
  for (NetStreamInfo& n : h.net) {
    n.q = r.u8();
    n.scale_fp = r.u16();
    n.length = r.u32();
  }
  h.zero_flag.resize(h.levels);
  for (int base = 0; base < h.levels; base += 8) {
    uint8_t byte = r.u8();
    for (int b = 0; b < 8 && base + b < h.levels; ++b) {
      h.zero_flag[base + b] = (byte >> b) & 1u;
    }
  }
  h.level_length.resize(h.levels);
  for (uint32_t& len : h.level_length) len = r.u32();
  *consumed = r.pos;
  return h;
}

}  // namespace ofic
