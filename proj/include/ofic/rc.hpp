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

#ifndef OFIC_RC_HPP_
#define OFIC_RC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ofic {

// Byte-oriented range coder, 32-bit range, carries deferred through a cache
// byte and a pending-0xFF run. Frequencies live on a 16-bit total.
constexpr uint32_t kRcTotalBits = 16;
constexpr uint32_t kRcTotal = 1u << kRcTotalBits;
constexpr uint32_t kRcTop = 1u << 24;

class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>& out) : out_(&out) {}

  // Symbol spanning [cum, cum+freq) of the 16-bit total; freq >= 1.
  void encode(uint32_t cum, uint32_t freq);
  void flush();  // emits the tail; exactly five shift-outs

 private:
  void shift_low();

  std::vector<uint8_t>* out_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* data, size_t len);

  // Cumulative-frequency target of the next symbol, in [0, 65536). Must be
  // followed by one advance() with the chosen symbol's interval.
  uint32_t target();
  void advance(uint32_t cum, uint32_t freq);

  size_t consumed() const { return pos_; }
  // True once a read ran past the declared length (truncated stream).
  bool overrun() const { return overrun_; }

 private:
  uint8_t next_byte();

  const uint8_t* data_;
  size_t len_, pos_ = 0;
  bool overrun_ = false;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
};

}  // namespace ofic

#endif  // OFIC_RC_HPP_
