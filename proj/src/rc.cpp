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

#include "ofic/rc.hpp"

#include <algorithm>

namespace ofic {

void RangeEncoder::encode(uint32_t cum, uint32_t freq) {
  range_ >>= kRcTotalBits;
  low_ += uint64_t(cum) * range_;
  range_ *= freq;
  while (range_ < kRcTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = uint8_t(low_ >> 32);
    uint8_t b = cache_;
    do {
      out_->push_back(uint8_t(b + carry));
      b = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = uint8_t(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFull) << 8;
}

void RangeEncoder::flush() {
  for (int i = 0; i < 5; ++i) shift_low();
}

RangeDecoder::RangeDecoder(const uint8_t* data, size_t len)
    : data_(data), len_(len) {
  // The first byte is the encoder's initial cache and always zero.
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ < len_) return data_[pos_++];
  overrun_ = true;
  return 0;
}

uint32_t RangeDecoder::target() {
  range_ >>= kRcTotalBits;
  return std::min(code_ / range_, kRcTotal - 1);
}

void RangeDecoder::advance(uint32_t cum, uint32_t freq) {
  code_ -= cum * range_;
  range_ *= freq;
  while (range_ < kRcTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

}  // namespace ofic
