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

#ifndef OFIC_IMAGE_HPP_
#define OFIC_IMAGE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "ofic/grid.hpp"

namespace ofic {

// Interleaved 8-bit RGB rows.
struct ImageU8 {
  int h = 0, w = 0;
  std::vector<uint8_t> rgb;

  ImageU8() = default;
  ImageU8(int h_, int w_) : h(h_), w(w_), rgb(size_t(h_) * w_ * 3, 0) {}
};

// Binary PPM (P6), maxval 255 only. Header comments are accepted on read;
// writes emit the canonical "P6\n<w> <h>\n255\n" form.
ImageU8 read_ppm(std::istream& in);
ImageU8 read_ppm_file(const std::string& path);
void write_ppm(const ImageU8& img, std::ostream& out);
void write_ppm_file(const ImageU8& img, const std::string& path);

// Planar [0, 1] doubles, one channel per primary; exact division by 255.
Grid image_to_grid(const ImageU8& img);
// Clamp to [0, 1], scale by 255, round half away from zero.
ImageU8 grid_to_image(const Grid& g);

}  // namespace ofic

#endif  // OFIC_IMAGE_HPP_
