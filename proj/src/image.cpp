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

#include "ofic/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ofic/common.hpp"

namespace ofic {

namespace {

// Skips whitespace and '#' comments between PPM header tokens.
int next_header_int(std::istream& in, const char* what) {
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
    } else if (!std::isspace(ch)) {
      break;
    }
  }
  if (ch == EOF) throw data_error(std::string("ppm: missing ") + what);
  long val = 0;
  bool any = false;
  while (ch != EOF && std::isdigit(ch)) {
    val = val * 10 + (ch - '0');
    any = true;
    if (val > 1 << 24) throw data_error(std::string("ppm: oversized ") + what);
    ch = in.get();
  }
  if (!any) throw data_error(std::string("ppm: malformed ") + what);
  if (ch != EOF) in.unget();
  return int(val);
}

}  // namespace

ImageU8 read_ppm(std::istream& in) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P' || m1 != '6') throw data_error("ppm: not a P6 file");
  const int w = next_header_int(in, "width");
  const int h = next_header_int(in, "height");
  const int maxval = next_header_int(in, "maxval");
  if (w < 1 || h < 1) throw data_error("ppm: empty image");
  if (maxval != 255) throw data_error("ppm: only maxval 255 is supported");
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep))
    throw data_error("ppm: missing pixel data separator");
  ImageU8 img(h, w);
  in.read(reinterpret_cast<char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
  if (size_t(in.gcount()) != img.rgb.size())
    throw data_error("ppm: truncated pixel data");
  return img;
}

ImageU8 read_ppm_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open " + path);
  return read_ppm(f);
}

void write_ppm(const ImageU8& img, std::ostream& out) {
  out << "P6\n" << img.w << ' ' << img.h << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            std::streamsize(img.rgb.size()));
}

void write_ppm_file(const ImageU8& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open " + path + " for writing");
  write_ppm(img, f);
  if (!f) throw data_error("short write to " + path);
}

Grid image_to_grid(const ImageU8& img) {
  Grid g(3, img.h, img.w);
  const size_t n = g.plane();
  for (size_t p = 0; p < n; ++p)
    for (int c = 0; c < 3; ++c) g.chan(c)[p] = img.rgb[p * 3 + c] / 255.0;
  return g;
}

ImageU8 grid_to_image(const Grid& g) {
  if (g.c != 3) throw contract_error("grid_to_image: expected 3 channels");
  ImageU8 img(g.h, g.w);
  const size_t n = g.plane();
  for (size_t p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      double v = g.chan(c)[p];
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      img.rgb[p * 3 + c] = uint8_t(quantize_round(v * 255.0));
    }
  }
  return img;
}

}  // namespace ofic
