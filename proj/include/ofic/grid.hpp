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

#ifndef OFIC_GRID_HPP_
#define OFIC_GRID_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ofic {

// Planar float tensor, laid out channel-major: v[(c * h + y) * w + x].
struct Grid {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(size_t(c_) * h_ * w_, 0.0) {}

  size_t plane() const { return size_t(h) * w; }
  size_t size() const { return v.size(); }
  double* chan(int ci) { return v.data() + ci * plane(); }
  const double* chan(int ci) const { return v.data() + ci * plane(); }
  double& at(int ci, int y, int x) { return v[(size_t(ci) * h + y) * w + x]; }
  double at(int ci, int y, int x) const { return v[(size_t(ci) * h + y) * w + x]; }
};

// Single-channel integer plane; holds quantized latents on the coded path.
struct IntGrid {
  int h = 0, w = 0;
  std::vector<int32_t> v;

  IntGrid() = default;
  IntGrid(int h_, int w_) : h(h_), w(w_), v(size_t(h_) * w_, 0) {}

  size_t size() const { return v.size(); }
  int32_t& at(int y, int x) { return v[size_t(y) * w + x]; }
  int32_t at(int y, int x) const { return v[size_t(y) * w + x]; }
};

// Learnable tensor: weights, gradient, Adam moments. Shape is bookkeeping
// only; all math runs on the flat arrays.
struct ParamTensor {
  std::vector<int> shape;
  std::vector<double> w, g, m, v;

  ParamTensor() = default;
  explicit ParamTensor(std::vector<int> s) : shape(std::move(s)) {
    size_t n = 1;
    for (int d : shape) n *= size_t(d);
    w.assign(n, 0.0);
    g.assign(n, 0.0);
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }

  size_t size() const { return w.size(); }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

}  // namespace ofic

#endif  // OFIC_GRID_HPP_
