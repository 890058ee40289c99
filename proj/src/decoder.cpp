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

#include "ofic/decoder.hpp"

#include <cstring>
#include <string>

#include "ofic/coding.hpp"
#include "ofic/latent.hpp"

namespace ofic {

std::vector<ParamTensor*> arm_param_list(ArmNet& net) {
  return {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3, &net.b3};
}

std::vector<ParamTensor*> ups_param_list(Upsampler& ups) {
  return {&ups.kern};
}

std::vector<ParamTensor*> synth_param_list(SynthNet& net) {
  std::vector<ParamTensor*> out;
  for (SynthLayer& l : net.layers) {
    out.push_back(&l.kern);
    out.push_back(&l.bias);
  }
  return out;
}

Grid reconstruct(const CodecNets& nets, const std::vector<IntGrid>& latents,
                 int h, int w) {
  std::vector<Grid> levels(latents.size());
  for (size_t l = 0; l < latents.size(); ++l) {
    const IntGrid& g = latents[l];
    levels[l] = Grid(1, g.h, g.w);
    for (size_t i = 0; i < g.size(); ++i) levels[l].v[i] = double(g.v[i]);
  }
  Grid z(int(latents.size()), h, w);
  upsample_pyramid(nets.ups, levels, z, nullptr);
  Grid rgb;
  synth_forward(nets.synth, z, rgb, nullptr);
  return rgb;
}

namespace {

size_t param_count(const std::vector<ParamTensor*>& list) {
  size_t n = 0;
  for (const ParamTensor* t : list) n += t->size();
  return n;
}

}  // namespace

DecodeResult decode_stream(const uint8_t* data, size_t size) {
  size_t consumed = 0;
  ContainerHeader h = parse_header(data, size, &consumed);

  size_t expect = consumed;
  for (const NetStreamInfo& n : h.net) expect += n.length;
  for (uint32_t len : h.level_length) expect += len;
  if (expect != size) {
    throw data_error("stream length does not match the header");
  }

  Rng rng(0);  // placeholder init; every weight is overwritten below
  CodecNets nets;
  nets.arm = init_arm(arm_context_size(h.config), rng);
  nets.ups = init_bicubic_upsampler();
  nets.synth = init_synth(h.config, h.levels, rng);

  std::vector<ParamTensor*> lists[3] = {arm_param_list(nets.arm),
                                        ups_param_list(nets.ups),
                                        synth_param_list(nets.synth)};
  const uint8_t* p = data + consumed;
  for (int i = 0; i < 3; ++i) {
    const NetStreamInfo& info = h.net[i];
    if (info.q < kQMin || info.q > kQMax) {
      throw data_error("weight step exponent out of range");
    }
    if (info.scale_fp == 0) throw data_error("weight scale missing");
    std::vector<int32_t> ints =
        decode_weights(param_count(lists[i]), info.scale_fp, p, info.length);
    load_weight_ints(lists[i], ints, info.q);
    p += info.length;
  }

  std::vector<std::pair<int, int>> shapes =
      pyramid_shapes(h.height, h.width, h.levels);
  std::vector<IntGrid> latents(h.levels);
  for (int l = 0; l < h.levels; ++l) {
    latents[l] = IntGrid(shapes[l].first, shapes[l].second);
    if (h.zero_flag[l]) {
      if (h.level_length[l] != 0) {
        throw data_error("zero-flagged level " + std::to_string(l) +
                         " carries payload");
      }
      continue;
    }
    decode_plane(nets.arm, latents[l], p, h.level_length[l], l);
    p += h.level_length[l];
  }

  Grid rgb = reconstruct(nets, latents, h.height, h.width);
  DecodeResult res;
  res.header = std::move(h);
  res.image = grid_to_image(rgb);
  return res;
}

DecodeResult decode_stream(const std::vector<uint8_t>& data) {
  return decode_stream(data.data(), data.size());
}

}  // namespace ofic
