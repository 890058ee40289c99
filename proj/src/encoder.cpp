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

#include "ofic/encoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "ofic/coding.hpp"
#include "ofic/nn.hpp"

namespace ofic {
namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Trainer::Trainer(const ImageU8& img, const TrainConfig& cfg_)
    : cfg(cfg_), rng(cfg_.seed) {
  if (img.h <= 0 || img.w <= 0) throw data_error("empty image");
  if (img.h > 65535 || img.w > 65535) {
    throw data_error("image side exceeds the container limit of 65535");
  }
  if (cfg.levels < 1 || cfg.levels > 255) {
    throw data_error("latent level count must be in [1, 255]");
  }
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw data_error("lambda must be positive");
  }
  if (cfg.phase1_iters < 0 || cfg.phase2_iters < 0 || cfg.eval_period < 1 ||
      cfg.max_restarts < 0) {
    throw data_error("training schedule out of range");
  }
  h = img.h;
  w = img.w;
  src = img;
  ref = image_to_grid(img);
  pyr = init_pyramid(h, w, cfg.levels);
  nets.arm = init_arm(arm_context_size(cfg.config), rng);
  nets.ups = init_bicubic_upsampler();
  nets.synth = init_synth(cfg.config, cfg.levels, rng);
  ws_arm.resize(cfg.levels);
  observe(hard_loss());
  phase1_best = best_loss;
}

std::vector<ParamTensor*> Trainer::all_params() {
  std::vector<ParamTensor*> out;
  for (ParamTensor& t : pyr.level) out.push_back(&t);
  for (ParamTensor* t : arm_param_list(nets.arm)) out.push_back(t);
  for (ParamTensor* t : ups_param_list(nets.ups)) out.push_back(t);
  for (ParamTensor* t : synth_param_list(nets.synth)) out.push_back(t);
  return out;
}

Trainer::Forward Trainer::forward(QuantMode mode) {
  relax_pyramid(pyr, mode, rng, relaxed);
  Forward f;
  for (int l = 0; l < cfg.levels; ++l) {
    f.rate_bits += arm_plane_rate_bits(nets.arm, relaxed[l], ws_arm[l]);
  }
  upsample_pyramid(nets.ups, relaxed, zgrid, &ws_ups);
  synth_forward(nets.synth, zgrid, rgb, &ws_synth);
  double acc = 0.0;
  for (size_t i = 0; i < rgb.size(); ++i) {
    double d = rgb.v[i] - ref.v[i];
    acc += d * d;
  }
  f.mse = acc / double(rgb.size());
  f.loss = f.mse + cfg.lambda * f.rate_bits / (double(h) * double(w));
  return f;
}

void Trainer::backward(QuantMode mode) {
  for (ParamTensor* t : all_params()) t->zero_grad();

  // Distortion path: d(mse)/d(rgb), back through synthesis and upsampling.
  Grid grgb(rgb.c, h, w);
  double s = 2.0 / double(rgb.size());
  for (size_t i = 0; i < rgb.size(); ++i) {
    grgb.v[i] = s * (rgb.v[i] - ref.v[i]);
  }
  Grid gz;
  synth_backward(nets.synth, grgb, ws_synth, gz);
  std::vector<Grid> glat;
  upsample_backward(nets.ups, gz, ws_ups, glat);

  // Rate path, then both contributions through the quantizer factor.
  double upstream = cfg.lambda / (double(h) * double(w));
  double qf = quant_backward_factor(mode, cfg.ste_eps);
  Grid gplane;
  for (int l = 0; l < cfg.levels; ++l) {
    arm_plane_rate_backward(nets.arm, ws_arm[l], upstream, gplane);
    ParamTensor& t = pyr.level[l];
    for (size_t i = 0; i < t.size(); ++i) {
      t.g[i] = qf * (glat[l].v[i] + gplane.v[i]);
    }
  }
}

bool Trainer::step_all(double lr) {
  ++adam_t;
  bool ok = true;
  for (ParamTensor* t : all_params()) {
    ok = adam_step(*t, lr, adam_t) && ok;
  }
  return ok;
}

double Trainer::hard_loss() {
  std::vector<Grid> hard;
  relax_pyramid(pyr, QuantMode::kRound, rng, hard);
  double bits = 0.0;
  ArmWorkspace scratch;
  for (int l = 0; l < cfg.levels; ++l) {
    bits += arm_plane_rate_bits(nets.arm, hard[l], scratch);
  }
  Grid z, out;
  upsample_pyramid(nets.ups, hard, z, nullptr);
  synth_forward(nets.synth, z, out, nullptr);
  double acc = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    double d = out.v[i] - ref.v[i];
    acc += d * d;
  }
  return acc / double(out.size()) +
         cfg.lambda * bits / (double(h) * double(w));
}

void Trainer::observe(double loss) {
  if (!std::isfinite(loss)) return;
  if (snapshot.empty() || loss < best_loss) {
    best_loss = loss;
    snapshot.clear();
    for (ParamTensor* t : all_params()) snapshot.push_back(t->w);
  }
}

void Trainer::restore_best() {
  std::vector<ParamTensor*> params = all_params();
  if (snapshot.size() != params.size()) {
    throw contract_error("restore_best: no snapshot recorded");
  }
  for (size_t i = 0; i < params.size(); ++i) params[i]->w = snapshot[i];
}

void Trainer::handle_divergence() {
  if (restarts_used >= cfg.max_restarts) {
    throw divergence_error("training diverged after " +
                           std::to_string(restarts_used) + " restarts");
  }
  ++restarts_used;
  lr_scale *= 0.5;
  restore_best();
  // The moments tracked a trajectory that blew up; start them over.
  for (ParamTensor* t : all_params()) {
    std::fill(t->m.begin(), t->m.end(), 0.0);
    std::fill(t->v.begin(), t->v.end(), 0.0);
  }
}

void Trainer::train_iteration(QuantMode mode, double lr, int iter) {
  Forward f = forward(mode);
  if (!std::isfinite(f.loss)) {
    handle_divergence();
    return;
  }
  backward(mode);
  if (!step_all(lr * lr_scale)) {
    handle_divergence();
    return;
  }
  if ((iter + 1) % cfg.eval_period == 0) observe(hard_loss());
}

void Trainer::run_phase1() {
  int n = cfg.phase1_iters;
  for (int i = 0; i < n; ++i) {
    double t = n > 1 ? double(i) / double(n - 1) : 0.0;
    double lr = cfg.lr_final +
                0.5 * (cfg.lr_initial - cfg.lr_final) * (1.0 + std::cos(t * kPi));
    train_iteration(QuantMode::kNoise, lr, i);
  }
  observe(hard_loss());
  phase1_best = best_loss;
}

void Trainer::run_phase2() {
  restore_best();
  for (int i = 0; i < cfg.phase2_iters; ++i) {
    train_iteration(QuantMode::kSte, cfg.lr_final, i);
  }
  observe(hard_loss());
  restore_best();
}

void Trainer::run() {
  run_phase1();
  run_phase2();
}

EncodeResult Trainer::finalize() {
  std::vector<IntGrid> latents = quantize_pyramid(pyr);
  size_t pixels = size_t(h) * size_t(w);

  std::vector<Grid> hard(latents.size());
  for (size_t l = 0; l < latents.size(); ++l) {
    hard[l] = Grid(1, latents[l].h, latents[l].w);
    for (size_t i = 0; i < latents[l].size(); ++i) {
      hard[l].v[i] = double(latents[l].v[i]);
    }
  }

  // Requantize the networks coarsest-objective first: the context model only
  // moves the latent rate, the other two only the reconstruction.
  auto arm_eval = [&]() {
    double bits = 0.0;
    for (const Grid& g : hard) {
      bits += arm_plane_rate_bits_eval(nets.arm, g);
    }
    return cfg.lambda * bits / double(pixels);
  };
  QuantizedNet qarm =
      quantize_network(arm_param_list(nets.arm), cfg.lambda, pixels, arm_eval);
  auto recon_eval = [&]() {
    Grid r = reconstruct(nets, latents, h, w);
    return grid_mse(r, ref);
  };
  QuantizedNet qups = quantize_network(ups_param_list(nets.ups), cfg.lambda,
                                       pixels, recon_eval);
  QuantizedNet qsyn = quantize_network(synth_param_list(nets.synth),
                                       cfg.lambda, pixels, recon_eval);

  std::vector<uint8_t> warm, wups, wsyn;
  encode_weights(qarm.ints, qarm.scale_fp, warm);
  encode_weights(qups.ints, qups.scale_fp, wups);
  encode_weights(qsyn.ints, qsyn.scale_fp, wsyn);

  ContainerHeader hd;
  hd.height = uint16_t(h);
  hd.width = uint16_t(w);
  hd.config = cfg.config;
  hd.levels = uint8_t(cfg.levels);
  hd.net[0] = {uint8_t(qarm.q), qarm.scale_fp, uint32_t(warm.size())};
  hd.net[1] = {uint8_t(qups.q), qups.scale_fp, uint32_t(wups.size())};
  hd.net[2] = {uint8_t(qsyn.q), qsyn.scale_fp, uint32_t(wsyn.size())};
  hd.zero_flag.assign(latents.size(), 0);
  hd.level_length.assign(latents.size(), 0);

  std::vector<std::vector<uint8_t>> lvl(latents.size());
  for (size_t l = 0; l < latents.size(); ++l) {
    bool all_zero = true;
    for (int32_t v : latents[l].v) {
      if (v != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) {
      hd.zero_flag[l] = 1;
      continue;
    }
    encode_plane(nets.arm, latents[l], lvl[l]);
    hd.level_length[l] = uint32_t(lvl[l].size());
  }

  EncodeResult res;
  serialize_header(hd, res.stream);
  res.stream.insert(res.stream.end(), warm.begin(), warm.end());
  res.stream.insert(res.stream.end(), wups.begin(), wups.end());
  res.stream.insert(res.stream.end(), wsyn.begin(), wsyn.end());
  size_t latent_bytes = 0;
  for (const std::vector<uint8_t>& s : lvl) {
    res.stream.insert(res.stream.end(), s.begin(), s.end());
    latent_bytes += s.size();
  }

  DecodeResult dec = decode_stream(res.stream);
  res.recon = dec.image;
  res.psnr = image_psnr(src, res.recon);
  double scale = 8.0 / double(pixels);
  res.bpp_total = double(res.stream.size()) * scale;
  res.bpp_latent = double(latent_bytes) * scale;
  res.bpp_arm = double(warm.size()) * scale;
  res.bpp_ups = double(wups.size()) * scale;
  res.bpp_synth = double(wsyn.size()) * scale;
  res.best_hard_rd = best_loss;
  res.phase1_hard_rd = phase1_best;
  return res;
}

EncodeResult encode_image(const ImageU8& img, const TrainConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Trainer tr(img, cfg);
  tr.run();
  EncodeResult res = tr.finalize();
  res.encode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

std::vector<double> phase2_ablation(const ImageU8& img, const TrainConfig& cfg,
                                    const std::vector<double>& epsilons) {
  Trainer base(img, cfg);
  base.run_phase1();
  std::vector<double> out;
  for (double e : epsilons) {
    Trainer t = base;
    t.cfg.ste_eps = e;
    t.run_phase2();
    out.push_back(t.best_loss);
  }
  return out;
}

}  // namespace ofic
