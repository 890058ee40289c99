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

#ifndef OFIC_ENCODER_HPP_
#define OFIC_ENCODER_HPP_

#include <cstdint>
#include <vector>

#include "ofic/decoder.hpp"
#include "ofic/image.hpp"
#include "ofic/latent.hpp"
#include "ofic/metrics.hpp"

namespace ofic {

struct TrainConfig {
  double lambda = 1e-3;  // weights bits per pixel against MSE
  CodecConfig config = CodecConfig::kMain;
  int levels = 7;
  int phase1_iters = 10000;  // additive-noise relaxation, cosine lr
  int phase2_iters = 2000;   // scaled straight-through, constant lr
  double lr_initial = 1e-2;
  double lr_final = 1e-4;
  double ste_eps = 1e-2;  // backward factor of the phase-2 quantizer
  uint64_t seed = 0;
  int eval_period = 10;  // iterations between hard-rounded evaluations
  int max_restarts = 3;  // divergence recoveries before giving up
};

struct EncodeResult {
  std::vector<uint8_t> stream;
  ImageU8 recon;  // decoded back from `stream`
  double psnr = 0.0;
  double bpp_total = 0.0;  // container size over pixels
  double bpp_latent = 0.0;
  double bpp_arm = 0.0, bpp_ups = 0.0, bpp_synth = 0.0;
  double best_hard_rd = 0.0;    // hard-rounded training loss that shipped
  double phase1_hard_rd = 0.0;  // best hard-rounded loss after phase 1
  double encode_seconds = 0.0;
};

// Training state with the loop pieces exposed; tests drive them directly.
// encode_image below is the assembled pipeline.
class Trainer {
 public:
  Trainer(const ImageU8& img, const TrainConfig& cfg);

  struct Forward {
    double mse = 0.0, rate_bits = 0.0, loss = 0.0;
  };

  // Relaxes the latents under `mode`, runs rate + reconstruction, fills the
  // workspaces. loss = mse + lambda * rate_bits / pixels.
  Forward forward(QuantMode mode);
  // Gradients of that loss into every tensor (latents get the quantizer
  // backward factor). Must follow forward(mode) with the same mode.
  void backward(QuantMode mode);
  // Adam over all tensors at the shared step counter. False on non-finite
  // gradients (the update is skipped).
  bool step_all(double lr);

  // Loss with hard-rounded latents, workspaces untouched.
  double hard_loss();
  // hard_loss bookkeeping: keeps the best-so-far weight snapshot.
  void observe(double loss);
  void restore_best();

  void run_phase1();
  void run_phase2();
  void run();

  // Post-training: freezes rounded latents, requantizes the networks under
  // the RD objective, writes the container, decodes it back. Leaves the
  // winning dequantized weights loaded.
  EncodeResult finalize();

  TrainConfig cfg;
  ImageU8 src;
  Grid ref;  // source pixels on [0,1]
  int h = 0, w = 0;
  LatentPyramid pyr;
  CodecNets nets;
  Rng rng;
  int64_t adam_t = 0;
  double lr_scale = 1.0;   // halved on every divergence restart
  int restarts_used = 0;
  double best_loss = 0.0;  // of the snapshot below
  double phase1_best = 0.0;
  std::vector<std::vector<double>> snapshot;  // weights, tensor order

  // Scratch kept across iterations.
  std::vector<Grid> relaxed;
  std::vector<ArmWorkspace> ws_arm;
  UpsampleWorkspace ws_ups;
  SynthWorkspace ws_synth;
  Grid zgrid, rgb;

  std::vector<ParamTensor*> all_params();

 private:
  void handle_divergence();
  void train_iteration(QuantMode mode, double lr, int iter);
};

EncodeResult encode_image(const ImageU8& img, const TrainConfig& cfg);

// Shared phase 1, then one phase 2 per epsilon from identical state.
// Returns the best hard-rounded loss per epsilon, in argument order.
std::vector<double> phase2_ablation(const ImageU8& img, const TrainConfig& cfg,
                                    const std::vector<double>& epsilons);

}  // namespace ofic

#endif  // OFIC_ENCODER_HPP_
