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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ofic/toolsapi.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ofic: per-image overfitted neural codec"};
  app.require_subcommand(1);

  std::string in_path, out_path, config_name = "main";
  double lambda = 1e-3;
  int iters1 = 10000, iters2 = 2000;
  double epsilon = 1e-2;
  uint64_t seed = 0;

  CLI::App* enc = app.add_subcommand("encode", "Overfit and encode a P6 PPM");
  enc->add_option("--input", in_path, "source .ppm")->required();
  enc->add_option("--output", out_path, "bitstream file")->required();
  enc->add_option("--lambda", lambda, "rate weight (bits/pixel vs MSE)")
      ->required();
  enc->add_option("--config", config_name, "main or light")->required();
  enc->add_option("--iters1", iters1, "phase-1 iterations");
  enc->add_option("--iters2", iters2, "phase-2 iterations");
  enc->add_option("--epsilon", epsilon, "phase-2 straight-through factor");
  enc->add_option("--seed", seed, "rng seed");

  CLI::App* dec = app.add_subcommand("decode", "Decode a bitstream to PPM");
  dec->add_option("--input", in_path, "bitstream file")->required();
  dec->add_option("--output", out_path, "destination .ppm")->required();

  std::string ref_path, dist_path;
  CLI::App* met = app.add_subcommand("metrics", "PSNR/MSE between two PPMs");
  met->add_option("--ref", ref_path, "reference .ppm")->required();
  met->add_option("--dist", dist_path, "distorted .ppm")->required();

  std::string anchor_csv, test_csv;
  CLI::App* bdr = app.add_subcommand(
      "bdrate", "Average rate difference between two RD curves");
  bdr->add_option("--anchor", anchor_csv, "anchor curve csv (rate,psnr)")
      ->required();
  bdr->add_option("--test", test_csv, "test curve csv (rate,psnr)")
      ->required();

  int height = 0, width = 0;
  CLI::App* cpx =
      app.add_subcommand("complexity", "Decoder multiplies per pixel");
  cpx->add_option("--config", config_name, "main or light")->required();
  CLI::Option* oh = cpx->add_option("--height", height, "exact image height");
  CLI::Option* ow = cpx->add_option("--width", width, "exact image width");
  oh->needs(ow);
  ow->needs(oh);

  std::string corpus_dir, out_csv;
  std::vector<double> lambdas;
  CLI::App* rep =
      app.add_subcommand("report", "Encode a corpus over a lambda grid");
  rep->add_option("--corpus", corpus_dir, "directory of .ppm files")
      ->required();
  rep->add_option("--lambdas", lambdas, "comma-separated lambda list")
      ->required()
      ->delimiter(',');
  rep->add_option("--out", out_csv, "output csv path")->required();
  rep->add_option("--config", config_name, "main or light");
  rep->add_option("--iters1", iters1, "phase-1 iterations");
  rep->add_option("--iters2", iters2, "phase-2 iterations");
  rep->add_option("--epsilon", epsilon, "phase-2 straight-through factor");
  rep->add_option("--seed", seed, "base rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (enc->parsed()) {
      ofic::TrainConfig cfg;
      cfg.lambda = lambda;
      cfg.config = ofic::parse_config_name(config_name);
      cfg.phase1_iters = iters1;
      cfg.phase2_iters = iters2;
      cfg.ste_eps = epsilon;
      cfg.seed = seed;
      ofic::cmd_encode(in_path, out_path, cfg, std::cout);
    } else if (dec->parsed()) {
      ofic::cmd_decode(in_path, out_path, std::cout);
    } else if (met->parsed()) {
      ofic::cmd_metrics(ref_path, dist_path, std::cout);
    } else if (bdr->parsed()) {
      ofic::cmd_bdrate(anchor_csv, test_csv, std::cout);
    } else if (cpx->parsed()) {
      if ((height > 0) != (width > 0) || height < 0 || width < 0) {
        std::cerr << "error: --height and --width must be given together\n";
        return 1;
      }
      ofic::cmd_complexity(ofic::parse_config_name(config_name), height,
                           width, std::cout);
    } else if (rep->parsed()) {
      ofic::ReportOptions opt;
      opt.config = ofic::parse_config_name(config_name);
      opt.iters1 = iters1;
      opt.iters2 = iters2;
      opt.epsilon = epsilon;
      opt.seed = seed;
      ofic::cmd_report(corpus_dir, lambdas, out_csv, opt, std::cout);
    }
    return 0;
  } catch (const ofic::divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ofic::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
