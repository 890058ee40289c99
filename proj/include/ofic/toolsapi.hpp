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

#ifndef OFIC_TOOLSAPI_HPP_
#define OFIC_TOOLSAPI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "ofic/encoder.hpp"

namespace ofic {

// Command bodies behind the CLI, kept free of argv handling so tests can
// drive them. Failures surface as data_error / divergence_error.

CodecConfig parse_config_name(const std::string& name);

// Writes the bitstream to out_path and a key/value report to log. The psnr
// line uses the same formatting as cmd_metrics.
void cmd_encode(const std::string& in_ppm, const std::string& out_path,
                const TrainConfig& cfg, std::ostream& log);

void cmd_decode(const std::string& in_path, const std::string& out_ppm,
                std::ostream& log);

void cmd_metrics(const std::string& ref_ppm, const std::string& dist_ppm,
                 std::ostream& log);

void cmd_bdrate(const std::string& anchor_csv, const std::string& test_csv,
                std::ostream& log);

// h = w = 0 prints the dyadic-limit figures.
void cmd_complexity(CodecConfig config, int h, int w, std::ostream& log);

struct ReportOptions {
  CodecConfig config = CodecConfig::kMain;
  int levels = 7;
  int iters1 = 10000, iters2 = 2000;
  double epsilon = 1e-2;
  uint64_t seed = 0;
};

// Encodes every .ppm under corpus_dir (sorted by name) at every lambda and
// writes CSV rows {file, lambda, bpp_total, bpp_latent, bpp_nn, psnr,
// encode_seconds}. Each image gets a seed derived from its file name, so
// rows do not depend on which other files are present.
void cmd_report(const std::string& corpus_dir,
                const std::vector<double>& lambdas,
                const std::string& out_csv, const ReportOptions& opt,
                std::ostream& log);

}  // namespace ofic

#endif  // OFIC_TOOLSAPI_HPP_
