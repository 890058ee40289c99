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

#include "ofic/toolsapi.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ofic/complexity.hpp"
#include "ofic/decoder.hpp"
#include "ofic/metrics.hpp"

namespace ofic {
namespace {

std::string fmt_fixed(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string fmt_db(double v) {
  if (std::isinf(v)) return "inf";
  return fmt_fixed(v, 6);
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  return data;
}

// Stable per-file seed so report rows are independent of corpus layout.
uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= uint8_t(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

CodecConfig parse_config_name(const std::string& name) {
  if (name == "main") return CodecConfig::kMain;
  if (name == "light") return CodecConfig::kLight;
  throw data_error("unknown config '" + name + "' (expected main or light)");
}

void cmd_encode(const std::string& in_ppm, const std::string& out_path,
                const TrainConfig& cfg, std::ostream& log) {
  ImageU8 img = read_ppm_file(in_ppm);
  EncodeResult res = encode_image(img, cfg);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw data_error("cannot write " + out_path);
  out.write(reinterpret_cast<const char*>(res.stream.data()),
            std::streamsize(res.stream.size()));
  if (!out) throw data_error("short write to " + out_path);
  log << "bytes " << res.stream.size() << "\n"
      << "bpp_total " << fmt_fixed(res.bpp_total, 6) << "\n"
      << "bpp_latent " << fmt_fixed(res.bpp_latent, 6) << "\n"
      << "bpp_nn "
      << fmt_fixed(res.bpp_arm + res.bpp_ups + res.bpp_synth, 6) << "\n"
      << "psnr " << fmt_db(res.psnr) << "\n"
      << "encode_seconds " << fmt_fixed(res.encode_seconds, 3) << "\n";
}

void cmd_decode(const std::string& in_path, const std::string& out_ppm,
                std::ostream& log) {
  std::vector<uint8_t> data = read_binary_file(in_path);
  DecodeResult res = decode_stream(data);
  write_ppm_file(res.image, out_ppm);
  log << "decoded " << res.image.w << "x" << res.image.h << " from "
      << data.size() << " bytes\n";
}

void cmd_metrics(const std::string& ref_ppm, const std::string& dist_ppm,
                 std::ostream& log) {
  ImageU8 a = read_ppm_file(ref_ppm);
  ImageU8 b = read_ppm_file(dist_ppm);
  log << "mse " << fmt_fixed(image_mse(a, b), 8) << "\n"
      << "psnr " << fmt_db(image_psnr(a, b)) << "\n";
}

void cmd_bdrate(const std::string& anchor_csv, const std::string& test_csv,
                std::ostream& log) {
  std::ifstream fa(anchor_csv), ft(test_csv);
  if (!fa) throw data_error("cannot read " + anchor_csv);
  if (!ft) throw data_error("cannot read " + test_csv);
  std::vector<RdPoint> a = parse_rd_csv(fa);
  std::vector<RdPoint> t = parse_rd_csv(ft);
  log << "bd_rate_percent " << fmt_fixed(bd_rate(a, t), 3) << "\n";
}

void cmd_complexity(CodecConfig config, int h, int w, std::ostream& log) {
  ComplexityReport r = count_macs(config, 7, h, w);
  log << "config " << (config == CodecConfig::kMain ? "main" : "light")
      << (h > 0 ? " (" + std::to_string(w) + "x" + std::to_string(h) + ")"
                : " (dyadic limit)")
      << "\n";
  log << "component    MAC/pixel    kMAC/pixel\n";
  auto row = [&log](const char* name, double macs) {
    log << std::left << std::setw(13) << name << std::setw(13)
        << fmt_fixed(macs, 1) << fmt_fixed(macs / 1000.0, 1) << "\n";
  };
  row("arm", r.arm);
  row("upsampling", r.upsampling);
  row("synthesis", r.synthesis);
  row("total", r.total());
}

void cmd_report(const std::string& corpus_dir,
                const std::vector<double>& lambdas,
                const std::string& out_csv, const ReportOptions& opt,
                std::ostream& log) {
  if (lambdas.empty()) throw data_error("report needs at least one lambda");
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  {
    std::error_code ec;
    fs::directory_iterator it(corpus_dir, ec);
    if (ec) throw data_error("cannot list " + corpus_dir);
    for (const fs::directory_entry& e : it) {
      if (e.is_regular_file() && e.path().extension() == ".ppm") {
        files.push_back(e.path());
      }
    }
  }
  if (files.empty()) throw data_error("no .ppm files under " + corpus_dir);
  std::sort(files.begin(), files.end());

  std::ofstream csv(out_csv);
  if (!csv) throw data_error("cannot write " + out_csv);
  csv << "file,lambda,bpp_total,bpp_latent,bpp_nn,psnr,encode_seconds\n";
  for (const fs::path& f : files) {
    ImageU8 img = read_ppm_file(f.string());
    for (double lambda : lambdas) {
      TrainConfig cfg;
      cfg.lambda = lambda;
      cfg.config = opt.config;
      cfg.levels = opt.levels;
      cfg.phase1_iters = opt.iters1;
      cfg.phase2_iters = opt.iters2;
      cfg.ste_eps = opt.epsilon;
      cfg.seed = opt.seed ^ fnv1a64(f.filename().string());
      EncodeResult res = encode_image(img, cfg);
      csv << f.filename().string() << "," << lambda << ","
          << fmt_fixed(res.bpp_total, 6) << ","
          << fmt_fixed(res.bpp_latent, 6) << ","
          << fmt_fixed(res.bpp_arm + res.bpp_ups + res.bpp_synth, 6) << ","
          << fmt_db(res.psnr) << "," << fmt_fixed(res.encode_seconds, 3)
          << "\n";
      log << f.filename().string() << " lambda " << lambda << ": "
          << fmt_fixed(res.bpp_total, 4) << " bpp, " << fmt_db(res.psnr)
          << " dB\n";
    }
  }
}

}  // namespace ofic
