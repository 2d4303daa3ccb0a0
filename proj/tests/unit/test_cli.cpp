// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "incodec/codec.hpp"
#include "incodec/metrics.hpp"
#include "incodec/weights_io.hpp"
#include "run_config.hpp"

using namespace incodec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "incodec");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string fixture(const std::string& name) { return testing::fixture(name).string(); }

// Tiny manifest of two 128x128 images for fast training runs.
fs::path small_manifest(const fs::path& dir) {
  const fs::path m = dir / "train.txt";
  std::ofstream(m) << fixture("small_camera.pgm") << "\n" << fixture("small_coins.pgm") << "\n";
  return m;
}

std::vector<std::string> tiny_filter_args(const fs::path& manifest, const fs::path& out) {
  return {"train-filter", "--manifest", manifest.string(), "--output", out.string(), "--steps", "3",
          "--batch", "2", "--blocks", "1", "--pre-channels", "8", "--branch-channels", "4",
          "--lr", "0.001", "--seed", "7"};
}

}  // namespace

TEST_CASE("info prints parameter counts under both conventions") {
  const Run a = run({"info", "inception12"});
  CHECK(a.code == 0);
  CHECK(a.out.find("parameters with bias: 475,233") != std::string::npos);
  CHECK(a.out.find("block12.c.3x1") != std::string::npos);
  CHECK(run({"info", "vrcnn"}).out.find("parameters without bias: 54,512") != std::string::npos);
  CHECK(run({"info", "arcnn"}).out.find("parameters without bias: 106,448") != std::string::npos);
  CHECK(run({"info", "lenet"}).code == cli::kExitInput);
}

TEST_CASE("encode and decode agree with the library") {
  const fs::path dir = testing::scratch_dir("cli_codec");
  const Run e = run({"encode", "--input", fixture("small_camera.pgm"), "--output",
                     (dir / "s.bin").string(), "--qp", "32", "--recon", (dir / "enc.yuv").string()});
  REQUIRE(e.code == 0);
  const Frame f = Frame::from_luma(read_pgm(testing::fixture("small_camera.pgm")));
  CodecConfig cfg;
  cfg.qp = 32;
  const EncodeResult lib = encode_frame(f, cfg, nullptr);
  CHECK(e.out.find("psnr_y=" + format_psnr(psnr(f.y, lib.recon.y))) != std::string::npos);
  CHECK(e.out.find("bpp=") == 0);
  const std::string stream = slurp(dir / "s.bin");
  const auto lib_bytes = lib.stream.serialize();
  CHECK(stream == std::string(lib_bytes.begin(), lib_bytes.end()));

  REQUIRE(run({"decode", "--input", (dir / "s.bin").string(), "--output", (dir / "dec.yuv").string()}).code == 0);
  CHECK(slurp(dir / "dec.yuv") == slurp(dir / "enc.yuv"));

  REQUIRE(run({"decode", "--input", (dir / "s.bin").string(), "--output", (dir / "dec.pgm").string()}).code == 0);
  CHECK(read_pgm(dir / "dec.pgm") == lib.recon.y);
}

TEST_CASE("encode reads raw YUV frames") {
  const fs::path dir = testing::scratch_dir("cli_yuv");
  testing::Rng rng(81);
  Frame f(40, 24);
  for (int c = 0; c < 3; ++c) f.plane(c) = testing::random_plane(rng, c ? 20 : 40, c ? 12 : 24);
  write_yuv420(dir / "in.yuv", Frame(40, 24));
  write_yuv420(dir / "in.yuv", f, true);
  const Run r = run({"encode", "--input", (dir / "in.yuv").string(), "--width", "40", "--height", "24",
                     "--frame", "1", "--output", (dir / "s.bin").string(), "--qp", "22"});
  REQUIRE(r.code == 0);
  CodecConfig cfg;
  cfg.qp = 22;
  const auto lib = encode_frame(f, cfg, nullptr).stream.serialize();
  CHECK(slurp(dir / "s.bin") == std::string(lib.begin(), lib.end()));
  CHECK(run({"encode", "--input", (dir / "in.yuv").string(), "--output", (dir / "t.bin").string()}).code ==
        cli::kExitInput);
  CHECK(run({"encode", "--input", (dir / "in.yuv").string(), "--width", "40", "--height", "24",
             "--frame", "2", "--output", (dir / "t.bin").string()}).code == cli::kExitInput);
}

TEST_CASE("input errors exit with code 2 before writing anything") {
  const fs::path dir = testing::scratch_dir("cli_errors");
  const Run missing = run({"encode", "--input", (dir / "absent.pgm").string(), "--output",
                           (dir / "s.bin").string()});
  CHECK(missing.code == cli::kExitInput);
  CHECK(missing.err.find("absent.pgm") != std::string::npos);

  const Run bad_qp = run({"encode", "--input", fixture("small_camera.pgm"), "--output",
                          (dir / "s.bin").string(), "--qp", "99"});
  CHECK(bad_qp.code == cli::kExitInput);
  CHECK(bad_qp.err.find("qp") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "s.bin"));

  CHECK(run({"encode", "--bogus", "1"}).code == cli::kExitInput);
  CHECK(run({}).code == cli::kExitInput);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config files are merged under command-line flags") {
  const fs::path dir = testing::scratch_dir("cli_config");
  std::ofstream(dir / "run.cfg") << "# encode settings\ninput = " << fixture("small_page.pgm")
                                 << "\noutput = " << (dir / "s.bin").string() << "\nqp = 99\n";
  CHECK(run({"--config", (dir / "run.cfg").string(), "encode"}).code == cli::kExitInput);
  CHECK(run({"--config", (dir / "run.cfg").string(), "encode", "--qp", "27"}).code == 0);
  const std::string bytes = slurp(dir / "s.bin");
  CHECK(Bitstream::parse(std::vector<std::uint8_t>(bytes.begin(), bytes.end())).qp == 27);

  std::ofstream(dir / "bad.cfg") << "input = x.pgm\nspeed = 3\n";
  const Run bad = run({"--config", (dir / "bad.cfg").string(), "encode"});
  CHECK(bad.code == cli::kExitInput);
  CHECK(bad.err.find("speed") != std::string::npos);
  CHECK(run({"--config", (dir / "none.cfg").string(), "info", "vrcnn"}).code == cli::kExitInput);
}

TEST_CASE("corrupt streams exit with code 3") {
  const fs::path dir = testing::scratch_dir("cli_corrupt");
  REQUIRE(run({"encode", "--input", fixture("small_camera.pgm"), "--output", (dir / "s.bin").string()}).code == 0);
  const std::string s = slurp(dir / "s.bin");
  std::ofstream(dir / "cut.bin", std::ios::binary) << s.substr(0, s.size() / 2);
  CHECK(run({"decode", "--input", (dir / "cut.bin").string(), "--output", (dir / "d.yuv").string()}).code ==
        cli::kExitCorrupt);
  std::ofstream(dir / "junk.bin", std::ios::binary) << "not a stream at all";
  CHECK(run({"decode", "--input", (dir / "junk.bin").string(), "--output", (dir / "d.yuv").string()}).code ==
        cli::kExitCorrupt);
}

TEST_CASE("training, model banks and missing models") {
  const fs::path dir = testing::scratch_dir("cli_train");
  const fs::path manifest = small_manifest(dir);
  const Run t1 = run(tiny_filter_args(manifest, dir / "bank_a"));
  REQUIRE(t1.code == 0);
  REQUIRE(run(tiny_filter_args(manifest, dir / "bank_b")).code == 0);
  for (const char* f : {"bank.cfg", "filter_qp22.nnwt", "filter_qp37.nnwt", "loss_qp27.csv"}) CHECK(fs::exists(dir / "bank_a" / f));
  // Same seed, byte-identical weights.
  CHECK(slurp(dir / "bank_a" / "filter_qp32.nnwt") == slurp(dir / "bank_b" / "filter_qp32.nnwt"));
  CHECK(load_weights(dir / "bank_a" / "filter_qp32.nnwt", build_from_tag("inception1w8b4")).arch_tag ==
        "inception1w8b4");

  const Run intra = run({"train-intra", "--manifest", manifest.string(), "--output",
                         (dir / "intra").string(), "--steps", "3", "--hidden", "16",
                         "--samples", "32", "--bank-id", "9"});
  REQUIRE(intra.code == 0);
  CHECK(fs::exists(dir / "intra" / "loss_intra.csv"));

  const std::string models = (dir / "bank_a").string() + "," + (dir / "intra").string();
  const Run enc = run({"encode", "--input", fixture("small_page.pgm"), "--output", (dir / "s.bin").string(),
                       "--filter", "--neural", "--models", models, "--qp", "37"});
  REQUIRE(enc.code == 0);
  CHECK(run({"decode", "--input", (dir / "s.bin").string(), "--output", (dir / "d.yuv").string(),
             "--models", models}).code == 0);
  const Run miss = run({"decode", "--input", (dir / "s.bin").string(), "--output", (dir / "d.yuv").string()});
  CHECK(miss.code == cli::kExitMissingModel);
  CHECK(miss.err.find("bank 1") != std::string::npos);
  CHECK(run({"encode", "--input", fixture("small_page.pgm"), "--output", (dir / "t.bin").string(),
             "--filter"}).code == cli::kExitMissingModel);

  std::ofstream(dir / "empty.txt") << "# nothing here\n";
  auto empty = tiny_filter_args(dir / "empty.txt", dir / "bank_c");
  CHECK(run(empty).code == cli::kExitInput);

  auto diverge = tiny_filter_args(manifest, dir / "bank_d");
  diverge[diverge.size() - 3] = "1e30";
  diverge[diverge.size() - 13] = "30";
  CHECK(run(diverge).code == cli::kExitDivergence);
}

TEST_CASE("eval and bdrate") {
  const fs::path dir = testing::scratch_dir("cli_eval");
  // Chroma taken from the luma so that every component has a finite PSNR.
  const Plane y = read_pgm(testing::fixture("small_camera.pgm"));
  Frame f = Frame::from_luma(y);
  for (int yy = 0; yy < 64; ++yy)
    for (int x = 0; x < 64; ++x) {
      f.u.at(x, yy) = y.at(2 * x, 2 * yy);
      f.v.at(x, yy) = y.at(2 * x + 1, 2 * yy + 1);
    }
  write_yuv420(dir / "cam.yuv", f);
  const Run e = run({"eval", "--input", (dir / "cam.yuv").string(), "--width", "128", "--height", "128",
                     "--anchor", "off", "--test", "off", "--report", (dir / "bd.csv").string()});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("| cam | 0.00% | 0.00% | 0.00% |") != std::string::npos);
  CHECK(slurp(dir / "bd.csv").find("cam,0.000000,0.000000,0.000000") != std::string::npos);
  CHECK(fs::exists(dir / "bd.md"));
  CHECK(run({"eval", "--input", (dir / "cam.yuv").string(), "--width", "128", "--height", "128",
             "--qps", "22,27,32"}).code == cli::kExitInput);
  CHECK(run({"eval", "--input", fixture("small_page.pgm"), "--test", "sharpen"}).code == cli::kExitInput);

  std::ofstream(dir / "a.csv") << "qp,bpp,psnr\n22,0.8,39\n27,0.4,36\n32,0.2,33\n37,0.1,30\n";
  std::ofstream(dir / "t.csv") << "qp,bpp,psnr\n22,0.88,39\n27,0.44,36\n32,0.22,33\n37,0.11,30\n";
  const Run bd = run({"bdrate", "--anchor", (dir / "a.csv").string(), "--test", (dir / "t.csv").string()});
  CHECK(bd.code == 0);
  CHECK(bd.out.find("bd_rate=10.0000%") == 0);
  std::ofstream(dir / "short.csv") << "bpp,psnr\n0.1,30\n0.2,33\n";
  CHECK(run({"bdrate", "--anchor", (dir / "a.csv").string(), "--test", (dir / "short.csv").string()}).code ==
        cli::kExitInput);
}
