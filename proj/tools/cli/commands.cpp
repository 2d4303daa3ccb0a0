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

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "incodec/codec.hpp"
#include "incodec/metrics.hpp"
#include "incodec/report.hpp"
#include "incodec/training.hpp"
#include "incodec/weights_io.hpp"
#include "run_config.hpp"

namespace incodec::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string with_commas(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(i, ",");
  return s;
}

bool is_pgm(const std::filesystem::path& p) { return p.extension() == ".pgm"; }

void require_file(const std::filesystem::path& p) {
  if (!std::filesystem::is_regular_file(p)) throw IoError("input file not found: " + p.string());
}

Frame read_frame(const std::filesystem::path& path, const RunConfig& c, int index) {
  require_file(path);
  if (is_pgm(path)) {
    if (index != 0) throw ContractViolation(path.string() + ": a PGM holds a single frame");
    return Frame::from_luma(read_pgm(path));
  }
  if (c.width == 0 || c.height == 0)
    throw ContractViolation(path.string() + ": raw YUV input needs width and height");
  return read_yuv420(path, c.width, c.height, index);
}

void write_frame(const std::filesystem::path& path, const Frame& f) {
  if (is_pgm(path))
    write_pgm(path, f.y);
  else
    write_yuv420(path, f);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  require_file(path);
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("cannot write " + path.string());
}

// Merges model directories into one set: the first directory's id wins, and
// at most one directory may supply each kind of model.
std::optional<CodecModels> load_model_set(const std::vector<std::filesystem::path>& dirs) {
  if (dirs.empty()) return std::nullopt;
  CodecModels merged;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CodecModels m = load_models(dirs[i]);
    if (i == 0) merged.id = m.id;
    if (m.filter) {
      if (merged.filter) throw ContractViolation("two model directories supply a filter bank");
      merged.filter = std::move(m.filter);
    }
    if (m.intra) {
      if (merged.intra) throw ContractViolation("two model directories supply an intra predictor");
      merged.intra = std::move(m.intra);
    }
  }
  return merged;
}

std::string psnr_summary(const Frame& a, const Frame& b) {
  return "psnr_y=" + format_psnr(psnr(a.y, b.y)) + " psnr_u=" + format_psnr(psnr(a.u, b.u)) +
         " psnr_v=" + format_psnr(psnr(a.v, b.v));
}

int cmd_encode(const RunConfig& c, std::ostream& out) {
  const Frame f = read_frame(c.inputs[0], c, c.frame);
  const auto models = load_model_set(c.models);
  CodecConfig cfg;
  cfg.qp = c.qp;
  cfg.inloop_filter = c.filter;
  cfg.neural_mode = c.neural;
  const EncodeResult r = encode_frame(f, cfg, models ? &*models : nullptr);
  const auto bytes = r.stream.serialize();
  write_bytes(c.output, bytes);
  if (!c.recon.empty()) write_frame(c.recon, r.recon);
  out << "bpp=" << fixed(bits_per_pixel(r.stream), 4) << " " << psnr_summary(f, r.recon)
      << " bytes=" << bytes.size() << " neural_blocks=" << r.stats.neural_blocks() << "/"
      << r.stats.blocks << "\n";
  return kExitOk;
}

int cmd_decode(const RunConfig& c, std::ostream& out) {
  const Bitstream s = Bitstream::parse(read_bytes(c.inputs[0]));
  std::vector<CodecModels> banks;
  if (auto m = load_model_set(c.models)) banks.push_back(std::move(*m));
  const Frame f = decode_frame(s, banks);
  write_frame(c.output, f);
  out << "decoded " << s.width << "x" << s.height << " qp=" << s.qp << " bank=" << s.bank_id
      << "\n";
  return kExitOk;
}

std::vector<Plane> manifest_images(const RunConfig& c) {
  require_file(c.manifest);
  std::vector<Plane> images;
  for (const auto& p : read_manifest(c.manifest)) images.push_back(read_pgm(p));
  if (images.empty()) throw ContractViolation("manifest " + c.manifest.string() + " lists no images");
  return images;
}

int cmd_train_filter(const RunConfig& c, std::ostream& out) {
  TrainConfig t;
  t.seed = c.seed;
  if (c.steps >= 0) t.steps = c.steps;
  if (c.lr > 0.0) t.learning_rate = c.lr;
  t.batch_size = c.batch;
  t.num_blocks = c.blocks;
  t.pre_channels = c.pre_channels;
  t.branch_channels = c.branch_channels;
  t.validate();
  const std::vector<Plane> images = manifest_images(c);

  std::vector<std::vector<double>> curves;
  long last = -1;
  CodecModels models;
  models.id = c.bank_id;
  models.filter = build_model_bank(images, c.qps, t, [&](long step, double loss) {
    if (curves.empty() || step <= last) curves.emplace_back();
    curves.back().push_back(loss);
    last = step;
  });
  std::filesystem::create_directories(c.output);
  save_models(c.output, models);
  for (std::size_t i = 0; i < models.filter->bands.size(); ++i) {
    const int qp = models.filter->bands[i].train_qp;
    if (i < curves.size()) write_loss_csv(c.output / ("loss_qp" + std::to_string(qp) + ".csv"), curves[i]);
    out << "qp=" << qp << " final_loss="
        << (i < curves.size() && !curves[i].empty() ? fixed(curves[i].back(), 8) : std::string("n/a"))
        << "\n";
  }
  out << "wrote " << models.filter->arch_tag << " bank id=" << models.id << " to " << c.output.string()
      << "\n";
  return kExitOk;
}

int cmd_train_intra(const RunConfig& c, std::ostream& out) {
  FcTrainConfig t;
  t.seed = c.seed;
  if (c.steps >= 0) t.steps = c.steps;
  if (c.lr > 0.0) t.learning_rate = c.lr;
  t.batch_size = c.batch;
  t.hidden = c.hidden;
  t.samples = static_cast<std::size_t>(c.samples);
  t.validate();
  const std::vector<Plane> images = manifest_images(c);
  const TrainResult r = train_fc_predictor(images, 32, 4, t);
  CodecModels models;
  models.id = c.bank_id;
  models.intra = r.weights;
  std::filesystem::create_directories(c.output);
  save_models(c.output, models);
  write_loss_csv(c.output / "loss_intra.csv", r.loss_curve);
  out << "final_loss=" << (r.loss_curve.empty() ? std::string("n/a") : fixed(r.loss_curve.back(), 8))
      << "\nwrote " << r.weights.arch_tag << " id=" << models.id << " to " << c.output.string() << "\n";
  return kExitOk;
}

CodecConfig coding_config(const std::string& name, int qp) {
  CodecConfig cfg;
  cfg.qp = qp;
  cfg.inloop_filter = name.find("filter") != std::string::npos;
  cfg.neural_mode = name.find("neural") != std::string::npos;
  return cfg;
}

// Rate and per-component PSNR averaged over the frames of one input.
struct RdSample {
  double bpp = 0.0;
  std::array<double, 3> psnr{};
};

int cmd_eval(const RunConfig& c, std::ostream& out) {
  for (const auto& p : c.inputs) require_file(p);
  const auto models = load_model_set(c.models);
  const CodecModels* mp = models ? &*models : nullptr;

  std::vector<std::string> configs = {c.anchor};
  configs.insert(configs.end(), c.tests.begin(), c.tests.end());
  BDReport report;
  report.configurations = c.tests;

  for (const auto& path : c.inputs) {
    const int frames = is_pgm(path) ? 1 : c.frames;
    // curves[config][component]
    std::vector<std::array<RDCurve, 3>> curves(configs.size());
    std::vector<std::array<bool, 3>> finite(configs.size(), {true, true, true});
    for (int qp : c.qps) {
      for (std::size_t k = 0; k < configs.size(); ++k) {
        RdSample s;
        for (int fi = 0; fi < frames; ++fi) {
          const Frame f = read_frame(path, c, fi);
          const EncodeResult r = encode_frame(f, coding_config(configs[k], qp), mp);
          s.bpp += bits_per_pixel(r.stream) / frames;
          for (int comp = 0; comp < 3; ++comp) s.psnr[comp] += psnr(f.plane(comp), r.recon.plane(comp)) / frames;
        }
        out << path.stem().string() << " " << configs[k] << " qp=" << qp << " bpp=" << fixed(s.bpp, 4)
            << " psnr_y=" << format_psnr(s.psnr[0]) << " psnr_u=" << format_psnr(s.psnr[1])
            << " psnr_v=" << format_psnr(s.psnr[2]) << "\n";
        for (int comp = 0; comp < 3; ++comp) {
          finite[k][comp] = finite[k][comp] && std::isfinite(s.psnr[comp]);
          curves[k][comp].points.push_back({s.bpp, s.psnr[comp]});
        }
      }
    }
    BdRow row{path.stem().string(), {}};
    for (std::size_t k = 1; k < configs.size(); ++k) {
      ComponentTriple t;
      for (int comp = 0; comp < 3; ++comp)
        if (finite[0][comp] && finite[k][comp]) {
          try {
            t[comp] = bd_rate(curves[0][comp], curves[k][comp]);
          } catch (const ContractViolation&) {
            // Degenerate curves (e.g. constant PSNR) have no BD-rate.
          }
        }
      row.values.push_back(t);
    }
    report.rows.push_back(std::move(row));
  }
  const std::string md = report_markdown(report);
  out << md;
  if (!c.report.empty()) {
    std::ofstream(c.report, std::ios::trunc) << report_csv(report);
    auto md_path = c.report;
    md_path.replace_extension(".md");
    std::ofstream(md_path, std::ios::trunc) << md;
    if (!std::filesystem::exists(md_path)) throw IoError("cannot write " + md_path.string());
  }
  return kExitOk;
}

// CSV with a header naming a rate column ("rate" or "bpp") and a "psnr" column.
RDCurve read_curve_csv(const std::filesystem::path& path) {
  require_file(path);
  std::ifstream is(path);
  std::string line;
  if (!std::getline(is, line)) throw ContractViolation(path.string() + ": empty curve file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) {
      while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
      while (!f.empty() && f.front() == ' ') f.erase(0, 1);
      out.push_back(f);
    }
    return out;
  };
  const auto header = split(line);
  int rate_col = -1, psnr_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "rate" || header[i] == "bpp") rate_col = static_cast<int>(i);
    if (header[i] == "psnr" || header[i] == "psnr_y") psnr_col = static_cast<int>(i);
  }
  if (rate_col < 0 || psnr_col < 0)
    throw ContractViolation(path.string() + ": header needs rate (or bpp) and psnr columns");
  RDCurve c;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    const auto f = split(line);
    if (static_cast<int>(f.size()) <= std::max(rate_col, psnr_col))
      throw ContractViolation(path.string() + ": short row '" + line + "'");
    try {
      c.points.push_back({std::stod(f[rate_col]), std::stod(f[psnr_col])});
    } catch (const std::logic_error&) {
      throw ContractViolation(path.string() + ": non-numeric row '" + line + "'");
    }
  }
  return c;
}

int cmd_bdrate(const RunConfig& c, std::ostream& out) {
  const RDCurve a = read_curve_csv(c.anchor_csv), t = read_curve_csv(c.test_csv);
  out << "bd_rate=" << fixed(bd_rate(a, t), 4) << "% bd_psnr=" << fixed(bd_psnr(a, t), 4) << " dB\n";
  return kExitOk;
}

int cmd_info(const RunConfig& c, std::ostream& out) {
  const NetworkGraph g = build_from_tag(c.arch);
  out << "architecture " << g.arch_tag() << "\n";
  for (int i : g.parameter_nodes()) {
    const Node& n = g.node(i);
    out << "  " << std::left << std::setw(18) << n.id << " " << std::setw(16) << n.kernel.str()
        << std::right << std::setw(10)
        << with_commas(count_parameters(g, i, ParamConvention::with_bias)) << "\n";
  }
  out << "parameters with bias: " << with_commas(count_parameters(g, ParamConvention::with_bias))
      << "\nparameters without bias: "
      << with_commas(count_parameters(g, ParamConvention::without_bias)) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-based intra image codec with learned in-loop filtering"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "key=value file; command-line flags override it");

  // Every subcommand exposes its keys as --key options.
  std::map<std::string, std::map<std::string, std::string>> given;
  const std::vector<std::string> bool_keys = {"neural", "filter"};
  for (const std::string cmd :
       {"encode", "decode", "train-filter", "train-intra", "eval", "bdrate", "info"}) {
    CLI::App* sub = app.add_subcommand(cmd);
    sub->fallthrough();
    for (const std::string& key : allowed_keys(cmd)) {
      if (std::find(bool_keys.begin(), bool_keys.end(), key) != bool_keys.end()) {
        sub->add_flag_callback("--" + key, [&given, cmd, key] { given[cmd][key] = "on"; });
      } else if (key == "arch") {
        sub->add_option_function<std::string>(
            "arch", [&given, cmd, key](const std::string& v) { given[cmd][key] = v; },
            "architecture tag, e.g. inception12, vrcnn, arcnn");
      } else {
        sub->add_option_function<std::string>(
            "--" + key, [&given, cmd, key](const std::string& v) { given[cmd][key] = v; });
      }
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    KeyValues values;
    if (!config_file.empty()) values = read_key_value_file(config_file);
    for (const auto& [k, v] : given[command]) values[k] = v;
    const RunConfig c = build_run_config(command, values);
    if (command == "encode") return cmd_encode(c, out);
    if (command == "decode") return cmd_decode(c, out);
    if (command == "train-filter") return cmd_train_filter(c, out);
    if (command == "train-intra") return cmd_train_intra(c, out);
    if (command == "eval") return cmd_eval(c, out);
    if (command == "bdrate") return cmd_bdrate(c, out);
    return cmd_info(c, out);
  } catch (const CorruptStream& e) {
    err << "error: corrupt stream: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const MissingModel& e) {
    err << "error: missing model bank " << e.bank_id() << ": " << e.what() << "\n";
    return kExitMissingModel;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace incodec::cli
