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

#include "incodec/model_bank.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "incodec/weights_io.hpp"

namespace incodec {

std::vector<QpBand> bands_for(const std::vector<int>& train_qps) {
  if (train_qps.empty()) throw ContractViolation("bands_for: no training QPs");
  std::vector<int> qps = train_qps;
  std::sort(qps.begin(), qps.end());
  if (std::adjacent_find(qps.begin(), qps.end()) != qps.end())
    throw ContractViolation("bands_for: duplicate training QP");
  std::vector<QpBand> bands;
  int lo = 0;
  for (std::size_t i = 0; i < qps.size(); ++i) {
    const int hi = i + 1 < qps.size() ? (qps[i] + qps[i + 1]) / 2 : kMaxQp;
    bands.push_back({lo, hi, qps[i]});
    lo = hi + 1;
  }
  return bands;
}

std::vector<QpBand> default_qp_bands() { return bands_for({22, 27, 32, 37}); }

void ModelBank::validate() const {
  if (bands.empty()) throw ContractViolation("model bank has no bands");
  if (bands.size() != weights.size())
    throw ContractViolation("model bank has " + std::to_string(bands.size()) + " bands but " +
                            std::to_string(weights.size()) + " weight sets");
  int next = 0;
  for (const QpBand& b : bands) {
    if (b.lo != next || b.hi < b.lo)
      throw ContractViolation("model bank bands must be ordered, disjoint and contiguous from 0");
    next = b.hi + 1;
  }
  if (next != kMaxQp + 1) throw ContractViolation("model bank bands do not reach QP 51");
}

const WeightStore& select_model(const ModelBank& bank, int qp) {
  if (qp < 0 || qp > kMaxQp) throw ContractViolation("select_model: qp out of range");
  for (std::size_t i = 0; i < bank.bands.size(); ++i)
    if (bank.bands[i].contains(qp)) return bank.weights[i];
  throw ContractViolation("select_model: no band covers qp " + std::to_string(qp));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void save_models(const std::filesystem::path& dir, const CodecModels& models) {
  std::filesystem::create_directories(dir);
  std::ostringstream cfg;
  cfg << "id=" << models.id << "\n";
  if (models.filter) {
    models.filter->validate();
    const NetworkGraph graph = build_from_tag(models.filter->arch_tag);
    cfg << "filter_arch=" << models.filter->arch_tag << "\n";
    for (std::size_t i = 0; i < models.filter->bands.size(); ++i) {
      const QpBand& b = models.filter->bands[i];
      const std::string file = "filter_qp" + std::to_string(b.train_qp) + ".nnwt";
      save_weights(models.filter->weights[i], graph, dir / file);
      cfg << "band=" << b.lo << "," << b.hi << "," << b.train_qp << "," << file << "\n";
    }
  }
  if (models.intra) {
    const NetworkGraph graph = build_from_tag(models.intra->arch_tag);
    save_weights(*models.intra, graph, dir / "intra.nnwt");
    cfg << "intra=intra.nnwt\n";
  }
  std::ofstream os(dir / "bank.cfg", std::ios::trunc);
  if (!os) throw IoError("cannot write " + (dir / "bank.cfg").string());
  os << cfg.str();
}

namespace {

int config_int(const std::string& text, const std::filesystem::path& cfg, int lineno) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw IoError(cfg.string() + ":" + std::to_string(lineno) + ": '" + text + "' is not an integer");
}

}  // namespace

CodecModels load_models(const std::filesystem::path& dir) {
  const std::filesystem::path cfg_path = dir / "bank.cfg";
  std::ifstream is(cfg_path);
  if (!is) throw IoError("cannot open model bank " + cfg_path.string());
  CodecModels models;
  ModelBank bank;
  bool has_id = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(cfg_path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "id") {
      models.id = config_int(value, cfg_path, lineno);
      if (models.id < 0 || models.id > 255) throw IoError(cfg_path.string() + ": id out of range");
      has_id = true;
    } else if (key == "filter_arch") {
      bank.arch_tag = value;
    } else if (key == "band") {
      std::istringstream vs(value);
      std::string lo, hi, qp, file;
      if (!std::getline(vs, lo, ',') || !std::getline(vs, hi, ',') || !std::getline(vs, qp, ',') ||
          !std::getline(vs, file))
        throw IoError(cfg_path.string() + ":" + std::to_string(lineno) + ": malformed band");
      bank.bands.push_back({config_int(trim(lo), cfg_path, lineno), config_int(trim(hi), cfg_path, lineno),
                            config_int(trim(qp), cfg_path, lineno)});
      bank.weights.push_back(load_weights(dir / trim(file)));
    } else if (key == "intra") {
      WeightStore w = load_weights(dir / value);
      const NetworkGraph g = build_from_tag(w.arch_tag);
      validate_weights(g, w);
      models.intra = std::move(w);
    } else {
      throw IoError(cfg_path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                    "'");
    }
  }
  if (!has_id) throw IoError(cfg_path.string() + ": missing id");
  if (!bank.bands.empty()) {
    if (bank.arch_tag.empty()) throw IoError(cfg_path.string() + ": bands without filter_arch");
    const NetworkGraph g = build_from_tag(bank.arch_tag);
    for (const WeightStore& w : bank.weights) validate_weights(g, w);
    bank.validate();
    models.filter = std::move(bank);
  }
  return models;
}

}  // namespace incodec
