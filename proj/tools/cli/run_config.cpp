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

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "incodec/error.hpp"
#include "incodec/model_bank.hpp"

namespace incodec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ContractViolation(key + ": '" + text + "' is not a valid number");
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ContractViolation(key + ": '" + text + "' is not a valid number");
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw ContractViolation(key + ": expected on/off, got '" + text + "'");
}

int ranged(const std::string& key, int v, int lo, int hi) {
  if (v < lo || v > hi)
    throw ContractViolation(key + "=" + std::to_string(v) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  return v;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

bool valid_coding_config(const std::string& name) {
  return name == "off" || name == "filter" || name == "neural" || name == "filter+neural";
}

const std::vector<std::string>& allowed_keys(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"encode", {"input", "output", "recon", "width", "height", "frame", "qp", "neural", "filter",
                  "models"}},
      {"decode", {"input", "output", "models"}},
      {"train-filter", {"manifest", "output", "qps", "steps", "lr", "batch", "blocks",
                        "pre-channels", "branch-channels", "seed", "bank-id"}},
      {"train-intra", {"manifest", "output", "steps", "lr", "batch", "hidden", "samples", "seed",
                       "bank-id"}},
      {"eval", {"input", "width", "height", "frames", "qps", "anchor", "test", "models", "report"}},
      {"bdrate", {"anchor", "test"}},
      {"info", {"arch"}},
  };
  const auto it = keys.find(command);
  if (it == keys.end()) throw ContractViolation("unknown command '" + command + "'");
  return it->second;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path.string());
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractViolation(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig build_run_config(const std::string& command, const KeyValues& values) {
  const auto& allowed = allowed_keys(command);
  for (const auto& [key, value] : values)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ContractViolation("unknown key '" + key + "' for " + command);

  RunConfig c;
  c.command = command;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  auto get_int = [&](const std::string& key, int& field, int lo, int hi) {
    if (auto v = get(key)) field = ranged(key, parse_number<int>(key, *v), lo, hi);
  };
  auto paths = [&](const std::string& key) {
    std::vector<std::filesystem::path> out;
    if (auto v = get(key))
      for (const std::string& s : split_list(*v)) out.emplace_back(s);
    return out;
  };

  c.inputs = paths("input");
  c.models = paths("models");
  if (auto v = get("output")) c.output = *v;
  if (auto v = get("recon")) c.recon = *v;
  if (auto v = get("manifest")) c.manifest = *v;
  if (auto v = get("report")) c.report = *v;
  get_int("width", c.width, 1, 65535);
  get_int("height", c.height, 1, 65535);
  get_int("frame", c.frame, 0, 1 << 30);
  get_int("frames", c.frames, 1, 1 << 20);
  get_int("qp", c.qp, 0, kMaxQp);
  if (auto v = get("qps")) {
    c.qps.clear();
    for (const std::string& s : split_list(*v)) c.qps.push_back(ranged("qps", parse_number<int>("qps", s), 0, kMaxQp));
  }
  if (auto v = get("neural")) c.neural = parse_bool("neural", *v);
  if (auto v = get("filter")) c.filter = parse_bool("filter", *v);
  if (auto v = get("seed")) c.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("steps")) {
    c.steps = parse_number<long>("steps", *v);
    require(c.steps >= 0, "steps must be non-negative");
  }
  if (auto v = get("lr")) {
    c.lr = parse_double("lr", *v);
    require(c.lr > 0.0, "lr must be positive");
  }
  get_int("batch", c.batch, 1, 1 << 16);
  get_int("blocks", c.blocks, 0, 64);
  get_int("pre-channels", c.pre_channels, 1, 1024);
  get_int("branch-channels", c.branch_channels, 1, 1024);
  get_int("samples", c.samples, 1, 1 << 24);
  get_int("bank-id", c.bank_id, 0, 255);
  if (auto v = get("hidden")) {
    c.hidden.clear();
    for (const std::string& s : split_list(*v))
      c.hidden.push_back(ranged("hidden", parse_number<int>("hidden", s), 1, 1 << 16));
  }
  if (auto v = get("arch")) c.arch = *v;

  if (command == "bdrate") {
    if (auto v = get("anchor")) c.anchor_csv = *v;
    if (auto v = get("test")) c.test_csv = *v;
    require(!c.anchor_csv.empty() && !c.test_csv.empty(), "bdrate needs anchor and test CSV files");
  } else {
    if (auto v = get("anchor")) c.anchor = *v;
    if (auto v = get("test")) c.tests = split_list(*v);
  }

  if (command == "encode") {
    require(c.inputs.size() == 1, "encode needs exactly one input");
    require(!c.output.empty(), "encode needs an output path");
    require((c.width == 0) == (c.height == 0), "width and height go together");
  } else if (command == "decode") {
    require(c.inputs.size() == 1, "decode needs exactly one input");
    require(!c.output.empty(), "decode needs an output path");
  } else if (command == "train-filter" || command == "train-intra") {
    require(!c.manifest.empty(), command + " needs a manifest");
    require(!c.output.empty(), command + " needs an output directory");
    require(!c.qps.empty(), "qps is empty");
  } else if (command == "eval") {
    require(!c.inputs.empty(), "eval needs at least one input");
    require(c.qps.size() >= 4, "eval needs at least 4 QPs for BD-rate, got " + std::to_string(c.qps.size()));
    require(valid_coding_config(c.anchor), "unknown anchor configuration '" + c.anchor + "'");
    require(!c.tests.empty(), "eval needs a test configuration");
    for (const std::string& t : c.tests)
      require(valid_coding_config(t), "unknown test configuration '" + t + "'");
  } else if (command == "info") {
    require(!c.arch.empty(), "info needs an architecture name");
  }
  return c;
}

}  // namespace incodec::cli
