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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace incodec::cli {

using KeyValues = std::map<std::string, std::string>;

// Settings of one invocation, merged from an optional key=value file and the
// command line (command line wins) and validated before any work starts.
struct RunConfig {
  std::string command;

  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
  std::filesystem::path recon;
  std::filesystem::path manifest;
  std::filesystem::path report;
  std::vector<std::filesystem::path> models;

  int width = 0;
  int height = 0;
  int frame = 0;
  int frames = 1;

  int qp = 32;
  std::vector<int> qps = {22, 27, 32, 37};
  bool neural = false;
  bool filter = false;

  std::uint64_t seed = 1;
  long steps = -1;  // command default when negative
  double lr = 0.0;  // command default when zero
  int batch = 16;
  int blocks = 2;
  int pre_channels = 64;
  int branch_channels = 32;
  std::vector<int> hidden = {512, 512};
  int samples = 4096;
  int bank_id = 1;

  std::string anchor = "off";
  std::vector<std::string> tests = {"filter"};
  std::filesystem::path anchor_csv;
  std::filesystem::path test_csv;
  std::string arch;
};

// Keys accepted by each command; anything else is rejected.
const std::vector<std::string>& allowed_keys(const std::string& command);

// Lines "key = value"; blank lines and '#' comments ignored.
KeyValues read_key_value_file(const std::filesystem::path& path);

// Throws ContractViolation naming the offending key.
RunConfig build_run_config(const std::string& command, const KeyValues& values);

// "off", "filter", "neural" or "filter+neural".
bool valid_coding_config(const std::string& name);

}  // namespace incodec::cli
