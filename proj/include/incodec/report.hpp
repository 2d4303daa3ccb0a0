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

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace incodec {

// One BD-rate value per component; empty when it could not be computed
// (e.g. a component whose PSNR is infinite at some QP).
using ComponentTriple = std::array<std::optional<double>, 3>;

struct BdRow {
  std::string sequence;
  std::vector<ComponentTriple> values;  // one per configuration
};

struct BDReport {
  std::vector<std::string> configurations;
  std::vector<BdRow> rows;

  // Arithmetic mean of each column over rows that carry a value.
  std::vector<ComponentTriple> averages() const;
};

// RFC-4180 CSV: header, one row per sequence, trailing "Average" row
// (omitted when there are no rows). Values are percentages.
std::string report_csv(const BDReport& report);
// Pipe table with the same layout; values printed as e.g. "-1.23%".
std::string report_markdown(const BDReport& report);

std::string csv_escape(const std::string& field);

}  // namespace incodec
