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

#include "incodec/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "incodec/error.hpp"

namespace incodec {

namespace {

constexpr const char* kComponents[3] = {"Y", "U", "V"};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  // Print -0.00 as 0.00.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void check_shape(const BDReport& r) {
  for (const BdRow& row : r.rows)
    if (row.values.size() != r.configurations.size())
      throw ContractViolation("report row '" + row.sequence + "' has " +
                              std::to_string(row.values.size()) + " configurations, expected " +
                              std::to_string(r.configurations.size()));
}

}  // namespace

std::vector<ComponentTriple> BDReport::averages() const {
  check_shape(*this);
  std::vector<ComponentTriple> avg(configurations.size());
  for (std::size_t c = 0; c < configurations.size(); ++c)
    for (int k = 0; k < 3; ++k) {
      double sum = 0.0;
      int n = 0;
      for (const BdRow& row : rows)
        if (row.values[c][k]) {
          sum += *row.values[c][k];
          ++n;
        }
      if (n) avg[c][k] = sum / n;
    }
  return avg;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string report_csv(const BDReport& report) {
  check_shape(report);
  std::ostringstream os;
  os << "Sequence";
  for (const std::string& cfg : report.configurations)
    for (const char* comp : kComponents) os << "," << csv_escape(cfg + " " + comp);
  os << "\r\n";
  auto emit = [&](const std::string& name, const std::vector<ComponentTriple>& values) {
    os << csv_escape(name);
    for (const ComponentTriple& t : values)
      for (const auto& v : t) os << "," << (v ? fixed(*v, 6) : std::string());
    os << "\r\n";
  };
  for (const BdRow& row : report.rows) emit(row.sequence, row.values);
  if (!report.rows.empty()) emit("Average", report.averages());
  return os.str();
}

std::string report_markdown(const BDReport& report) {
  check_shape(report);
  std::ostringstream os;
  os << "| Sequence |";
  for (const std::string& cfg : report.configurations)
    for (const char* comp : kComponents) os << " " << cfg << " " << comp << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < report.configurations.size() * 3; ++i) os << "---:|";
  os << "\n";
  auto emit = [&](const std::string& name, const std::vector<ComponentTriple>& values) {
    os << "| " << name << " |";
    for (const ComponentTriple& t : values)
      for (const auto& v : t) os << " " << (v ? fixed(*v, 2) + "%" : std::string("n/a")) << " |";
    os << "\n";
  };
  for (const BdRow& row : report.rows) emit(row.sequence, row.values);
  if (!report.rows.empty()) emit("Average", report.averages());
  return os.str();
}

}  // namespace incodec
