// Copyright 2026 The entwit Authors
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

// Minimal CSV tables with a schema check before anything touches disk.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace entwit {

// Shortest round-trip decimal for doubles; integers print without a point.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string format_number(int x) { return std::to_string(x); }
inline std::string format_number(long long x) { return std::to_string(x); }

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  template <class... Ts>
  void add(const Ts&... values) {
    std::vector<std::string> row;
    (row.push_back(cell(values)), ...);
    add_row(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i] == name) return i;
    }
    throw std::out_of_range("no CSV column " + name);
  }

  // Header present, unique non-empty names, every row the header's width,
  // no cell that would need quoting.
  void validate() const {
    if (header_.empty()) throw std::logic_error("CSV table has no header");
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i].empty()) throw std::logic_error("empty CSV column name");
      for (std::size_t k = 0; k < i; ++k) {
        if (header_[k] == header_[i]) throw std::logic_error("duplicate CSV column " + header_[i]);
      }
    }
    for (const auto& row : rows_) {
      if (row.size() != header_.size()) {
        throw std::logic_error("CSV row width " + std::to_string(row.size()) +
                               " does not match header width " +
                               std::to_string(header_.size()));
      }
      for (const auto& c : row) {
        if (c.find_first_of(",\"\n") != std::string::npos) {
          throw std::logic_error("CSV cell needs quoting: " + c);
        }
      }
    }
  }

  std::string str() const {
    validate();
    std::ostringstream out;
    write_line(out, header_);
    for (const auto& row : rows_) write_line(out, row);
    return out.str();
  }

  void write(const std::filesystem::path& path) const {
    const std::string text = str();
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  static std::string cell(int x) { return format_number(x); }
  static std::string cell(long long x) { return format_number(x); }
  static std::string cell(double x) { return format_number(x); }

  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace entwit
