// Copyright 2026 The symbreak-sim Authors
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
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace symbreak::cli {

using Cell = std::variant<double, long long, bool, std::string>;

class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  // Throws std::invalid_argument when the row length differs from the
  // column count.
  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;

  // Scalar results that do not fit the row layout (fit slopes, verdicts).
  nlohmann::json summary = nlohmann::json::object();

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Numbers use the shortest round-trip representation, so identical runs
// produce identical bytes.
std::string format_cell(const Cell& c);

// Header row plus one line per row, comma-separated, LF endings.
void write_csv(std::ostream& out, const ResultTable& table);

struct PlotSpec {
  enum class Kind { Line, Heatmap };
  Kind kind = Kind::Line;
  std::string title;
  std::string x;
  std::vector<std::string> y;  // line: one series per column; heatmap: {y, value}
  std::string group;           // line: split the series by this column
  bool log_x = false;
  bool log_y = false;
};

// Static SVG line chart or heatmap of `table`. Non-finite values and values
// that cannot be shown on a log axis are skipped.
void write_svg(std::ostream& out, const ResultTable& table, const PlotSpec& plot);

}  // namespace symbreak::cli
