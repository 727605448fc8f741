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


#include "output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace symbreak::cli {

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("ResultTable: no columns");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument(fmt::format("ResultTable: row has {} cells, table has {} columns", row.size(), columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::invalid_argument("ResultTable: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> ResultTable::numeric_column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) {
    const Cell& cell = r[c];
    if (const auto* d = std::get_if<double>(&cell)) {
      out.push_back(*d);
    } else if (const auto* i = std::get_if<long long>(&cell)) {
      out.push_back(static_cast<double>(*i));
    } else if (const auto* b = std::get_if<bool>(&cell)) {
      out.push_back(*b ? 1.0 : 0.0);
    } else {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
    return std::string(buf.data(), res.ptr);
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

void write_csv(std::ostream& out, const ResultTable& table) {
  const auto& cols = table.columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
    out << '\n';
  }
}

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0, pixel_hi = 1.0;

  double to_pixel(double v) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += step) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const std::vector<double>& values, bool log, double pixel_lo, double pixel_hi) {
  Axis a;
  a.log = log;
  a.pixel_lo = pixel_lo;
  a.pixel_hi = pixel_hi;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!usable(v, log)) continue;
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= log ? 0.5 : std::max(0.5, std::abs(lo) * 0.1);
    hi += log ? 0.5 : std::max(0.5, std::abs(hi) * 0.1);
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::string tick_label(double v) { return fmt::format("{:.3g}", v); }

void frame(std::ostream& out, const Axis& ax, const Axis& ay, const PlotSpec& plot, const std::string& xlabel,
           const std::string& ylabel) {
  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                     kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", (kLeft + kWidth - kRight) / 2,
                     escape(plot.title));
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
                     kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  for (double t : ax.ticks()) {
    const double px = ax.to_pixel(t);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n", px, kHeight - kBottom,
                       kHeight - kBottom + 5);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px, kHeight - kBottom + 18, tick_label(t));
  }
  for (double t : ay.ticks()) {
    const double py = ay.to_pixel(t);
    out << fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", kLeft - 5, py, kLeft);
    out << fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 8, py + 4, tick_label(t));
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth - kRight) / 2, kHeight - 15,
                     escape(xlabel));
  out << fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                     (kTop + kHeight - kBottom) / 2, escape(ylabel));
}

void line_chart(std::ostream& out, const ResultTable& table, const PlotSpec& plot) {
  const auto xs = table.numeric_column(plot.x);
  std::vector<std::string> group_labels(xs.size());
  if (!plot.group.empty()) {
    const std::size_t g = table.column_index(plot.group);
    for (std::size_t r = 0; r < xs.size(); ++r) group_labels[r] = format_cell(table.rows()[r][g]);
  }
  std::vector<double> all_y;
  std::vector<std::vector<double>> ys;
  for (const auto& name : plot.y) {
    ys.push_back(table.numeric_column(name));
    all_y.insert(all_y.end(), ys.back().begin(), ys.back().end());
  }
  const Axis ax = make_axis(xs, plot.log_x, kLeft, kWidth - kRight);
  const Axis ay = make_axis(all_y, plot.log_y, kHeight - kBottom, kTop);
  frame(out, ax, ay, plot, plot.x, plot.y.size() == 1 ? plot.y.front() : std::string());

  // Series in order of first appearance, so the output is deterministic.
  std::vector<std::string> groups;
  for (const auto& g : group_labels)
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);

  std::size_t series = 0;
  for (std::size_t c = 0; c < ys.size(); ++c) {
    for (const auto& g : groups) {
      const char* color = kPalette[series % kPalette.size()];
      std::string points;
      for (std::size_t r = 0; r < xs.size(); ++r) {
        if (group_labels[r] != g || !usable(xs[r], plot.log_x) || !usable(ys[c][r], plot.log_y)) continue;
        const double px = ax.to_pixel(xs[r]), py = ay.to_pixel(ys[c][r]);
        points += fmt::format("{:.2f},{:.2f} ", px, py);
        out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px, py, color);
      }
      if (!points.empty()) {
        points.pop_back();
        out << fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points, color);
      }
      std::string label = plot.y[c];
      if (!plot.group.empty()) label = (ys.size() > 1 ? label + ", " : std::string()) + plot.group + "=" + g;
      const double ly = kTop + 10 + 18 * static_cast<double>(series);
      out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n", kWidth - kRight + 12, ly,
                         kWidth - kRight + 32, color);
      out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kWidth - kRight + 38, ly + 4, escape(label));
      ++series;
    }
  }
  out << "</svg>\n";
}

std::string heat_color(double t) {
  // Piecewise-linear blue-white-red scale.
  static constexpr std::array<std::array<double, 3>, 3> stops{{{49, 54, 149}, {247, 247, 247}, {165, 0, 38}}};
  t = std::clamp(t, 0.0, 1.0);
  const double s = t * 2.0;
  const std::size_t k = std::min<std::size_t>(1, static_cast<std::size_t>(s));
  const double f = s - static_cast<double>(k);
  std::array<int, 3> rgb{};
  for (int i = 0; i < 3; ++i) rgb[i] = static_cast<int>(std::lround(stops[k][i] + f * (stops[k + 1][i] - stops[k][i])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

void heatmap(std::ostream& out, const ResultTable& table, const PlotSpec& plot) {
  if (plot.y.size() != 2) throw std::invalid_argument("write_svg: heatmap needs y = {row column, value column}");
  const auto xs = table.numeric_column(plot.x);
  const auto ys = table.numeric_column(plot.y[0]);
  const auto zs = table.numeric_column(plot.y[1]);
  std::vector<double> ux, uy;
  for (double v : xs)
    if (usable(v, plot.log_x)) ux.push_back(v);
  for (double v : ys)
    if (usable(v, plot.log_y)) uy.push_back(v);
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());

  // Cells are laid out by rank so uneven grids still tile the plot area.
  Axis ax{0.0, static_cast<double>(std::max<std::size_t>(ux.size(), 1)), false, kLeft, kWidth - kRight};
  Axis ay{0.0, static_cast<double>(std::max<std::size_t>(uy.size(), 1)), false, kHeight - kBottom, kTop};
  double zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
  for (double z : zs)
    if (std::isfinite(z)) {
      zlo = std::min(zlo, z);
      zhi = std::max(zhi, z);
    }
  if (!(zhi > zlo)) zhi = zlo + 1.0;

  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                     kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", (kLeft + kWidth - kRight) / 2,
                     escape(plot.title));
  const double cw = (ax.pixel_hi - ax.pixel_lo) / ax.hi, ch = (ay.pixel_lo - ay.pixel_hi) / ay.hi;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    if (!usable(xs[r], plot.log_x) || !usable(ys[r], plot.log_y) || !std::isfinite(zs[r])) continue;
    const auto i = static_cast<double>(std::lower_bound(ux.begin(), ux.end(), xs[r]) - ux.begin());
    const auto j = static_cast<double>(std::lower_bound(uy.begin(), uy.end(), ys[r]) - uy.begin());
    out << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", ax.to_pixel(i),
                       ay.to_pixel(j + 1.0), cw + 0.3, ch + 0.3, heat_color((zs[r] - zlo) / (zhi - zlo)));
  }
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
                     kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  const auto label_every = [](std::size_t n) { return std::max<std::size_t>(1, n / 6); };
  for (std::size_t i = 0; i < ux.size(); i += label_every(ux.size())) {
    out << fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", ax.to_pixel(static_cast<double>(i) + 0.5),
                       kHeight - kBottom + 18, tick_label(ux[i]));
  }
  for (std::size_t j = 0; j < uy.size(); j += label_every(uy.size())) {
    out << fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 8,
                       ay.to_pixel(static_cast<double>(j) + 0.5) + 4, tick_label(uy[j]));
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth - kRight) / 2, kHeight - 15,
                     escape(plot.x));
  out << fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                     (kTop + kHeight - kBottom) / 2, escape(plot.y[0]));
  // Colour bar.
  const double bx = kWidth - kRight + 30, bh = kHeight - kTop - kBottom;
  for (int k = 0; k < 50; ++k) {
    const double t = (k + 0.5) / 50.0;
    out << fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"18\" height=\"{:.2f}\" fill=\"{}\"/>\n", bx, kTop + bh * (1.0 - (k + 1) / 50.0),
                       bh / 50.0 + 0.3, heat_color(t));
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + 24, kTop + 10, tick_label(zhi));
  out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + 24, kTop + bh, tick_label(zlo));
  out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx, kTop - 8, escape(plot.y[1]));
  out << "</svg>\n";
}

}  // namespace

void write_svg(std::ostream& out, const ResultTable& table, const PlotSpec& plot) {
  if (plot.kind == PlotSpec::Kind::Heatmap) {
    heatmap(out, table, plot);
  } else {
    line_chart(out, table, plot);
  }
}

}  // namespace symbreak::cli
