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


#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <openssl/evp.h>

namespace symbreak::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

const KeySpec* find_key(const std::vector<KeySpec>& keys, const std::string& name) {
  for (const auto& k : keys)
    if (k.name == name) return &k;
  return nullptr;
}

// Converts a raw value (JSON scalar or string from the command line) to the
// typed value of `spec`.
nlohmann::json coerce(const KeySpec& spec, const nlohmann::json& raw) {
  const auto as_text = [&]() -> std::string {
    if (raw.is_string()) return raw.get<std::string>();
    return raw.dump();
  };
  switch (spec.kind) {
    case ValueKind::Real: {
      const double v = raw.is_number() ? raw.get<double>() : parse_real(as_text());
      if (spec.non_negative && v < 0.0) throw ConfigError("'" + spec.name + "' must be non-negative, got " + as_text());
      return v;
    }
    case ValueKind::Integer: {
      if (raw.is_number_float()) throw ConfigError("'" + spec.name + "' must be an integer, got " + as_text());
      const long long v = raw.is_number_integer() ? raw.get<long long>() : parse_integer(as_text());
      if (spec.non_negative && v < 0) throw ConfigError("'" + spec.name + "' must be non-negative, got " + as_text());
      return v;
    }
    case ValueKind::RealList: {
      std::vector<double> v;
      if (raw.is_array()) {
        for (const auto& e : raw) {
          if (!e.is_number()) throw ConfigError("'" + spec.name + "' list entries must be numbers");
          v.push_back(e.get<double>());
        }
      } else if (raw.is_number()) {
        v.push_back(raw.get<double>());
      } else {
        v = parse_real_list(as_text());
      }
      if (v.empty()) throw ConfigError("'" + spec.name + "' is an empty list");
      if (spec.non_negative)
        for (double x : v)
          if (x < 0.0) throw ConfigError("'" + spec.name + "' entries must be non-negative");
      return v;
    }
    case ValueKind::Text:
      if (!raw.is_string()) throw ConfigError("'" + spec.name + "' must be a string");
      return raw.get<std::string>();
    case ValueKind::Flag:
      if (raw.is_boolean()) return raw.get<bool>();
      return parse_flag(as_text());
  }
  throw ConfigError("unhandled value kind for '" + spec.name + "'");
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  if (name == "svg") return OutputFormat::Svg;
  throw ConfigError("unknown output format '" + name + "' (expected csv, json or svg)");
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Json:
      return "json";
    case OutputFormat::Svg:
      return "svg";
  }
  return "?";
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("expected a finite number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("expected an integer, got '" + text + "'");
  return v;
}

bool parse_flag(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("log:", 0) == 0) {
    const auto parts = split(t.substr(4), ':');
    if (parts.size() != 3) throw ConfigError("log grid must be log:start:stop:count, got '" + text + "'");
    const double a = parse_real(parts[0]), b = parse_real(parts[1]);
    const long long n = parse_integer(parts[2]);
    if (a <= 0.0 || b <= 0.0 || n < 1) throw ConfigError("log grid needs positive bounds and count, got '" + text + "'");
    std::vector<double> v;
    for (long long k = 0; k < n; ++k) {
      const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
      v.push_back(std::pow(10.0, std::log10(a) + f * (std::log10(b) - std::log10(a))));
    }
    return v;
  }
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("grid must be start:stop:step, got '" + text + "'");
    const double a = parse_real(parts[0]), b = parse_real(parts[1]), h = parse_real(parts[2]);
    if (h <= 0.0 || b < a) throw ConfigError("grid needs step > 0 and stop >= start, got '" + text + "'");
    const long long n = static_cast<long long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (n > 1000000) throw ConfigError("grid '" + text + "' has too many points");
    std::vector<double> v;
    // Multiplying instead of accumulating keeps grid points reproducible.
    for (long long k = 0; k < n; ++k) v.push_back(a + static_cast<double>(k) * h);
    return v;
  }
  std::vector<double> v;
  for (const auto& item : split(t, ',')) v.push_back(parse_real(item));
  return v;
}

double ExperimentConfig::real(const std::string& key) const { return params.at(key).get<double>(); }
long long ExperimentConfig::integer(const std::string& key) const { return params.at(key).get<long long>(); }
std::vector<double> ExperimentConfig::reals(const std::string& key) const { return params.at(key).get<std::vector<double>>(); }
std::string ExperimentConfig::text(const std::string& key) const { return params.at(key).get<std::string>(); }
bool ExperimentConfig::flag(const std::string& key) const { return params.at(key).get<bool>(); }

nlohmann::json ExperimentConfig::canonical() const {
  // nlohmann::json objects keep keys sorted, so the dump is canonical.
  return {{"experiment", experiment}, {"seed", seed}, {"params", params}};
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  RawConfig raw;
  for (const auto& [key, value] : doc.items()) {
    if (key == "experiment") {
      if (!value.is_string()) throw ConfigError("'experiment' must be a string");
      raw.experiment = value.get<std::string>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
      raw.seed = value.get<std::uint64_t>();
    } else if (key == "out") {
      if (!value.is_string()) throw ConfigError("'out' must be a string");
      raw.output_dir = value.get<std::string>();
    } else if (key == "format") {
      if (value.is_string()) {
        raw.formats.push_back(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& f : value) {
          if (!f.is_string()) throw ConfigError("'format' entries must be strings");
          raw.formats.push_back(f.get<std::string>());
        }
      } else {
        throw ConfigError("'format' must be a string or a list of strings");
      }
    } else if (key == "params") {
      if (!value.is_object()) throw ConfigError("'params' must be an object");
      for (const auto& [k, v] : value.items()) raw.params[k] = v;
    } else {
      throw ConfigError("unknown top-level key '" + key + "' (expected experiment, seed, out, format, params)");
    }
  }
  return raw;
}

ExperimentConfig resolve_config(const std::string& experiment, const std::vector<KeySpec>& keys, const RawConfig& raw) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  std::vector<std::string> names;
  for (const auto& k : keys) names.push_back(k.name);
  for (const auto& [name, value] : raw.params) {
    const KeySpec* spec = find_key(keys, name);
    if (!spec) {
      std::string msg = "unknown key '" + name + "' for experiment " + experiment;
      const auto near = suggestions(name, names);
      if (!near.empty()) {
        msg += " (did you mean";
        for (const auto& s : near) msg += " " + s;
        msg += "?)";
      }
      throw ConfigError(msg);
    }
    try {
      cfg.params[name] = coerce(*spec, value);
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      throw ConfigError(what.find("'" + name + "'") == std::string::npos ? "'" + name + "': " + what : what);
    }
  }
  for (const auto& spec : keys) {
    if (cfg.params.contains(spec.name)) continue;
    if (!spec.default_value) throw ConfigError("missing required key '" + spec.name + "' for experiment " + experiment);
    cfg.params[spec.name] = coerce(spec, nlohmann::json(*spec.default_value));
  }
  if (raw.seed) cfg.seed = *raw.seed;
  if (raw.output_dir) cfg.output_dir = *raw.output_dir;
  if (!raw.formats.empty()) {
    cfg.formats.clear();
    for (const auto& f : raw.formats)
      for (const auto& item : split(f, ',')) {
        const OutputFormat of = parse_format(item);
        if (std::find(cfg.formats.begin(), cfg.formats.end(), of) == cfg.formats.end()) cfg.formats.push_back(of);
      }
  }
  return cfg;
}

nlohmann::json config_file_json(const ExperimentConfig& config) {
  nlohmann::json formats = nlohmann::json::array();
  for (auto f : config.formats) formats.push_back(format_name(f));
  return {{"experiment", config.experiment},
          {"seed", config.seed},
          {"out", config.output_dir.string()},
          {"format", formats},
          {"params", config.params}};
}

std::vector<std::string> suggestions(const std::string& name, const std::vector<std::string>& candidates, std::size_t limit) {
  const auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
        diag = up;
      }
    }
    return row[b.size()];
  };
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& c : candidates) {
    const std::size_t d = distance(name, c);
    if (d <= std::max<std::size_t>(2, c.size() / 2)) scored.emplace_back(d, c);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::string> out;
  for (const auto& s : scored) {
    if (out.size() == limit) break;
    out.push_back(s.second);
  }
  return out;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256_hex: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace symbreak::cli
