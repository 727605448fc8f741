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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace symbreak::cli {

// Bad configuration: unknown keys, malformed values, missing required keys.
// Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueKind { Real, Integer, RealList, Text, Flag };

struct KeySpec {
  std::string name;
  ValueKind kind = ValueKind::Real;
  std::optional<std::string> default_value;  // absent means required
  std::string help;                          // meaning and unit
  bool non_negative = false;
};

enum class OutputFormat { Csv, Json, Svg };

OutputFormat parse_format(const std::string& name);
std::string format_name(OutputFormat f);

struct ExperimentConfig {
  std::string experiment;
  // Resolved parameters keyed by KeySpec::name. Numbers are stored as JSON
  // numbers, lists as arrays.
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  std::vector<OutputFormat> formats{OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg};

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;

  // Canonical JSON of experiment, seed and params; the config hash is taken
  // over its dump.
  nlohmann::json canonical() const;
};

// "0.1:3.0:0.05" (inclusive start:stop:step), "log:1e-2:1e2:41" (log-spaced
// points), or a comma-separated list.
std::vector<double> parse_real_list(const std::string& text);
double parse_real(const std::string& text);
long long parse_integer(const std::string& text);
bool parse_flag(const std::string& text);

// Raw key/value pairs gathered from a config file and the command line,
// before schema resolution. Command-line entries override file entries.
struct RawConfig {
  std::optional<std::string> experiment;
  std::map<std::string, nlohmann::json> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::vector<std::string> formats;
};

// Reads a JSON config file:
//   { "experiment": "...", "seed": 0, "out": "dir", "format": ["csv"],
//     "params": { "kappa-a": 4, ... } }
RawConfig read_config_file(const std::filesystem::path& path);

// Checks a raw config against the schema of `keys` and fills defaults.
// Throws ConfigError naming the offending key.
ExperimentConfig resolve_config(const std::string& experiment, const std::vector<KeySpec>& keys, const RawConfig& raw);

// Config-file form of a resolved configuration. Reading it back and
// resolving against the same schema gives the same configuration.
nlohmann::json config_file_json(const ExperimentConfig& config);

// Closest names by edit distance, for "did you mean" messages.
std::vector<std::string> suggestions(const std::string& name, const std::vector<std::string>& candidates, std::size_t limit = 3);

// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

}  // namespace symbreak::cli
