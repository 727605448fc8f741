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


#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"

namespace {

using namespace symbreak::cli;

constexpr int kExitPhysics = 1;
constexpr int kExitConfig = 2;

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? sep : "") + items[k];
  return out;
}

[[noreturn]] void unknown_experiment(const std::string& name) {
  std::string msg = "unknown experiment '" + name + "'";
  const auto near = suggestions(name, experiment_names());
  if (!near.empty()) msg += "; did you mean: " + join(near, ", ");
  msg += "\navailable experiments: " + join(experiment_names(), ", ");
  throw ConfigError(msg);
}

int validate(const std::string& path, bool print_resolved) {
  const RawConfig raw = read_config_file(path);
  if (!raw.experiment) throw ConfigError("config has no 'experiment' key");
  const Experiment* e = find_experiment(*raw.experiment);
  if (!e) unknown_experiment(*raw.experiment);
  const ExperimentConfig cfg = resolve_config(e->name, e->keys, raw);
  if (print_resolved) {
    std::cout << config_file_json(cfg).dump(2) << '\n';
  } else {
    std::cout << "ok\n";
  }
  return 0;
}

int run(const std::string& experiment_name, std::map<std::string, std::string>& values, const std::vector<std::string>& extras,
        const std::string& config_path, const std::string& out_dir, const std::vector<std::string>& formats,
        const std::optional<std::uint64_t>& seed) {
  RawConfig raw;
  if (!config_path.empty()) raw = read_config_file(config_path);
  std::string name = experiment_name;
  if (name.empty()) {
    if (!raw.experiment) throw ConfigError("no experiment given on the command line or in the config file");
    name = *raw.experiment;
  } else if (raw.experiment && *raw.experiment != name) {
    throw ConfigError("config file is for experiment '" + *raw.experiment + "', not '" + name + "'");
  }
  const Experiment* e = find_experiment(name);
  if (!e) unknown_experiment(name);

  if (!extras.empty()) {
    std::vector<std::string> names;
    for (const auto& k : e->keys) names.push_back(k.name);
    std::string key = extras.front();
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    std::string msg = "unknown key '" + key + "' for experiment " + name;
    const auto near = suggestions(key, names);
    if (!near.empty()) msg += " (did you mean " + join(near, ", ") + "?)";
    throw ConfigError(msg);
  }
  for (const auto& [k, v] : values) raw.params[k] = v;
  if (!out_dir.empty()) raw.output_dir = out_dir;
  if (!formats.empty()) raw.formats = formats;
  if (seed) raw.seed = *seed;

  const ExperimentConfig cfg = resolve_config(e->name, e->keys, raw);
  const RunOutcome outcome = run_experiment(*e, cfg);
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
  std::cout << outcome.metadata["summary"].dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  // `symbreak-sim <experiment> ...` is shorthand for `symbreak-sim run <experiment> ...`.
  if (!args.empty() && find_experiment(args.front())) args.insert(args.begin(), "run");
  if (args.size() >= 2 && args[0] == "run" && args[1].rfind("-", 0) != 0 && !find_experiment(args[1])) {
    try {
      unknown_experiment(args[1]);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  CLI::App app{"symbreak-sim: driven-dissipative bosonic lattice experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment");
  run_cmd->require_subcommand(0, 1);
  std::string config_path, out_dir;
  std::vector<std::string> formats;
  std::string seed_text;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (command-line keys override it)");
    cmd->add_option("--out", out_dir, "output directory (default: results)");
    cmd->add_option("--format", formats, "csv, json and/or svg (default: all)")->delimiter(',');
    cmd->add_option("--seed", seed_text, "random seed (default: 0)");
  };
  add_common(run_cmd);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> experiment_cmds;
  for (const auto& e : registry()) {
    auto* cmd = run_cmd->add_subcommand(e.name, e.reproduces);
    cmd->allow_extras();
    add_common(cmd);
    for (const auto& k : e.keys) {
      std::string help = k.help;
      help += k.default_value ? " [default: " + *k.default_value + "]" : " [required]";
      cmd->add_option("--" + k.name, values[e.name][k.name], help);
    }
    experiment_cmds[e.name] = cmd;
  }

  auto* validate_cmd = app.add_subcommand("validate", "check a config file against the experiment schema");
  std::string validate_path;
  bool print_resolved = false;
  validate_cmd->add_option("path", validate_path, "config file")->required();
  validate_cmd->add_flag("--resolved", print_resolved, "print the resolved config instead of 'ok'");

  auto* list_cmd = app.add_subcommand("list", "list the available experiments");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list_cmd) {
      for (const auto& e : registry()) std::cout << e.name << "  " << e.reproduces << '\n';
      return 0;
    }
    if (*validate_cmd) return validate(validate_path, print_resolved);

    std::string chosen;
    for (const auto& [name, cmd] : experiment_cmds)
      if (*cmd) chosen = name;
    std::map<std::string, std::string> given;
    std::vector<std::string> extras;
    if (!chosen.empty()) {
      const auto* cmd = experiment_cmds[chosen];
      for (const auto& k : find_experiment(chosen)->keys)
        if (cmd->count("--" + k.name) > 0) given[k.name] = values[chosen][k.name];
      extras = cmd->remaining();
    }
    std::optional<std::uint64_t> seed;
    if (!seed_text.empty()) {
      const long long v = parse_integer(seed_text);
      if (v < 0) throw ConfigError("'seed' must be non-negative");
      seed = static_cast<std::uint64_t>(v);
    }
    return run(chosen, given, extras, config_path, out_dir, formats, seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPhysics;
  }
}
