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
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "output.hpp"

namespace symbreak::cli {

// A physics-level failure (solver breakdown, instability where a stable
// state was expected). Maps to exit code 1.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::string name;
  // The figure or analysis this experiment regenerates, in words.
  std::string reproduces;
  std::vector<KeySpec> keys;
  PlotSpec plot;
  std::function<ResultTable(const ExperimentConfig&)> run;
};

const std::vector<Experiment>& registry();
const Experiment* find_experiment(const std::string& name);
std::vector<std::string> experiment_names();

struct RunOutcome {
  ResultTable table;
  nlohmann::json metadata;
  std::vector<std::filesystem::path> files;
};

// Runs the experiment and writes <out>/<name>.{csv,json,svg} for the
// requested formats. Library exceptions other than invalid arguments are
// rethrown as PhysicsError with the experiment name attached.
RunOutcome run_experiment(const Experiment& experiment, const ExperimentConfig& config);

std::string git_revision();

}  // namespace symbreak::cli
