// Copyright 2026 The qpinn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Multi-seed experiment runner and figure-ready slice output.

#include <cstddef>
#include <string>
#include <vector>

#include "qpinn/config.hpp"
#include "qpinn/train.hpp"

namespace qpinn::experiment {

struct Aggregate {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n - 1)
};
Aggregate aggregate(const std::vector<double>& values);

struct ExperimentResult {
  std::vector<train::RunResult> runs;  // in seed order
  Aggregate metric;
  std::string output_dir;
};

// Trains every seed (up to `workers` at a time) and writes into output_dir:
//   seed_<s>_iterations.csv  iteration,loss,wall_ms,eval_count
//   seed_<s>_checkpoint.json
//   aggregate.csv            seed,metric,mean,std
//   manifest.ini             resolved config, seeds and code revision
ExperimentResult run_experiment(const config::RunConfig& cfg, std::size_t workers = 1);
ExperimentResult run_experiment_file(const std::string& config_path, std::size_t workers = 1);

// Rerunnable manifest text.
std::string manifest_text(const config::RunConfig& cfg);
std::string code_revision();

std::string iterations_csv(const train::RunResult& run);

struct SliceSpec {
  std::vector<double> fixed{0.25, 0.5, 0.75};
  std::size_t points = 200;
  double time = 0.5;  // heat with d >= 2: time held fixed along the slice
};

// Slices along x_1 in [0, 1]. The fixed coordinate is y for Poisson, t for
// one-dimensional heat and x_2 otherwise. Columns
// x1,fixed_value,u_theta,u_exact,squared_error.
std::string emit_slices(const train::LoadedCheckpoint& checkpoint, const SliceSpec& spec);

}  // namespace qpinn::experiment
