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

// Run configuration: flat `key = value` text with optional problem-scoped
// sections. Keys in a `[name]` section apply only when `problem = name`.
//
//   problem = poisson
//   trial = quantum
//   seeds = 1,2,3,4,5
//   [poisson]
//   iterations = 1000

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpinn/train.hpp"

namespace qpinn::config {

// Raised for malformed text or unknown keys; key() names the offender.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  std::string problem_name = "poisson";
  train::TrainConfig train;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string output_dir = "qpinn_out";
};

// Every accepted key, in manifest order.
const std::vector<std::string>& known_keys();

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Fully resolved configuration in the same text format.
std::string to_config_text(const RunConfig& cfg);

// "1,2,5" or "1-5" (inclusive) or a mix.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace qpinn::config
