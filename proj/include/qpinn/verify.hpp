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

// Self-check suite behind `qpinn verify`.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace qpinn::verify {

enum class Level { Fast, Full };
Level parse_level(const std::string& name);

struct Options {
  Level level = Level::Fast;
  // Mutation hook: scales the first-derivative shift denominator by 1.05 so
  // the shift-rule oracle must fail.
  bool tamper_shift_denominator = false;
  std::size_t workers = 1;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs every check of the level and prints one PASS/FAIL line per check.
std::vector<CheckResult> run(const Options& options, std::ostream& log);

}  // namespace qpinn::verify
