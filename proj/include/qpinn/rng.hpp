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

#include <cstdint>
#include <random>

namespace qpinn {

// Explicit, seedable random stream. Every stochastic routine takes one of
// these by reference; there is no global generator.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Deterministic child stream; children with distinct ids are independent
  // of each other and of the parent.
  RngStream split(std::uint64_t stream_id) const;

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();  // N(0, 1)
  double student_t(double dof);
  double chi_squared(double dof);
  std::uint64_t below(std::uint64_t bound);  // uniform integer in [0, bound)

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qpinn
