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

// Carriers between trial functions (quantum, classical, smoothed, analytic)
// and the loss assembly.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qpinn/matrix.hpp"

namespace qpinn {

enum class HessianMode {
  None,
  Diagonal,   // (i, i) for the listed coordinates only
  Commuting,  // i <= j over the listed coordinates, mirrored
  Full,       // every ordered pair over the listed coordinates
};

// Which input derivatives one sample needs.
struct DerivativeRequest {
  bool value = true;
  std::vector<std::size_t> gradient;  // coordinates needing a first derivative
  HessianMode hessian = HessianMode::None;
  std::vector<std::size_t> hessian_coords;
};

// Derivatives with respect to the network input. Entries that were not
// requested are zero.
struct InputDerivatives {
  double value = 0.0;
  std::vector<double> gradient;
  Matrix hessian;

  static InputDerivatives zeros(std::size_t dim) {
    InputDerivatives d;
    d.gradient.assign(dim, 0.0);
    d.hessian = Matrix(dim, dim, 0.0);
    return d;
  }
};

// Per-sample loss. Given the derivatives it returns the loss contribution and
// fills `sensitivity` with d(loss)/d(each derivative entry); `sensitivity`
// arrives zero-initialized with the same shape.
using SampleLoss = std::function<double(const InputDerivatives& derivs,
                                        InputDerivatives& sensitivity)>;

struct SampleObjective {
  std::vector<double> point;
  DerivativeRequest request;
  SampleLoss loss;
};

// Explicit evaluation accumulator (counts network evaluations).
struct EvalCounter {
  std::uint64_t evaluations = 0;
  void add(std::uint64_t k = 1) { evaluations += k; }
};

}  // namespace qpinn
