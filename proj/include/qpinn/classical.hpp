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

// Random classical network H(x) = sum_i W_i relu(E_i x + B_i) with frozen
// E ~ t5(0, I_d) and B ~ t(2); only W is trained.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qpinn/matrix.hpp"
#include "qpinn/pde.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::classical {

struct ClassicalRandomNet {
  std::size_t nodes = 0;
  std::size_t d = 0;
  Matrix E;  // nodes x d
  std::vector<double> B;
  std::vector<double> W;

  // Pre-activation E_i x + B_i of node i.
  double preactivation(std::size_t i, std::span<const double> x) const;
};

// W starts at zero.
ClassicalRandomNet sample_network(std::size_t nodes, std::size_t d, RngStream& rng);

double classical_forward(const ClassicalRandomNet& net, std::span<const double> x);
// Hessian is zero almost everywhere; the subgradient at a kink is 0.
pde::DerivativeBundle classical_derivatives(const ClassicalRandomNet& net,
                                            std::span<const double> x);

std::string serialize_network(const ClassicalRandomNet& net);
ClassicalRandomNet deserialize_network(const std::string& text);

}  // namespace qpinn::classical
