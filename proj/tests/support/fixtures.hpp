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


// Shared fixtures for unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qpinn/matrix.hpp"
#include "qpinn/qnet.hpp"
#include "qpinn/qsim.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::testing {

inline constexpr double kPi = 3.14159265358979323846;

// Random network with parameters drawn from U(-1, 1).
inline qnet::NetworkSpec random_network(std::size_t n, std::size_t M, std::size_t d,
                                        RngStream& rng,
                                        qnet::EncodingKind enc = qnet::EncodingKind::ChebyshevAcos,
                                        bool haar = true) {
  qnet::NetworkSpec net = qnet::build_network(n, M, d, enc, rng, {haar});
  std::vector<double> theta(net.parameter_count());
  for (auto& t : theta) t = rng.uniform(-1.0, 1.0);
  net.set_flat_parameters(theta);
  return net;
}

// One qubit, no encoding, identity Lambda, cost Z: the RY site carries angle x,
// so u = cos(x).
inline qnet::NetworkSpec cos_circuit(double x) {
  RngStream rng(1);
  qnet::NetworkSpec net = qnet::build_network(1, 1, 1, qnet::EncodingKind::ChebyshevAcos, rng,
                                              {false});
  net.encoding.chi = {0.0};
  net.cost = qsim::PauliHamiltonian(1, {{1.0, "Z"}});
  net.params[0] = qnet::UatParams{x / 2.0, {0.0}, 0.0};
  return net;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

inline bool within_se(double got, double want, double se, double k = 3.0) {
  return std::abs(got - want) <= k * se + 1e-12;
}

}  // namespace qpinn::testing
