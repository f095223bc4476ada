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

#include "qpinn/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace qpinn::classical {

double ClassicalRandomNet::preactivation(std::size_t i, std::span<const double> x) const {
  double s = B[i];
  for (std::size_t k = 0; k < d; ++k) s += E(i, k) * x[k];
  return s;
}

ClassicalRandomNet sample_network(std::size_t nodes, std::size_t d, RngStream& rng) {
  if (nodes == 0 || d == 0) throw std::invalid_argument("classical net: nodes and d must be >= 1");
  ClassicalRandomNet net;
  net.nodes = nodes;
  net.d = d;
  net.E = Matrix(nodes, d);
  net.B.resize(nodes);
  net.W.assign(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    // Multivariate t5: a Gaussian vector over one shared chi-square scale.
    const double scale = std::sqrt(rng.chi_squared(5.0) / 5.0);
    for (std::size_t k = 0; k < d; ++k) net.E(i, k) = rng.normal() / scale;
    net.B[i] = rng.student_t(2.0);
  }
  return net;
}

double classical_forward(const ClassicalRandomNet& net, std::span<const double> x) {
  if (x.size() != net.d) throw std::invalid_argument("classical_forward: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < net.nodes; ++i) s += net.W[i] * std::max(0.0, net.preactivation(i, x));
  return s;
}

pde::DerivativeBundle classical_derivatives(const ClassicalRandomNet& net,
                                            std::span<const double> x) {
  if (x.size() != net.d) throw std::invalid_argument("classical_derivatives: dimension mismatch");
  pde::DerivativeBundle b;
  b.gradient.assign(net.d, 0.0);
  for (std::size_t i = 0; i < net.nodes; ++i) {
    const double z = net.preactivation(i, x);
    if (z > 0.0) {
      b.value += net.W[i] * z;
      for (std::size_t k = 0; k < net.d; ++k) b.gradient[k] += net.W[i] * net.E(i, k);
    }
  }
  b.hessian = Matrix(net.d, net.d, 0.0);
  return b;
}

std::string serialize_network(const ClassicalRandomNet& net) {
  nlohmann::json j;
  j["nodes"] = net.nodes;
  j["d"] = net.d;
  j["E"] = std::vector<double>(net.E.data().begin(), net.E.data().end());
  j["B"] = net.B;
  j["W"] = net.W;
  return j.dump();
}

ClassicalRandomNet deserialize_network(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ClassicalRandomNet net;
  net.nodes = j.at("nodes").get<std::size_t>();
  net.d = j.at("d").get<std::size_t>();
  net.E = Matrix(net.nodes, net.d, j.at("E").get<std::vector<double>>());
  net.B = j.at("B").get<std::vector<double>>();
  net.W = j.at("W").get<std::vector<double>>();
  if (net.B.size() != net.nodes || net.W.size() != net.nodes) {
    throw std::invalid_argument("classical net: inconsistent sizes");
  }
  return net;
}

}  // namespace qpinn::classical
