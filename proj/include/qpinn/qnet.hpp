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

// Random quantum network u(x) = <0|(U(x) L A(x))^dagger C (U(x) L A(x))|0>
// with encoding A, fixed Haar unitary L and trainable UAT layers U.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qpinn/matrix.hpp"
#include "qpinn/qsim.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::qnet {

enum class EncodingKind { ChebyshevAcos, Tanh };

EncodingKind parse_encoding_kind(const std::string& name);
std::string to_string(EncodingKind kind);

// Activation of the encoding and its first two derivatives.
double activation(EncodingKind kind, double v);
double activation_d1(EncodingKind kind, double v);
double activation_d2(EncodingKind kind, double v);

struct EncodingSpec {
  EncodingKind kind = EncodingKind::ChebyshevAcos;
  std::vector<double> chi;  // one scale per qubit, in [0, 1]
  std::size_t d_in = 1;

  // Input coordinate read by qubit q (0-based).
  std::size_t feature_index(std::size_t q) const { return (q + 2) % d_in; }
};

struct UatParams {
  double phi = 0.0;
  std::vector<double> gamma;
  double alpha = 0.0;
};

struct NetworkSpec {
  std::size_t n_qubits = 1;
  std::size_t layers = 1;
  std::size_t d_in = 1;
  EncodingSpec encoding;
  std::shared_ptr<const ComplexMatrix> haar;  // null means identity
  qsim::PauliHamiltonian cost = qsim::PauliHamiltonian::ising_ring(1);
  std::vector<UatParams> params;  // index layer * n_qubits + qubit

  const UatParams& uat(std::size_t layer, std::size_t qubit) const {
    return params[layer * n_qubits + qubit];
  }
  UatParams& uat(std::size_t layer, std::size_t qubit) { return params[layer * n_qubits + qubit]; }

  // Flattened Theta: per (layer, qubit) block [phi, gamma_0..gamma_{d-1}, alpha].
  std::size_t parameter_count() const { return n_qubits * layers * (d_in + 2); }
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> theta);
};

enum class SiteKind { Encoding, UatRz, UatRy };

// One rotation angle of the circuit as a function of the input.
struct AngleSite {
  std::size_t gate_id = 0;
  SiteKind kind = SiteKind::Encoding;
  std::size_t qubit = 0;
  std::size_t layer = 0;  // UAT sites only
  std::vector<std::size_t> dependencies;
};

std::size_t encoding_site_id(const NetworkSpec& net, std::size_t qubit);
std::size_t uat_rz_site_id(const NetworkSpec& net, std::size_t layer, std::size_t qubit);
std::size_t uat_ry_site_id(const NetworkSpec& net, std::size_t layer, std::size_t qubit);
std::size_t site_count(const NetworkSpec& net);

// All sites ordered by gate id.
std::vector<AngleSite> angle_registry(const NetworkSpec& net);

double angle_value(const NetworkSpec& net, const AngleSite& site, std::span<const double> x);
double angle_partial(const NetworkSpec& net, const AngleSite& site, std::span<const double> x,
                     std::size_t i);
double angle_second_partial(const NetworkSpec& net, const AngleSite& site,
                            std::span<const double> x, std::size_t i, std::size_t j);

// Throws for n > 12.
ComplexMatrix sample_haar(std::size_t n_qubits, RngStream& rng);

struct BuildOptions {
  bool haar = true;  // false gives the identity ablation
};

// M = 0 is accepted and yields an encoding-only circuit.
NetworkSpec build_network(std::size_t n_qubits, std::size_t layers, std::size_t d_in,
                          EncodingKind encoding, RngStream& rng, BuildOptions options = {});
NetworkSpec build_network(std::size_t n_qubits, std::size_t layers, std::size_t d_in,
                          const std::string& encoding, RngStream& rng,
                          BuildOptions options = {});

// One element of the gate sequence; site_id < 0 for angle-free gates.
struct LayoutGate {
  qsim::GateKind kind;
  std::size_t qubit = 0;
  std::size_t control = 0;
  long site_id = -1;
};

// Gate sequence in application order; the Haar unitary appears as a single
// DenseUnitary entry.
std::vector<LayoutGate> circuit_layout(const NetworkSpec& net);

using ShiftMap = std::map<std::size_t, double>;

// Final state and cost expectation. Throws on a dimension mismatch.
qsim::QuantumState prepare_state(const NetworkSpec& net, std::span<const double> x,
                                 const ShiftMap& shifts = {});
double evaluate(const NetworkSpec& net, std::span<const double> x);
// Throws std::out_of_range for unknown gate ids.
double evaluate_shifted(const NetworkSpec& net, std::span<const double> x,
                        const ShiftMap& shifts);

std::string serialize_network(const NetworkSpec& net);
NetworkSpec deserialize_network(const std::string& text);

}  // namespace qpinn::qnet
