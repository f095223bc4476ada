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

// Dense state-vector simulation. Basis index bit j is qubit j (qubit 0 is the
// least significant bit).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpinn/matrix.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::qsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

class QuantumState {
 public:
  // |0...0>
  explicit QuantumState(std::size_t n_qubits);

  // Throws unless amplitudes.size() is a power of two and the norm is 1.
  static QuantumState from_amplitudes(std::vector<Complex> amplitudes);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  double norm_squared() const;

 private:
  QuantumState(std::size_t n_qubits, std::vector<Complex> amplitudes)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

  std::size_t n_qubits_;
  std::vector<Complex> amplitudes_;
};

enum class GateKind { RX, RY, RZ, CNOT, DenseUnitary };

// One circuit element. Rotations are exp(-i angle G / 2) with G in {X, Y, Z}.
class GateOp {
 public:
  static GateOp rx(std::size_t target, double angle);
  static GateOp ry(std::size_t target, double angle);
  static GateOp rz(std::size_t target, double angle);
  static GateOp rotation(GateKind kind, std::size_t target, double angle);
  static GateOp cnot(std::size_t control, std::size_t target);
  // Matrix index bit b addresses qubits[b]. Throws if the matrix is not
  // unitary within 1e-10 or its size does not match the qubit list.
  static GateOp dense(std::vector<std::size_t> qubits,
                      std::shared_ptr<const ComplexMatrix> matrix);
  // Same as dense() without the O(8^k) unitarity check, for matrices that
  // were validated once up front.
  static GateOp dense_prevalidated(std::vector<std::size_t> qubits,
                                   std::shared_ptr<const ComplexMatrix> matrix);

  GateKind kind() const { return kind_; }
  bool is_rotation() const;
  std::size_t target() const { return target_; }
  std::optional<std::size_t> control() const { return control_; }
  double angle() const { return angle_; }
  const std::vector<std::size_t>& qubits() const { return qubits_; }
  const ComplexMatrix& matrix() const { return *matrix_; }

  // 2x2 generator G of a rotation (G^2 = I).
  ComplexMatrix generator() const;
  // 2x2 unitary of a rotation, cos(a/2) I - i sin(a/2) G.
  ComplexMatrix rotation_matrix() const;

 private:
  GateOp() = default;

  GateKind kind_ = GateKind::RZ;
  std::size_t target_ = 0;
  std::optional<std::size_t> control_;
  double angle_ = 0.0;
  std::vector<std::size_t> qubits_;
  std::shared_ptr<const ComplexMatrix> matrix_;
};

ComplexMatrix pauli_matrix(char symbol);

// Validates indices against the state and applies the gate in place.
void apply_gate_inplace(QuantumState& state, const GateOp& gate);
QuantumState apply_gate(const QuantumState& state, const GateOp& gate);

// One weighted Pauli string; paulis[q] is the symbol acting on qubit q.
struct PauliTerm {
  double coefficient = 0.0;
  std::string paulis;
};

// Bit masks of a Pauli string: P|b> = i^y_count (-1)^popcount(b & z_mask) |b ^ x_mask>.
struct PauliMasks {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  int y_count = 0;
  double coefficient = 0.0;
};

class PauliHamiltonian {
 public:
  PauliHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms);

  // sum_j [Z_j Z_{j+1} + Z_j + X_j], indices mod n.
  static PauliHamiltonian ising_ring(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const std::vector<PauliMasks>& masks() const { return masks_; }
  double coefficient_l1() const;

  // out = H * in
  void apply(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  std::size_t n_qubits_;
  std::vector<PauliTerm> terms_;
  std::vector<PauliMasks> masks_;
};

// <psi|H|psi>. Throws on a size mismatch or on an imaginary residue above
// 1e-10 (scaled by the coefficient mass).
double expectation(const QuantumState& state, const PauliHamiltonian& ham);

// Shot-based estimate: every non-identity term is measured in its own rotated
// basis with shots split evenly across those terms (each gets at least one).
double expectation_shots(const QuantumState& state, const PauliHamiltonian& ham,
                         std::uint64_t shots, RngStream& rng);

}  // namespace qpinn::qsim
