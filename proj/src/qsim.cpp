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

#include "qpinn/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qpinn::qsim {
namespace {

constexpr Complex kI{0.0, 1.0};

void check_qubit(std::size_t q, std::size_t n, const char* what) {
  if (q >= n) {
    throw std::out_of_range(std::string(what) + ": qubit index " + std::to_string(q) +
                            " out of range for " + std::to_string(n) + " qubits");
  }
}

// Applies a 2x2 matrix to qubit q.
void apply_single(std::span<Complex> amp, std::size_t q, const Complex m[4]) {
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t dim = amp.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 + stride;
      const Complex a0 = amp[i0];
      const Complex a1 = amp[i1];
      amp[i0] = m[0] * a0 + m[1] * a1;
      amp[i1] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_rz(std::span<Complex> amp, std::size_t q, double angle) {
  const Complex e0 = std::polar(1.0, -0.5 * angle);
  const Complex e1 = std::conj(e0);
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= (i & mask) ? e1 : e0;
}

void apply_cnot(std::span<Complex> amp, std::size_t control, std::size_t target) {
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amp[i], amp[i | tmask]);
  }
}

void apply_dense(std::span<Complex> amp, const std::vector<std::size_t>& qubits,
                 const ComplexMatrix& m) {
  const std::size_t k = qubits.size();
  const std::size_t sub = std::size_t{1} << k;
  std::size_t gate_mask = 0;
  std::vector<std::size_t> offsets(sub, 0);
  for (std::size_t b = 0; b < k; ++b) gate_mask |= std::size_t{1} << qubits[b];
  for (std::size_t s = 0; s < sub; ++s) {
    for (std::size_t b = 0; b < k; ++b) {
      if (s & (std::size_t{1} << b)) offsets[s] |= std::size_t{1} << qubits[b];
    }
  }
  std::vector<Complex> in(sub), out(sub);
  for (std::size_t base = 0; base < amp.size(); ++base) {
    if (base & gate_mask) continue;
    for (std::size_t s = 0; s < sub; ++s) in[s] = amp[base | offsets[s]];
    std::fill(out.begin(), out.end(), Complex{});
    for (std::size_t c = 0; c < sub; ++c) {
      const Complex v = in[c];
      if (v == Complex{}) continue;
      for (std::size_t r = 0; r < sub; ++r) out[r] += m(r, c) * v;
    }
    for (std::size_t s = 0; s < sub; ++s) amp[base | offsets[s]] = out[s];
  }
}

Complex pauli_phase(int y_count) {
  switch (y_count & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

QuantumState::QuantumState(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("QuantumState: qubit count must be in [1, 20]");
  }
  amplitudes_.assign(std::size_t{1} << n_qubits, Complex{});
  amplitudes_[0] = 1.0;
}

QuantumState QuantumState::from_amplitudes(std::vector<Complex> amplitudes) {
  const std::size_t dim = amplitudes.size();
  if (dim < 2 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("QuantumState: amplitude count must be 2^n with n >= 1");
  }
  const std::size_t n = static_cast<std::size_t>(std::countr_zero(dim));
  if (n > kMaxQubits) throw std::invalid_argument("QuantumState: too many qubits");
  double norm = 0.0;
  for (const auto& a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-10) {
    throw std::invalid_argument("QuantumState: amplitudes are not normalized");
  }
  return QuantumState(n, std::move(amplitudes));
}

double QuantumState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

GateOp GateOp::rotation(GateKind kind, std::size_t target, double angle) {
  if (kind != GateKind::RX && kind != GateKind::RY && kind != GateKind::RZ) {
    throw std::invalid_argument("GateOp::rotation: kind is not a rotation");
  }
  GateOp g;
  g.kind_ = kind;
  g.target_ = target;
  g.angle_ = angle;
  g.qubits_ = {target};
  return g;
}

GateOp GateOp::rx(std::size_t target, double angle) { return rotation(GateKind::RX, target, angle); }
GateOp GateOp::ry(std::size_t target, double angle) { return rotation(GateKind::RY, target, angle); }
GateOp GateOp::rz(std::size_t target, double angle) { return rotation(GateKind::RZ, target, angle); }

GateOp GateOp::cnot(std::size_t control, std::size_t target) {
  if (control == target) throw std::invalid_argument("GateOp::cnot: control equals target");
  GateOp g;
  g.kind_ = GateKind::CNOT;
  g.target_ = target;
  g.control_ = control;
  g.qubits_ = {control, target};
  return g;
}

GateOp GateOp::dense(std::vector<std::size_t> qubits,
                     std::shared_ptr<const ComplexMatrix> matrix) {
  if (!matrix) throw std::invalid_argument("GateOp::dense: null matrix");
  if (qubits.empty() || qubits.size() > kMaxQubits) {
    throw std::invalid_argument("GateOp::dense: bad qubit list");
  }
  for (std::size_t a = 0; a < qubits.size(); ++a) {
    for (std::size_t b = a + 1; b < qubits.size(); ++b) {
      if (qubits[a] == qubits[b]) throw std::invalid_argument("GateOp::dense: repeated qubit");
    }
  }
  const std::size_t sub = std::size_t{1} << qubits.size();
  if (matrix->rows() != sub || matrix->cols() != sub) {
    throw std::invalid_argument("GateOp::dense: matrix size does not match qubit count");
  }
  if (unitarity_defect(*matrix) > 1e-10) {
    throw std::invalid_argument("GateOp::dense: matrix is not unitary");
  }
  return dense_prevalidated(std::move(qubits), std::move(matrix));
}

GateOp GateOp::dense_prevalidated(std::vector<std::size_t> qubits,
                                  std::shared_ptr<const ComplexMatrix> matrix) {
  if (!matrix || matrix->rows() != (std::size_t{1} << qubits.size())) {
    throw std::invalid_argument("GateOp::dense: matrix size does not match qubit count");
  }
  GateOp g;
  g.kind_ = GateKind::DenseUnitary;
  g.target_ = qubits.front();
  g.qubits_ = std::move(qubits);
  g.matrix_ = std::move(matrix);
  return g;
}

bool GateOp::is_rotation() const {
  return kind_ == GateKind::RX || kind_ == GateKind::RY || kind_ == GateKind::RZ;
}

ComplexMatrix pauli_matrix(char symbol) {
  switch (symbol) {
    case 'I': return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 1.0});
    case 'X': return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0});
    case 'Y': return ComplexMatrix(2, 2, {0.0, -kI, kI, 0.0});
    case 'Z': return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0});
    default: throw std::invalid_argument(std::string("pauli_matrix: unknown symbol ") + symbol);
  }
}

ComplexMatrix GateOp::generator() const {
  switch (kind_) {
    case GateKind::RX: return pauli_matrix('X');
    case GateKind::RY: return pauli_matrix('Y');
    case GateKind::RZ: return pauli_matrix('Z');
    default: throw std::logic_error("GateOp::generator: not a rotation");
  }
}

ComplexMatrix GateOp::rotation_matrix() const {
  const ComplexMatrix g = generator();
  const double c = std::cos(0.5 * angle_);
  const double s = std::sin(0.5 * angle_);
  ComplexMatrix m(2, 2);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t k = 0; k < 2; ++k) m(r, k) = (r == k ? c : 0.0) - kI * s * g(r, k);
  }
  return m;
}

void apply_gate_inplace(QuantumState& state, const GateOp& gate) {
  const std::size_t n = state.n_qubits();
  for (std::size_t q : gate.qubits()) check_qubit(q, n, "apply_gate");
  auto amp = state.amplitudes();
  switch (gate.kind()) {
    case GateKind::RZ:
      apply_rz(amp, gate.target(), gate.angle());
      break;
    case GateKind::RX:
    case GateKind::RY: {
      const ComplexMatrix m = gate.rotation_matrix();
      const Complex mm[4] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
      apply_single(amp, gate.target(), mm);
      break;
    }
    case GateKind::CNOT:
      apply_cnot(amp, *gate.control(), gate.target());
      break;
    case GateKind::DenseUnitary:
      apply_dense(amp, gate.qubits(), gate.matrix());
      break;
  }
}

QuantumState apply_gate(const QuantumState& state, const GateOp& gate) {
  QuantumState out = state;
  apply_gate_inplace(out, gate);
  return out;
}

PauliHamiltonian::PauliHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliHamiltonian: qubit count must be in [1, 20]");
  }
  masks_.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (t.paulis.size() != n_qubits) {
      throw std::invalid_argument("PauliHamiltonian: term '" + t.paulis +
                                  "' does not match qubit count");
    }
    if (!std::isfinite(t.coefficient)) {
      throw std::invalid_argument("PauliHamiltonian: non-finite coefficient");
    }
    PauliMasks m;
    m.coefficient = t.coefficient;
    for (std::size_t q = 0; q < n_qubits; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (t.paulis[q]) {
        case 'I': break;
        case 'X': m.x_mask |= bit; break;
        case 'Y': m.x_mask |= bit; m.z_mask |= bit; ++m.y_count; break;
        case 'Z': m.z_mask |= bit; break;
        default:
          throw std::invalid_argument("PauliHamiltonian: bad symbol in '" + t.paulis + "'");
      }
    }
    masks_.push_back(m);
  }
}

PauliHamiltonian PauliHamiltonian::ising_ring(std::size_t n_qubits) {
  std::vector<PauliTerm> terms;
  const std::string idle(n_qubits, 'I');
  for (std::size_t j = 0; j < n_qubits; ++j) {
    std::string zz = idle;
    zz[j] = 'Z';
    zz[(j + 1) % n_qubits] = 'Z';
    if (n_qubits == 1) zz[0] = 'I';  // Z_0 Z_0 = I
    terms.push_back({1.0, zz});
    std::string z = idle;
    z[j] = 'Z';
    terms.push_back({1.0, z});
    std::string x = idle;
    x[j] = 'X';
    terms.push_back({1.0, x});
  }
  return PauliHamiltonian(n_qubits, std::move(terms));
}

double PauliHamiltonian::coefficient_l1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

void PauliHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != (std::size_t{1} << n_qubits_) || out.size() != in.size()) {
    throw std::invalid_argument("PauliHamiltonian::apply: size mismatch");
  }
  std::fill(out.begin(), out.end(), Complex{});
  for (const auto& m : masks_) {
    // P|b> = phase(b)|b ^ x>, so (P in)[b ^ x] += phase(b) in[b].
    const Complex base = m.coefficient * pauli_phase(m.y_count);
    for (std::size_t b = 0; b < in.size(); ++b) {
      const double sign = (std::popcount(b & m.z_mask) & 1) ? -1.0 : 1.0;
      out[b ^ m.x_mask] += sign * base * in[b];
    }
  }
}

double expectation(const QuantumState& state, const PauliHamiltonian& ham) {
  if (state.n_qubits() != ham.n_qubits()) {
    throw std::invalid_argument("expectation: qubit count mismatch");
  }
  const auto amp = state.amplitudes();
  Complex total{};
  for (const auto& m : ham.masks()) {
    // <psi|P|psi> = sum_b conj(psi[b ^ x]) phase(b) psi[b]
    Complex acc{};
    for (std::size_t b = 0; b < amp.size(); ++b) {
      const Complex v = std::conj(amp[b ^ m.x_mask]) * amp[b];
      acc += (std::popcount(b & m.z_mask) & 1) ? -v : v;
    }
    total += m.coefficient * pauli_phase(m.y_count) * acc;
  }
  const double scale = std::max(1.0, ham.coefficient_l1());
  if (std::abs(total.imag()) > 1e-10 * scale) {
    throw std::runtime_error("expectation: imaginary residue exceeds tolerance");
  }
  return total.real();
}

double expectation_shots(const QuantumState& state, const PauliHamiltonian& ham,
                         std::uint64_t shots, RngStream& rng) {
  if (shots == 0) throw std::invalid_argument("expectation_shots: shots must be >= 1");
  if (state.n_qubits() != ham.n_qubits()) {
    throw std::invalid_argument("expectation_shots: qubit count mismatch");
  }
  double total = 0.0;
  std::vector<std::size_t> measured;
  for (const auto& t : ham.terms()) {
    if (t.paulis.find_first_not_of('I') == std::string::npos) continue;
    measured.push_back(&t - ham.terms().data());
  }
  for (const auto& t : ham.terms()) {
    if (t.paulis.find_first_not_of('I') == std::string::npos) total += t.coefficient;
  }
  if (measured.empty()) return total;
  const std::uint64_t per_term = std::max<std::uint64_t>(1, shots / measured.size());

  std::vector<double> cdf(state.dimension());
  for (std::size_t idx : measured) {
    const PauliTerm& term = ham.terms()[idx];
    QuantumState rotated = state;
    std::uint64_t parity_mask = 0;
    for (std::size_t q = 0; q < term.paulis.size(); ++q) {
      const char p = term.paulis[q];
      if (p == 'I') continue;
      parity_mask |= std::uint64_t{1} << q;
      // Rotate the eigenbasis of X or Y onto Z.
      if (p == 'X') apply_gate_inplace(rotated, GateOp::ry(q, -M_PI / 2));
      if (p == 'Y') apply_gate_inplace(rotated, GateOp::rx(q, M_PI / 2));
    }
    const auto amp = rotated.amplitudes();
    double run = 0.0;
    for (std::size_t b = 0; b < amp.size(); ++b) {
      run += std::norm(amp[b]);
      cdf[b] = run;
    }
    std::int64_t signed_sum = 0;
    for (std::uint64_t s = 0; s < per_term; ++s) {
      const double r = rng.uniform() * run;
      const std::size_t outcome = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
      const std::size_t b = std::min(outcome, amp.size() - 1);
      signed_sum += (std::popcount(b & parity_mask) & 1) ? -1 : 1;
    }
    total += term.coefficient * static_cast<double>(signed_sum) / static_cast<double>(per_term);
  }
  return total;
}

}  // namespace qpinn::qsim
