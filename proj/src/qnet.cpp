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

#include "qpinn/qnet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace qpinn::qnet {
namespace {

constexpr double kPi = 3.14159265358979323846;

double acos_arg(double v) { return 1.5 * (v - 0.5); }

void check_input(const NetworkSpec& net, std::span<const double> x) {
  if (x.size() != net.d_in) {
    throw std::invalid_argument("qnet: input has " + std::to_string(x.size()) +
                                " coordinates, network expects " + std::to_string(net.d_in));
  }
}

}  // namespace

EncodingKind parse_encoding_kind(const std::string& name) {
  if (name == "chebyshev_acos" || name == "acos") return EncodingKind::ChebyshevAcos;
  if (name == "tanh") return EncodingKind::Tanh;
  throw std::invalid_argument("unknown encoding kind '" + name + "'");
}

std::string to_string(EncodingKind kind) {
  return kind == EncodingKind::Tanh ? "tanh" : "chebyshev_acos";
}

double activation(EncodingKind kind, double v) {
  if (kind == EncodingKind::Tanh) return std::tanh(v);
  return std::acos(std::clamp(acos_arg(v), -1.0, 1.0));
}

double activation_d1(EncodingKind kind, double v) {
  if (kind == EncodingKind::Tanh) {
    const double t = std::tanh(v);
    return 1.0 - t * t;
  }
  const double y = acos_arg(v);
  if (std::abs(y) >= 1.0) return 0.0;
  return -1.5 / std::sqrt(1.0 - y * y);
}

double activation_d2(EncodingKind kind, double v) {
  if (kind == EncodingKind::Tanh) {
    const double t = std::tanh(v);
    return -2.0 * t * (1.0 - t * t);
  }
  const double y = acos_arg(v);
  if (std::abs(y) >= 1.0) return 0.0;
  const double w = 1.0 - y * y;
  return -2.25 * y / (w * std::sqrt(w));
}

std::vector<double> NetworkSpec::flat_parameters() const {
  std::vector<double> theta;
  theta.reserve(parameter_count());
  for (const auto& p : params) {
    theta.push_back(p.phi);
    theta.insert(theta.end(), p.gamma.begin(), p.gamma.end());
    theta.push_back(p.alpha);
  }
  return theta;
}

void NetworkSpec::set_flat_parameters(std::span<const double> theta) {
  if (theta.size() != parameter_count()) {
    throw std::invalid_argument("set_flat_parameters: expected " +
                                std::to_string(parameter_count()) + " values");
  }
  std::size_t k = 0;
  for (auto& p : params) {
    p.phi = theta[k++];
    for (auto& g : p.gamma) g = theta[k++];
    p.alpha = theta[k++];
  }
}

std::size_t encoding_site_id(const NetworkSpec& net, std::size_t qubit) {
  (void)net;
  return qubit;
}

std::size_t uat_rz_site_id(const NetworkSpec& net, std::size_t layer, std::size_t qubit) {
  return net.n_qubits + 2 * (layer * net.n_qubits + qubit);
}

std::size_t uat_ry_site_id(const NetworkSpec& net, std::size_t layer, std::size_t qubit) {
  return uat_rz_site_id(net, layer, qubit) + 1;
}

std::size_t site_count(const NetworkSpec& net) {
  return net.n_qubits + 2 * net.layers * net.n_qubits;
}

std::vector<AngleSite> angle_registry(const NetworkSpec& net) {
  std::vector<AngleSite> sites;
  sites.reserve(site_count(net));
  for (std::size_t q = 0; q < net.n_qubits; ++q) {
    AngleSite s;
    s.gate_id = encoding_site_id(net, q);
    s.kind = SiteKind::Encoding;
    s.qubit = q;
    s.dependencies = {net.encoding.feature_index(q)};
    sites.push_back(std::move(s));
  }
  for (std::size_t l = 0; l < net.layers; ++l) {
    for (std::size_t q = 0; q < net.n_qubits; ++q) {
      AngleSite rz;
      rz.gate_id = uat_rz_site_id(net, l, q);
      rz.kind = SiteKind::UatRz;
      rz.qubit = q;
      rz.layer = l;
      const auto& p = net.uat(l, q);
      for (std::size_t i = 0; i < net.d_in; ++i) {
        if (p.gamma[i] != 0.0) rz.dependencies.push_back(i);
      }
      sites.push_back(std::move(rz));
      AngleSite ry;
      ry.gate_id = uat_ry_site_id(net, l, q);
      ry.kind = SiteKind::UatRy;
      ry.qubit = q;
      ry.layer = l;
      sites.push_back(std::move(ry));
    }
  }
  return sites;
}

double angle_value(const NetworkSpec& net, const AngleSite& site, std::span<const double> x) {
  check_input(net, x);
  switch (site.kind) {
    case SiteKind::Encoding: {
      const std::size_t g = net.encoding.feature_index(site.qubit);
      return net.encoding.chi[site.qubit] * kPi * activation(net.encoding.kind, x[g]);
    }
    case SiteKind::UatRz: {
      const auto& p = net.uat(site.layer, site.qubit);
      double a = 2.0 * p.alpha;
      for (std::size_t i = 0; i < net.d_in; ++i) a += 2.0 * p.gamma[i] * x[i];
      return a;
    }
    case SiteKind::UatRy:
      return 2.0 * net.uat(site.layer, site.qubit).phi;
  }
  return 0.0;
}

double angle_partial(const NetworkSpec& net, const AngleSite& site, std::span<const double> x,
                     std::size_t i) {
  check_input(net, x);
  switch (site.kind) {
    case SiteKind::Encoding: {
      const std::size_t g = net.encoding.feature_index(site.qubit);
      if (i != g) return 0.0;
      return net.encoding.chi[site.qubit] * kPi * activation_d1(net.encoding.kind, x[g]);
    }
    case SiteKind::UatRz:
      return 2.0 * net.uat(site.layer, site.qubit).gamma.at(i);
    case SiteKind::UatRy:
      return 0.0;
  }
  return 0.0;
}

double angle_second_partial(const NetworkSpec& net, const AngleSite& site,
                            std::span<const double> x, std::size_t i, std::size_t j) {
  check_input(net, x);
  if (site.kind != SiteKind::Encoding) return 0.0;
  const std::size_t g = net.encoding.feature_index(site.qubit);
  if (i != g || j != g) return 0.0;
  return net.encoding.chi[site.qubit] * kPi * activation_d2(net.encoding.kind, x[g]);
}

ComplexMatrix sample_haar(std::size_t n_qubits, RngStream& rng) {
  if (n_qubits == 0 || n_qubits > 12) {
    throw std::invalid_argument("sample_haar: qubit count must be in [1, 12]");
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd z(dim, dim);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      z(r, c) = std::complex<double>(re, im) * scale;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const std::complex<double> d = r(c, c);
    const double mag = std::abs(d);
    const std::complex<double> phase = mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
    q.col(c) *= phase;
  }
  ComplexMatrix out(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  for (Eigen::Index r2 = 0; r2 < dim; ++r2) {
    for (Eigen::Index c = 0; c < dim; ++c) out(r2, c) = q(r2, c);
  }
  return out;
}

NetworkSpec build_network(std::size_t n_qubits, std::size_t layers, std::size_t d_in,
                          EncodingKind encoding, RngStream& rng, BuildOptions options) {
  if (n_qubits == 0 || n_qubits > qsim::kMaxQubits) {
    throw std::invalid_argument("build_network: qubit count must be in [1, 20]");
  }
  if (d_in == 0) throw std::invalid_argument("build_network: input dimension must be >= 1");
  NetworkSpec net;
  net.n_qubits = n_qubits;
  net.layers = layers;
  net.d_in = d_in;
  net.encoding.kind = encoding;
  net.encoding.d_in = d_in;
  net.cost = qsim::PauliHamiltonian::ising_ring(n_qubits);

  RngStream chi_rng = rng.split(1);
  RngStream haar_rng = rng.split(2);
  RngStream param_rng = rng.split(3);
  rng.uniform();  // advance the caller's stream so successive builds differ

  net.encoding.chi.resize(n_qubits);
  for (auto& c : net.encoding.chi) c = chi_rng.uniform();
  if (options.haar) {
    net.haar = std::make_shared<const ComplexMatrix>(sample_haar(n_qubits, haar_rng));
  }
  const double bound = kPi / 8.0;
  net.params.resize(layers * n_qubits);
  for (auto& p : net.params) {
    p.phi = param_rng.uniform(-bound, bound);
    p.gamma.resize(d_in);
    for (auto& g : p.gamma) g = param_rng.uniform(-bound, bound);
    p.alpha = param_rng.uniform(-bound, bound);
  }
  return net;
}

NetworkSpec build_network(std::size_t n_qubits, std::size_t layers, std::size_t d_in,
                          const std::string& encoding, RngStream& rng, BuildOptions options) {
  return build_network(n_qubits, layers, d_in, parse_encoding_kind(encoding), rng, options);
}

std::vector<LayoutGate> circuit_layout(const NetworkSpec& net) {
  std::vector<LayoutGate> gates;
  const std::size_t n = net.n_qubits;
  for (std::size_t q = 0; q < n; ++q) {
    gates.push_back({qsim::GateKind::RZ, q, 0, static_cast<long>(encoding_site_id(net, q))});
  }
  if (net.haar) gates.push_back({qsim::GateKind::DenseUnitary, 0, 0, -1});
  for (std::size_t l = 0; l < net.layers; ++l) {
    for (std::size_t q = 0; q < n; ++q) {
      gates.push_back({qsim::GateKind::RZ, q, 0, static_cast<long>(uat_rz_site_id(net, l, q))});
      gates.push_back({qsim::GateKind::RY, q, 0, static_cast<long>(uat_ry_site_id(net, l, q))});
    }
    if (n > 1) {
      for (std::size_t i = 0; i < n; ++i) {
        gates.push_back({qsim::GateKind::CNOT, (i + 1) % n, i, -1});
      }
    }
  }
  return gates;
}

qsim::QuantumState prepare_state(const NetworkSpec& net, std::span<const double> x,
                                 const ShiftMap& shifts) {
  check_input(net, x);
  const std::size_t total = site_count(net);
  for (const auto& [id, value] : shifts) {
    (void)value;
    if (id >= total) {
      throw std::out_of_range("evaluate_shifted: unknown gate id " + std::to_string(id));
    }
  }
  std::vector<double> angles(total);
  for (const auto& site : angle_registry(net)) angles[site.gate_id] = angle_value(net, site, x);
  for (const auto& [id, value] : shifts) angles[id] += value;

  qsim::QuantumState state(net.n_qubits);
  std::vector<std::size_t> all_qubits(net.n_qubits);
  for (std::size_t q = 0; q < net.n_qubits; ++q) all_qubits[q] = q;
  for (const auto& g : circuit_layout(net)) {
    switch (g.kind) {
      case qsim::GateKind::DenseUnitary:
        qsim::apply_gate_inplace(state, qsim::GateOp::dense_prevalidated(all_qubits, net.haar));
        break;
      case qsim::GateKind::CNOT:
        qsim::apply_gate_inplace(state, qsim::GateOp::cnot(g.control, g.qubit));
        break;
      default:
        qsim::apply_gate_inplace(
            state, qsim::GateOp::rotation(g.kind, g.qubit, angles[static_cast<std::size_t>(g.site_id)]));
        break;
    }
  }
  return state;
}

double evaluate(const NetworkSpec& net, std::span<const double> x) {
  return qsim::expectation(prepare_state(net, x), net.cost);
}

double evaluate_shifted(const NetworkSpec& net, std::span<const double> x,
                        const ShiftMap& shifts) {
  return qsim::expectation(prepare_state(net, x, shifts), net.cost);
}

std::string serialize_network(const NetworkSpec& net) {
  nlohmann::json j;
  j["n"] = net.n_qubits;
  j["M"] = net.layers;
  j["d_in"] = net.d_in;
  j["encoding"] = to_string(net.encoding.kind);
  j["chi"] = net.encoding.chi;
  if (net.haar) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < net.haar->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < net.haar->cols(); ++c) {
        const auto v = (*net.haar)(r, c);
        row.push_back({v.real(), v.imag()});
      }
      rows.push_back(std::move(row));
    }
    j["lambda"] = std::move(rows);
  } else {
    j["lambda"] = "identity";
  }
  j["params"] = net.flat_parameters();
  nlohmann::json cost = nlohmann::json::array();
  for (const auto& t : net.cost.terms()) cost.push_back({t.coefficient, t.paulis});
  j["cost"] = std::move(cost);
  return j.dump(1);
}

NetworkSpec deserialize_network(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  NetworkSpec net;
  net.n_qubits = j.at("n").get<std::size_t>();
  net.layers = j.at("M").get<std::size_t>();
  net.d_in = j.at("d_in").get<std::size_t>();
  net.encoding.kind = parse_encoding_kind(j.at("encoding").get<std::string>());
  net.encoding.d_in = net.d_in;
  net.encoding.chi = j.at("chi").get<std::vector<double>>();
  if (net.encoding.chi.size() != net.n_qubits) {
    throw std::invalid_argument("deserialize_network: chi length does not match n");
  }
  const auto& lam = j.at("lambda");
  if (!lam.is_string()) {
    const std::size_t dim = std::size_t{1} << net.n_qubits;
    ComplexMatrix m(dim, dim);
    if (lam.size() != dim) throw std::invalid_argument("deserialize_network: bad lambda shape");
    for (std::size_t r = 0; r < dim; ++r) {
      if (lam[r].size() != dim) throw std::invalid_argument("deserialize_network: bad lambda row");
      for (std::size_t c = 0; c < dim; ++c) {
        m(r, c) = {lam[r][c][0].get<double>(), lam[r][c][1].get<double>()};
      }
    }
    if (unitarity_defect(m) > 1e-10) {
      throw std::invalid_argument("deserialize_network: lambda is not unitary");
    }
    net.haar = std::make_shared<const ComplexMatrix>(std::move(m));
  }
  if (j.contains("cost")) {
    std::vector<qsim::PauliTerm> terms;
    for (const auto& t : j["cost"]) terms.push_back({t[0].get<double>(), t[1].get<std::string>()});
    net.cost = qsim::PauliHamiltonian(net.n_qubits, std::move(terms));
  } else {
    net.cost = qsim::PauliHamiltonian::ising_ring(net.n_qubits);
  }
  net.params.assign(net.layers * net.n_qubits, UatParams{0.0, std::vector<double>(net.d_in), 0.0});
  net.set_flat_parameters(j.at("params").get<std::vector<double>>());
  return net;
}

}  // namespace qpinn::qnet
