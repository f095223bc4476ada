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

#include "qpinn/complexity.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qpinn::complexity {

PdeKind parse_pde_kind(const std::string& name) {
  if (name == "p_laplace_general") return PdeKind::PLaplaceGeneral;
  if (name == "p_laplace_p2") return PdeKind::PLaplaceP2;
  if (name == "heat") return PdeKind::Heat;
  if (name == "hjb") return PdeKind::Hjb;
  throw std::invalid_argument("unknown complexity pde kind '" + name + "'");
}

std::string to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::PLaplaceGeneral: return "p_laplace_general";
    case PdeKind::PLaplaceP2: return "p_laplace_p2";
    case PdeKind::Heat: return "heat";
    case PdeKind::Hjb: return "hjb";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "standard") return LossKind::Standard;
  if (name == "variational") return LossKind::Variational;
  if (name == "smoothed") return LossKind::Smoothed;
  if (name == "variational_smoothed") return LossKind::VariationalSmoothed;
  throw std::invalid_argument("unknown complexity loss kind '" + name + "'");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Standard: return "standard";
    case LossKind::Variational: return "variational";
    case LossKind::Smoothed: return "smoothed";
    case LossKind::VariationalSmoothed: return "variational_smoothed";
  }
  return "?";
}

void validate(const ComplexityProfile& p) {
  if (p.d == 0) throw std::invalid_argument("complexity: d must be >= 1");
  if (p.alpha.size() != p.d) throw std::invalid_argument("complexity: alpha must have d entries");
  if (p.alpha_mixed.size() != p.d) {
    throw std::invalid_argument("complexity: alpha_mixed must be d x d");
  }
  for (const auto& row : p.alpha_mixed) {
    if (row.size() != p.d) throw std::invalid_argument("complexity: alpha_mixed must be d x d");
  }
  for (std::size_t i = 0; i < p.d; ++i) {
    for (std::size_t j = 0; j < p.d; ++j) {
      if (p.alpha_mixed[i][j] > std::min(p.alpha[i], p.alpha[j])) {
        throw std::invalid_argument("complexity: alpha_{i,j} exceeds min(alpha_i, alpha_j)");
      }
    }
  }
}

std::uint64_t xi(const ComplexityProfile& p, PdeKind pde, LossKind loss) {
  validate(p);
  const bool family = pde == PdeKind::PLaplaceGeneral || pde == PdeKind::PLaplaceP2;
  switch (loss) {
    case LossKind::Variational: {
      if (!family) throw std::invalid_argument("complexity: variational loss needs p-Laplace");
      std::uint64_t s = 0;
      for (auto a : p.alpha) s += a;
      return p.n_r * (1 + 2 * s) + p.n_e;
    }
    case LossKind::VariationalSmoothed:
      if (!family) throw std::invalid_argument("complexity: variational loss needs p-Laplace");
      return p.K * (3 * p.n_r + p.n_e);
    case LossKind::Smoothed:
      return p.K * ((pde == PdeKind::PLaplaceP2 ? 3 : 5) * p.n_r + p.n_e);
    case LossKind::Standard:
      break;
  }
  std::uint64_t per = 0;
  switch (pde) {
    case PdeKind::PLaplaceGeneral:
      for (std::size_t i = 0; i < p.d; ++i) {
        for (std::size_t j = p.commuting ? i : 0; j < p.d; ++j) {
          per += 4 * p.alpha[i] * p.alpha[j] - p.alpha_mixed[i][j];
        }
      }
      break;
    case PdeKind::PLaplaceP2:
      for (auto a : p.alpha) per += 4 * a * a - a;
      break;
    case PdeKind::Heat:
      per = 2 * p.alpha_t;
      for (auto a : p.alpha) per += 4 * a * a - a;
      break;
    case PdeKind::Hjb:
      per = 2 * p.alpha_t;
      for (auto a : p.alpha) per += a == 0 ? 0 : 3 * a * (2 * a - 1);
      break;
  }
  return p.n_r * per + p.n_e;
}

std::uint64_t xi_with_gradient(const ComplexityProfile& p, PdeKind pde, LossKind loss) {
  return (1 + 2 * p.N_theta) * xi(p, pde, loss);
}

PdeKind pde_kind_of(const pde::PdeProblem& problem) {
  switch (problem.kind) {
    case pde::ProblemKind::Poisson: return PdeKind::PLaplaceP2;
    case pde::ProblemKind::PLaplace:
      return problem.p == 2.0 ? PdeKind::PLaplaceP2 : PdeKind::PLaplaceGeneral;
    case pde::ProblemKind::Heat: return PdeKind::Heat;
    case pde::ProblemKind::Hjb: return PdeKind::Hjb;
  }
  return PdeKind::PLaplaceGeneral;
}

ComplexityProfile profile_from_network(const qnet::NetworkSpec& net,
                                       const pde::PdeProblem& problem) {
  if (net.d_in != problem.input_dim()) {
    throw std::invalid_argument("profile_from_network: network input does not match the problem");
  }
  const std::size_t off = problem.spatial_offset();
  ComplexityProfile p;
  p.d = problem.d;
  p.alpha.assign(p.d, 0);
  p.alpha_mixed.assign(p.d, std::vector<std::uint64_t>(p.d, 0));
  p.N_theta = net.parameter_count();
  p.n = net.n_qubits;
  p.M = net.layers;
  for (const auto& site : qnet::angle_registry(net)) {
    std::vector<bool> dep(net.d_in, false);
    for (std::size_t c : site.dependencies) dep[c] = true;
    if (problem.has_time() && dep[0]) ++p.alpha_t;
    for (std::size_t i = 0; i < p.d; ++i) {
      if (!dep[off + i]) continue;
      ++p.alpha[i];
      for (std::size_t j = 0; j < p.d; ++j) {
        if (dep[off + j]) ++p.alpha_mixed[i][j];
      }
    }
  }
  return p;
}

Convention parse_convention(const std::string& name) {
  if (name == "printed") return Convention::Printed;
  if (name == "generic") return Convention::Generic;
  throw std::invalid_argument("unknown convention '" + name + "' (expected printed or generic)");
}

std::string to_string(Convention c) { return c == Convention::Printed ? "printed" : "generic"; }

ComplexityProfile idealized_profile(std::uint64_t M, std::uint64_t n_per_d, std::uint64_t d,
                                    std::uint64_t n_r, std::uint64_t n_e, std::uint64_t K,
                                    Convention convention) {
  if (d == 0 || n_per_d == 0) throw std::invalid_argument("idealized_profile: d, n_per_d >= 1");
  ComplexityProfile p;
  p.d = d;
  p.n = n_per_d * d;
  p.M = M;
  p.n_r = n_r;
  p.n_e = n_e;
  p.K = K;
  const std::uint64_t a = n_per_d + M * p.n;
  p.alpha.assign(d, a);
  p.alpha_mixed.assign(d, std::vector<std::uint64_t>(d, M * p.n));
  if (convention == Convention::Generic) {
    for (std::size_t i = 0; i < d; ++i) p.alpha_mixed[i][i] = a;
  }
  p.N_theta = p.n * M * (d + 2);
  return p;
}

std::uint64_t xi_explicit(std::uint64_t M, std::uint64_t n_per_d, std::uint64_t d,
                          std::uint64_t n_r, std::uint64_t n_e, std::uint64_t K, LossKind loss,
                          Convention convention) {
  const ComplexityProfile p = idealized_profile(M, n_per_d, d, n_r, n_e, K, convention);
  if (convention == Convention::Printed && loss == LossKind::Variational) {
    return n_r * (1 + d * (d + 1) * p.alpha[0]) + n_e;
  }
  return xi(p, PdeKind::PLaplaceGeneral, loss);
}

std::vector<CrossoverRow> crossover_report(std::uint64_t M, std::uint64_t n_per_d,
                                           std::uint64_t K, std::uint64_t n_r, std::uint64_t n_e,
                                           std::uint64_t d_max, Convention convention) {
  std::vector<CrossoverRow> rows;
  for (std::uint64_t d = 1; d <= d_max; ++d) {
    CrossoverRow r;
    r.d = d;
    r.n = n_per_d * d;
    r.xi_standard = xi_explicit(M, n_per_d, d, n_r, n_e, K, LossKind::Standard, convention);
    r.xi_variational = xi_explicit(M, n_per_d, d, n_r, n_e, K, LossKind::Variational, convention);
    r.xi_smoothed = xi_explicit(M, n_per_d, d, n_r, n_e, K, LossKind::Smoothed, convention);
    r.xi_variational_smoothed =
        xi_explicit(M, n_per_d, d, n_r, n_e, K, LossKind::VariationalSmoothed, convention);
    r.standard_gt_variational = r.xi_standard > r.xi_variational;
    r.var_smoothed_lt_smoothed = r.xi_variational_smoothed < r.xi_smoothed;
    r.var_smoothed_lt_variational = r.xi_variational_smoothed < r.xi_variational;
    r.smoothed_lt_variational = r.xi_smoothed < r.xi_variational;
    rows.push_back(r);
  }
  return rows;
}

std::string crossover_csv(const std::vector<CrossoverRow>& rows) {
  std::ostringstream os;
  os << "d,n,xi_standard,xi_variational,xi_smoothed,xi_variational_smoothed,"
        "standard_gt_variational,var_smoothed_lt_smoothed,var_smoothed_lt_variational,"
        "smoothed_lt_variational\n";
  for (const auto& r : rows) {
    os << r.d << ',' << r.n << ',' << r.xi_standard << ',' << r.xi_variational << ','
       << r.xi_smoothed << ',' << r.xi_variational_smoothed << ',' << r.standard_gt_variational
       << ',' << r.var_smoothed_lt_smoothed << ',' << r.var_smoothed_lt_variational << ','
       << r.smoothed_lt_variational << '\n';
  }
  return os.str();
}

}  // namespace qpinn::complexity
