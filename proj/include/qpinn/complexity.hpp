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

// Closed-form evaluation counts xi (network evaluations per loss value) for
// every loss / PDE combination, and the growth comparison across dimensions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qpinn/pde.hpp"
#include "qpinn/qnet.hpp"

namespace qpinn::complexity {

enum class PdeKind { PLaplaceGeneral, PLaplaceP2, Heat, Hjb };
enum class LossKind { Standard, Variational, Smoothed, VariationalSmoothed };

PdeKind parse_pde_kind(const std::string& name);
std::string to_string(PdeKind kind);
LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

struct ComplexityProfile {
  std::size_t d = 1;
  std::vector<std::uint64_t> alpha;                     // alpha_i, i < d
  std::vector<std::vector<std::uint64_t>> alpha_mixed;  // d x d, alpha_{i,j}
  std::uint64_t alpha_t = 0;
  std::uint64_t n_r = 0;
  std::uint64_t n_e = 0;
  std::uint64_t K = 0;
  bool commuting = true;
  std::uint64_t N_theta = 0;
  std::uint64_t n = 0;
  std::uint64_t M = 0;
};

// Throws std::invalid_argument for inconsistent shapes.
void validate(const ComplexityProfile& profile);

// Standard losses:
//   p-Laplace (general) n_r sum_{i<=j} (4 a_i a_j - a_ij) + n_e (commuting),
//                       or the sum over all ordered pairs otherwise
//   p = 2               n_r sum_i (4 a_i^2 - a_i) + n_e
//   heat                n_r (2 a_t + sum_i (4 a_i^2 - a_i)) + n_e
//   HJB                 n_r (2 a_t + 3 sum_i a_i (2 a_i - 1)) + n_e
// Variational (p-Laplace family): n_r (1 + 2 sum_i a_i) + n_e.
// Smoothed: K (5 n_r + n_e), except p = 2 with K (3 n_r + n_e).
// Variational smoothed: K (3 n_r + n_e).
// Throws for combinations that do not exist (variational heat or HJB).
std::uint64_t xi(const ComplexityProfile& profile, PdeKind pde, LossKind loss);

// Evaluations for the loss plus its Theta-gradient: (1 + 2 N_theta) xi.
std::uint64_t xi_with_gradient(const ComplexityProfile& profile, PdeKind pde, LossKind loss);

// Counts from the angle registry. For time-dependent problems coordinate 0
// gives alpha_t and the spatial coordinates follow.
ComplexityProfile profile_from_network(const qnet::NetworkSpec& net,
                                       const pde::PdeProblem& problem);

// Matching PdeKind of a problem.
PdeKind pde_kind_of(const pde::PdeProblem& problem);

// Idealized network with n = n_per_d * d qubits: alpha_i = n/d + M n and
// alpha_{i,j} = M n for i != j.
//   Printed: also alpha_{i,i} = M n, and the variational count is written as
//            n_r (1 + d (d + 1) (n/d + M n)) + n_e.
//   Generic: alpha_{i,i} = alpha_i and every count comes from xi().
enum class Convention { Printed, Generic };
Convention parse_convention(const std::string& name);
std::string to_string(Convention c);

ComplexityProfile idealized_profile(std::uint64_t M, std::uint64_t n_per_d, std::uint64_t d,
                                    std::uint64_t n_r, std::uint64_t n_e, std::uint64_t K,
                                    Convention convention);

// p-Laplace (general) counts under a convention.
std::uint64_t xi_explicit(std::uint64_t M, std::uint64_t n_per_d, std::uint64_t d,
                          std::uint64_t n_r, std::uint64_t n_e, std::uint64_t K, LossKind loss,
                          Convention convention);

struct CrossoverRow {
  std::uint64_t d = 0;
  std::uint64_t n = 0;
  std::uint64_t xi_standard = 0;
  std::uint64_t xi_variational = 0;
  std::uint64_t xi_smoothed = 0;
  std::uint64_t xi_variational_smoothed = 0;
  bool standard_gt_variational = false;
  bool var_smoothed_lt_smoothed = false;
  bool var_smoothed_lt_variational = false;
  bool smoothed_lt_variational = false;
};

std::vector<CrossoverRow> crossover_report(std::uint64_t M, std::uint64_t n_per_d,
                                           std::uint64_t K, std::uint64_t n_r, std::uint64_t n_e,
                                           std::uint64_t d_max,
                                           Convention convention = Convention::Printed);
std::string crossover_csv(const std::vector<CrossoverRow>& rows);

}  // namespace qpinn::complexity
