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

// PDE catalog: p-Laplace / Poisson, heat and HJB problems with residual
// operators, boundary data, reference solutions and collocation samplers.
// Time-dependent problems use the input layout z = (t, x_1, ..., x_d).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpinn/derivatives.hpp"
#include "qpinn/matrix.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::pde {

enum class ProblemKind { PLaplace, Poisson, Heat, Hjb };
enum class HjbMode { Standard, Literal };

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);
HjbMode parse_hjb_mode(const std::string& name);
std::string to_string(HjbMode mode);

// Spatial derivatives of a trial function at one point.
struct DerivativeBundle {
  double value = 0.0;
  std::vector<double> gradient;
  std::optional<Matrix> hessian;
  std::optional<double> time_derivative;

  double laplacian() const;
};

// |grad u|^(p-4) (|grad u|^2 lap u + (p-2) sum u_i u_j u_ij) + f. For p = 2
// the mixed term is dropped. When |grad u| < 1e-12 and p < 4 the residual is
// |grad u|^(p-2) lap u + f (floored at 1e-12) and *degenerate is set.
double p_laplace_residual(const DerivativeBundle& bundle, double f_val, double p,
                          bool* degenerate = nullptr);
// (1/p) |grad u|^p - f u
double variational_density(const DerivativeBundle& bundle, double f_val, double p);
// lap u - du/dt
double heat_residual(const DerivativeBundle& bundle);
// du/dt + lap u - mu |grad_x u|^2
double hjb_residual(const DerivativeBundle& bundle, double mu);

// h(x) = log((1 + |x|^2) / 2)
double hjb_terminal(std::span<const double> x);

struct McValue {
  double value = 0.0;
  double std_error = 0.0;
  HjbMode mode = HjbMode::Standard;
};

// Monte Carlo solution of the HJB problem with y ~ N(0, I_d):
//   standard       -(1/mu) log E[exp(-mu h(x - sqrt(2 (T - t)) y))]
//   literal  -mu (2 pi)^(-d/2) log((2 pi)^(d/2) E[...])
McValue hjb_reference(double t, std::span<const double> x, std::size_t mc_samples, RngStream& rng,
                      HjbMode mode = HjbMode::Standard, double mu = 1.0, double T = 1.0);
// Same estimator with a caller-supplied terminal function in place of h.
using TerminalFn = std::function<double(std::span<const double>)>;
McValue hjb_reference(double t, std::span<const double> x, std::size_t mc_samples, RngStream& rng,
                      const TerminalFn& terminal, HjbMode mode = HjbMode::Standard,
                      double mu = 1.0, double T = 1.0);

// Poisson manufactured solution on (0,1)^2 and its hand-coded derivatives.
double poisson_exact(double x, double y);
double poisson_source(double x, double y);
DerivativeBundle poisson_exact_bundle(double x, double y);

// u(t, x) = d^(1/d) exp(-a^2 pi^2 d t) prod sin(a pi x_i)
double heat_exact(double t, std::span<const double> x, double a);
DerivativeBundle heat_exact_bundle(double t, std::span<const double> x, double a);
// Closed-form lower bound of the Lipschitz constant of heat_exact on
// [0,1]^d x [0, T), evaluated at t = 0, x = (1/2, ..., 1/2).
double heat_lipschitz_lower_bound(std::size_t d, double a);

enum class Formulation { Standard, Variational, StandardSmoothed, VariationalSmoothed };
Formulation parse_formulation(const std::string& name);
std::string to_string(Formulation f);
bool is_smoothed(Formulation f);
bool is_variational(Formulation f);

class PdeProblem {
 public:
  ProblemKind kind = ProblemKind::Poisson;
  std::size_t d = 2;  // spatial dimension
  double p = 2.0;
  double T = 1.0;
  double mu = 1.0;
  double a = 0.25;
  HjbMode hjb_mode = HjbMode::Standard;

  static PdeProblem poisson();
  static PdeProblem p_laplace(double p);
  static PdeProblem heat(std::size_t d);
  static PdeProblem hjb(std::size_t d = 2);

  // Throws std::invalid_argument when invariants fail (p <= 1, T <= 0, ...).
  void validate() const;

  std::string name() const;
  bool has_time() const { return kind == ProblemKind::Heat || kind == ProblemKind::Hjb; }
  std::size_t input_dim() const { return d + (has_time() ? 1 : 0); }
  std::size_t spatial_offset() const { return has_time() ? 1 : 0; }
  bool has_analytic_solution() const { return kind != ProblemKind::Hjb; }

  // Interior source f (p-Laplace family only).
  double source(std::span<const double> z) const;
  // Boundary, initial or terminal data at a boundary-batch point.
  double boundary_value(std::span<const double> z) const;
  // Analytic solution; throws for HJB (use hjb_reference).
  double exact(std::span<const double> z) const;
  DerivativeBundle exact_bundle(std::span<const double> z) const;

  // Derivatives the interior loss term needs at one point.
  DerivativeRequest interior_request(Formulation f) const;
  DerivativeBundle to_bundle(const InputDerivatives& derivs) const;

  // Strong-form residual F(u)(z).
  double residual(const DerivativeBundle& bundle, std::span<const double> z,
                  bool* degenerate = nullptr) const;

  // The same quantities evaluated on input derivatives. When `sens` is given
  // it is overwritten with d(result)/d(each entry of derivs).
  double residual_at(const InputDerivatives& derivs, std::span<const double> z,
                     InputDerivatives* sens, bool* degenerate = nullptr) const;
  double variational_at(const InputDerivatives& derivs, std::span<const double> z,
                        InputDerivatives* sens) const;

  std::vector<std::vector<double>> sample_domain(std::size_t count, RngStream& rng) const;
  std::vector<std::vector<double>> sample_boundary(std::size_t count, RngStream& rng) const;
};

}  // namespace qpinn::pde
