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

// Gaussian smoothing f(x) = E[u(x + delta)], delta ~ N(0, sigma^2 I), with
// Monte Carlo estimators of f and its first and second derivatives.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qpinn/derivatives.hpp"
#include "qpinn/matrix.hpp"
#include "qpinn/rng.hpp"

namespace qpinn::smooth {

// K counts Gaussian samples. With antithetic pairing the K samples are K/2
// independent draws delta together with their mirrors -delta, so K must be
// even.
struct SmoothingConfig {
  double sigma = 0.1;
  std::size_t K = 1024;
  bool antithetic = true;
};

void validate(const SmoothingConfig& cfg);

using Evaluator = std::function<double(std::span<const double>)>;

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct VectorEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
};

struct MatrixEstimate {
  Matrix mean;
  Matrix std_error;
};

// Linear stencil: every smoothed quantity is sum_p weight[p][q] u(points[p]).
// Quantity layout q: 0 value, 1 + i gradient, 1 + d + i d + j Hessian.
struct Stencil {
  std::size_t dim = 0;
  std::size_t draws = 0;
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> draw_of;
  std::vector<std::vector<double>> weights;  // already divided by draws

  std::size_t quantity_count() const { return 1 + dim + dim * dim; }
};

// One set of draws shared by every estimator at x (common random numbers).
// All coordinates are perturbed jointly. Paired form per draw:
//   value     (u+ + u-)/2
//   gradient  delta/(2 sigma^2) (u+ - u-)
//   Hessian   (delta delta^T - sigma^2 I)/(2 sigma^4) (u+ + u- - 2 u0)
// restricted to the requested Hessian coordinates. The plain form uses the
// single point x + delta with weights 1, delta/sigma^2 and
// (delta delta^T - sigma^2 I)/sigma^4.
Stencil build_stencil(std::span<const double> x, const DerivativeRequest& request,
                      const SmoothingConfig& cfg, RngStream& rng);

struct StencilResult {
  InputDerivatives mean;
  InputDerivatives std_error;
  std::vector<double> u_values;  // u at each stencil point
};

StencilResult apply_stencil(const Stencil& stencil, const Evaluator& u);

Estimate smoothed_value(const Evaluator& u, std::span<const double> x,
                        const SmoothingConfig& cfg, RngStream& rng);
VectorEstimate smoothed_gradient(const Evaluator& u, std::span<const double> x,
                                 const SmoothingConfig& cfg, RngStream& rng);
MatrixEstimate smoothed_hessian(const Evaluator& u, std::span<const double> x,
                                const SmoothingConfig& cfg, RngStream& rng);
Estimate smoothed_laplacian(const Evaluator& u, std::span<const double> x,
                            const SmoothingConfig& cfg, RngStream& rng);

// Joint estimator over z = (t, x): mean[0] is d/dt, mean[1 + i] is d/dx_i.
VectorEstimate smoothed_time_derivative(const Evaluator& u, double t, std::span<const double> x,
                                        const SmoothingConfig& cfg, RngStream& rng);

// (u_max / sigma) sqrt(2 / pi). Throws for sigma <= 0 or u_max < 0.
double lipschitz_diagnostic(double u_max, double sigma);

}  // namespace qpinn::smooth
