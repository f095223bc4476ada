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

// Parameter-shift differentiation of network expectations with respect to
// gate angles, chained to input derivatives and to Theta-gradients.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qpinn/derivatives.hpp"
#include "qpinn/matrix.hpp"
#include "qpinn/qnet.hpp"

namespace qpinn::qdiff {

inline constexpr double kHalfPi = 1.57079632679489661923;

// Weighted shifted evaluations: result = sum_k w_k g(shift_k) / denominator.
struct ShiftPlan {
  std::vector<std::pair<qnet::ShiftMap, double>> evaluations;
  double denominator = 1.0;
};

enum class SameSiteVariant { TwoPoint, ThreePoint };

// Throws std::invalid_argument when sin(s) is (numerically) zero.
ShiftPlan first_derivative_plan(std::size_t gate_id, double s = kHalfPi);
ShiftPlan mixed_derivative_plan(std::size_t gate_a, std::size_t gate_b, double s = kHalfPi);
ShiftPlan second_same_plan(std::size_t gate_id, SameSiteVariant variant);
// Reduced rule with exactly `order` evaluations (order >= 2). For odd order
// the g(angle + pi) entry carries weight zero and is still evaluated.
ShiftPlan order_d_plan(std::size_t gate_id, int order);
// Unreduced rule with order + 1 evaluations.
ShiftPlan order_d_unreduced_plan(std::size_t gate_id, int order);

double run_plan(const qnet::NetworkSpec& net, std::span<const double> x, const ShiftPlan& plan,
                EvalCounter& counter);

double angle_derivative(const qnet::NetworkSpec& net, std::span<const double> x,
                        std::size_t gate_id, double s, EvalCounter& counter);

struct SameSiteResult {
  double second = 0.0;
  double first = 0.0;  // only meaningful for ThreePoint
  bool has_first = false;
};
SameSiteResult angle_second_derivative_same(const qnet::NetworkSpec& net,
                                            std::span<const double> x, std::size_t gate_id,
                                            SameSiteVariant variant, EvalCounter& counter);

// Throws when gate_a == gate_b.
double angle_mixed_derivative(const qnet::NetworkSpec& net, std::span<const double> x,
                              std::size_t gate_a, std::size_t gate_b, double s,
                              EvalCounter& counter);

double angle_derivative_order_d(const qnet::NetworkSpec& net, std::span<const double> x,
                                std::size_t gate_id, int order, EvalCounter& counter);
double angle_derivative_order_d_unreduced(const qnet::NetworkSpec& net,
                                          std::span<const double> x, std::size_t gate_id,
                                          int order, EvalCounter& counter);

// Input derivatives assembled from shift rules; see shift_derivatives.
std::vector<double> spatial_gradient(const qnet::NetworkSpec& net, std::span<const double> x,
                                     EvalCounter& counter);
Matrix spatial_hessian(const qnet::NetworkSpec& net, std::span<const double> x, bool commuting,
                       EvalCounter& counter);

// Evaluation cost of one request under the shift engine:
//   value 1; hessian pair (i, j): 4 (alpha_i alpha_j - c_ij) + 3 c_ij with
//   c_ij = |dep(i) & dep(j)|; gradient coordinates not on the Hessian
//   diagonal: 2 alpha_i.
InputDerivatives shift_derivatives(const qnet::NetworkSpec& net, std::span<const double> x,
                                   const DerivativeRequest& request, EvalCounter& counter);

// Loss of one sample plus its Theta-gradient (added into grad). Every
// evaluation behind the derivatives is re-run at +-pi/2 on the site of each
// Theta component, so the counter grows by (1 + 2 N_Theta) times the
// derivative cost.
double shift_accumulate(const qnet::NetworkSpec& net, const SampleObjective& objective,
                        std::span<double> grad, EvalCounter& counter);

// Mean loss over a batch with its Theta-gradient.
double theta_gradient(const qnet::NetworkSpec& net, std::span<const SampleObjective> batch,
                      std::vector<double>& grad, EvalCounter& counter);

// Fast mode: exact derivatives from one forward simulation carrying Taylor
// coefficients in the input, and a backward sweep for the Theta-gradient.
// Agrees with the shift engine up to rounding; it does not touch counters.
// At most 4 distinct differentiated coordinates per request.
InputDerivatives fast_derivatives(const qnet::NetworkSpec& net, std::span<const double> x,
                                  const DerivativeRequest& request);
double fast_accumulate(const qnet::NetworkSpec& net, const SampleObjective& objective,
                       std::span<double> grad);

using ScalarField = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x, double h);
Matrix fd_hessian(const ScalarField& f, std::span<const double> x, double h);

}  // namespace qpinn::qdiff
