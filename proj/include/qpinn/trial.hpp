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

// Trial functions behind the loss assembly: quantum networks (shift or fast
// engine), random classical networks, Gaussian-smoothed wrappers and fixed
// callables (analytic solutions).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qpinn/classical.hpp"
#include "qpinn/derivatives.hpp"
#include "qpinn/pde.hpp"
#include "qpinn/qnet.hpp"
#include "qpinn/rng.hpp"
#include "qpinn/smooth.hpp"

namespace qpinn::trial {

enum class Engine { Shift, Fast };
Engine parse_engine(const std::string& name);
std::string to_string(Engine engine);

class TrialFunction {
 public:
  virtual ~TrialFunction() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t parameter_count() const = 0;
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> theta) = 0;

  virtual double value(std::span<const double> x) const = 0;
  // Non-const: smoothed trials advance their noise stream.
  virtual InputDerivatives derivatives(std::span<const double> x, const DerivativeRequest& request,
                                       EvalCounter& counter) = 0;
  // Loss of one sample; its parameter gradient is added into grad.
  virtual double accumulate(const SampleObjective& objective, std::span<double> grad,
                            EvalCounter& counter) = 0;
};

class QuantumTrial final : public TrialFunction {
 public:
  QuantumTrial(qnet::NetworkSpec net, Engine engine);

  std::size_t input_dim() const override { return net_.d_in; }
  std::size_t parameter_count() const override { return net_.parameter_count(); }
  std::vector<double> parameters() const override { return net_.flat_parameters(); }
  void set_parameters(std::span<const double> theta) override;

  double value(std::span<const double> x) const override;
  InputDerivatives derivatives(std::span<const double> x, const DerivativeRequest& request,
                               EvalCounter& counter) override;
  double accumulate(const SampleObjective& objective, std::span<double> grad,
                    EvalCounter& counter) override;

  const qnet::NetworkSpec& network() const { return net_; }
  Engine engine() const { return engine_; }

 private:
  qnet::NetworkSpec net_;
  Engine engine_;
};

// Second derivatives by central differences of the output with step fd_h.
class ClassicalTrial final : public TrialFunction {
 public:
  explicit ClassicalTrial(classical::ClassicalRandomNet net, double fd_h = 1e-4);

  std::size_t input_dim() const override { return net_.d; }
  std::size_t parameter_count() const override { return net_.nodes; }
  std::vector<double> parameters() const override { return net_.W; }
  void set_parameters(std::span<const double> theta) override;

  double value(std::span<const double> x) const override;
  InputDerivatives derivatives(std::span<const double> x, const DerivativeRequest& request,
                               EvalCounter& counter) override;
  double accumulate(const SampleObjective& objective, std::span<double> grad,
                    EvalCounter& counter) override;

  const classical::ClassicalRandomNet& network() const { return net_; }

 private:
  // Derivatives of every node's feature relu(E_i x + B_i); the output's are
  // the W-weighted sum.
  std::vector<InputDerivatives> feature_derivatives(std::span<const double> x,
                                                    const DerivativeRequest& request) const;

  classical::ClassicalRandomNet net_;
  double fd_h_;
};

// f(x) = E[u(x + delta)] estimated with one stencil per call. Every stencil
// point is a value-only evaluation of the base trial.
class SmoothedTrial final : public TrialFunction {
 public:
  SmoothedTrial(std::shared_ptr<TrialFunction> base, smooth::SmoothingConfig cfg, RngStream rng);

  std::size_t input_dim() const override { return base_->input_dim(); }
  std::size_t parameter_count() const override { return base_->parameter_count(); }
  std::vector<double> parameters() const override { return base_->parameters(); }
  void set_parameters(std::span<const double> theta) override { base_->set_parameters(theta); }

  // The unsmoothed base value.
  double value(std::span<const double> x) const override { return base_->value(x); }
  InputDerivatives derivatives(std::span<const double> x, const DerivativeRequest& request,
                               EvalCounter& counter) override;
  double accumulate(const SampleObjective& objective, std::span<double> grad,
                    EvalCounter& counter) override;

  const TrialFunction& base() const { return *base_; }
  const smooth::SmoothingConfig& config() const { return cfg_; }

 private:
  std::shared_ptr<TrialFunction> base_;
  smooth::SmoothingConfig cfg_;
  RngStream rng_;
};

// Parameter-free trial defined by a callable returning derivatives.
class FunctionTrial final : public TrialFunction {
 public:
  using Fn = std::function<InputDerivatives(std::span<const double>, const DerivativeRequest&)>;
  FunctionTrial(std::size_t dim, Fn fn);

  std::size_t input_dim() const override { return dim_; }
  std::size_t parameter_count() const override { return 0; }
  std::vector<double> parameters() const override { return {}; }
  void set_parameters(std::span<const double> theta) override;

  double value(std::span<const double> x) const override;
  InputDerivatives derivatives(std::span<const double> x, const DerivativeRequest& request,
                               EvalCounter& counter) override;
  double accumulate(const SampleObjective& objective, std::span<double> grad,
                    EvalCounter& counter) override;

 private:
  std::size_t dim_;
  Fn fn_;
};

// Exact solution of the problem (plus a constant offset) with hand-coded
// derivatives. Throws for problems without an analytic solution.
std::shared_ptr<FunctionTrial> analytic_trial(const pde::PdeProblem& problem, double offset = 0.0);

}  // namespace qpinn::trial
