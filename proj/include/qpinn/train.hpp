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

// Loss assembly, Adam with component clipping, training loop and metrics.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpinn/derivatives.hpp"
#include "qpinn/pde.hpp"
#include "qpinn/qnet.hpp"
#include "qpinn/smooth.hpp"
#include "qpinn/trial.hpp"

namespace qpinn::train {

using Batch = std::vector<std::vector<double>>;

struct LossConfig {
  pde::Formulation formulation = pde::Formulation::Standard;
  double lambda_e = 1.0;
  std::size_t n_r = 128;
  std::size_t n_e = 64;
  std::optional<smooth::SmoothingConfig> smoothing;
};

// Throws when the configuration cannot be used with the problem.
void validate(const LossConfig& cfg, const pde::PdeProblem& problem);

struct LossValue {
  double total = 0.0;
  double boundary = 0.0;  // lambda_e-weighted
  double interior = 0.0;
  std::size_t degenerate = 0;  // p-Laplace points with vanishing gradient
};

// Per-sample objectives of the loss. The mean weights 1/n are folded in, so
// the loss is the plain sum of the objectives.
std::vector<SampleObjective> boundary_objectives(const pde::PdeProblem& problem,
                                                 const Batch& batch_e, double lambda_e);
std::vector<SampleObjective> interior_objectives(const pde::PdeProblem& problem,
                                                 const Batch& batch_r, pde::Formulation f,
                                                 std::size_t* degenerate = nullptr);

// With grad non-null the parameter gradient is written there.
// Standard: (lambda_e / n_e) sum |u - h| + (1/n_r) sum |F(u)|.
LossValue standard_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                        const Batch& batch_r, const Batch& batch_e, double lambda_e,
                        EvalCounter& counter, std::vector<double>* grad = nullptr);
// Variational: boundary term as above plus (1/n_r) sum [(1/p)|grad u|^p - f u].
LossValue variational_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                           const Batch& batch_r, const Batch& batch_e, double lambda_e,
                           EvalCounter& counter, std::vector<double>* grad = nullptr);
// Dispatches on the formulation. Smoothed formulations expect a smoothed trial.
LossValue evaluate_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                        const LossConfig& cfg, const Batch& batch_r, const Batch& batch_e,
                        EvalCounter& counter, std::vector<double>* grad = nullptr);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::optional<double> clip;
  std::size_t iterations = 1000;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

// One bias-corrected Adam update. With clip set every raw gradient component
// is clamped to [-clip, clip] first.
void adam_step(std::vector<double>& params, std::span<const double> gradient, AdamState& state,
               const AdamConfig& cfg);

enum class TrialKind { Quantum, QuantumIdentityLambda, Classical };
TrialKind parse_trial_kind(const std::string& name);
std::string to_string(TrialKind kind);

struct NetworkConfig {
  std::size_t n_qubits = 6;
  std::size_t layers = 1;
  qnet::EncodingKind encoding = qnet::EncodingKind::ChebyshevAcos;
  std::size_t classical_nodes = 100;
  double classical_fd_h = 1e-4;
  trial::Engine engine = trial::Engine::Fast;
};

struct TrainConfig {
  pde::PdeProblem problem = pde::PdeProblem::poisson();
  TrialKind trial_kind = TrialKind::Quantum;
  NetworkConfig network;
  LossConfig loss;
  AdamConfig adam;
  std::uint64_t seed = 1;
  std::size_t metric_samples = 1000;
  std::uint64_t metric_seed = 20240901;
  std::size_t hjb_mc_samples = 100000;
};

// Default settings per named problem: poisson, p_laplace, heat_1d,
// heat_2d, hjb.
TrainConfig default_config(const std::string& problem_name);

// Network built from the seed; parameters initialized before training.
std::shared_ptr<trial::TrialFunction> make_trial(const TrainConfig& cfg);

struct IterationRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double wall_ms = 0.0;
  std::uint64_t eval_count = 0;  // cumulative
};

struct RunResult {
  std::vector<IterationRecord> history;
  double final_metric = 0.0;
  std::string metric_name;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::uint64_t evaluations = 0;
  std::string checkpoint;  // JSON network + problem
};

RunResult train(const TrainConfig& cfg);

// Fixed evaluation points and reference values, shared by all seeds.
struct MetricReference {
  Batch points;
  std::vector<double> values;
};
MetricReference metric_reference(const TrainConfig& cfg);

// Poisson / p-Laplace: L2 relative error; heat and HJB: mean squared error.
// Smoothed trials are measured through their smoothed value.
double metric(trial::TrialFunction& trial, const pde::PdeProblem& problem,
              const MetricReference& reference);
std::string metric_name(const pde::PdeProblem& problem);

// Checkpoints hold the trained network and the problem it was trained on.
std::string make_checkpoint(const TrainConfig& cfg, const trial::TrialFunction& trial);
struct LoadedCheckpoint {
  pde::PdeProblem problem;
  std::shared_ptr<trial::TrialFunction> trial;
};
LoadedCheckpoint load_checkpoint(const std::string& text);

}  // namespace qpinn::train
