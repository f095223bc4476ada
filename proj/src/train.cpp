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

#include "qpinn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "qpinn/classical.hpp"

namespace qpinn::train {
namespace {

using nlohmann::json;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_nonempty(const Batch& b, const char* what) {
  if (b.empty()) throw std::invalid_argument(std::string(what) + ": empty batch");
}

// Sum of objectives; with grad the per-sample gradients are accumulated.
double run_objectives(trial::TrialFunction& trial, const std::vector<SampleObjective>& objs,
                      EvalCounter& counter, std::vector<double>* grad) {
  double total = 0.0;
  if (grad) {
    for (const auto& o : objs) total += trial.accumulate(o, *grad, counter);
    return total;
  }
  const std::size_t dim = trial.input_dim();
  for (const auto& o : objs) {
    const InputDerivatives dv = trial.derivatives(o.point, o.request, counter);
    InputDerivatives sens = InputDerivatives::zeros(dim);
    total += o.loss(dv, sens);
  }
  return total;
}

LossValue assemble(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                   const Batch& batch_r, const Batch& batch_e, double lambda_e,
                   pde::Formulation f, EvalCounter& counter, std::vector<double>* grad) {
  require_nonempty(batch_r, "loss");
  require_nonempty(batch_e, "loss");
  if (lambda_e < 0.0) throw std::invalid_argument("loss: lambda_e must be >= 0");
  if (grad) grad->assign(trial.parameter_count(), 0.0);
  LossValue lv;
  const auto bobj = boundary_objectives(problem, batch_e, lambda_e);
  const auto iobj = interior_objectives(problem, batch_r, f, &lv.degenerate);
  lv.boundary = run_objectives(trial, bobj, counter, grad);
  lv.interior = run_objectives(trial, iobj, counter, grad);
  lv.total = lv.boundary + lv.interior;
  return lv;
}

json problem_to_json(const pde::PdeProblem& p) {
  return json{{"kind", pde::to_string(p.kind)}, {"d", p.d},   {"p", p.p},
              {"T", p.T},                       {"mu", p.mu}, {"a", p.a},
              {"hjb_mode", pde::to_string(p.hjb_mode)}};
}

pde::PdeProblem problem_from_json(const json& j) {
  pde::PdeProblem p;
  p.kind = pde::parse_problem_kind(j.at("kind").get<std::string>());
  p.d = j.at("d").get<std::size_t>();
  p.p = j.at("p").get<double>();
  p.T = j.at("T").get<double>();
  p.mu = j.at("mu").get<double>();
  p.a = j.at("a").get<double>();
  p.hjb_mode = pde::parse_hjb_mode(j.at("hjb_mode").get<std::string>());
  p.validate();
  return p;
}

}  // namespace

void validate(const LossConfig& cfg, const pde::PdeProblem& problem) {
  problem.validate();
  if (cfg.n_r == 0 || cfg.n_e == 0) throw std::invalid_argument("loss: batch sizes must be >= 1");
  if (cfg.lambda_e < 0.0) throw std::invalid_argument("loss: lambda_e must be >= 0");
  if (pde::is_smoothed(cfg.formulation)) {
    if (!cfg.smoothing) throw std::invalid_argument("loss: smoothed formulation needs smoothing");
    smooth::validate(*cfg.smoothing);
  }
  if (pde::is_variational(cfg.formulation) && problem.kind != pde::ProblemKind::Poisson &&
      problem.kind != pde::ProblemKind::PLaplace) {
    throw std::invalid_argument("loss: variational formulation requires poisson or p_laplace");
  }
}

std::vector<SampleObjective> boundary_objectives(const pde::PdeProblem& problem,
                                                 const Batch& batch_e, double lambda_e) {
  std::vector<SampleObjective> out;
  const double w = lambda_e / static_cast<double>(batch_e.size());
  for (const auto& z : batch_e) {
    SampleObjective o;
    o.point = z;
    o.request = DerivativeRequest{};
    const double h = problem.boundary_value(z);
    o.loss = [h, w](const InputDerivatives& dv, InputDerivatives& s) {
      const double r = dv.value - h;
      s.value = w * sign(r);
      return w * std::abs(r);
    };
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<SampleObjective> interior_objectives(const pde::PdeProblem& problem,
                                                 const Batch& batch_r, pde::Formulation f,
                                                 std::size_t* degenerate) {
  std::vector<SampleObjective> out;
  const double w = 1.0 / static_cast<double>(batch_r.size());
  const DerivativeRequest req = problem.interior_request(f);
  const bool variational = pde::is_variational(f);
  for (const auto& z : batch_r) {
    SampleObjective o;
    o.point = z;
    o.request = req;
    if (variational) {
      o.loss = [problem, z, w](const InputDerivatives& dv, InputDerivatives& s) {
        const double v = problem.variational_at(dv, z, &s);
        s.value *= w;
        for (auto& g : s.gradient) g *= w;
        return w * v;
      };
    } else {
      o.loss = [problem, z, w, degenerate](const InputDerivatives& dv, InputDerivatives& s) {
        bool deg = false;
        const double r = problem.residual_at(dv, z, &s, &deg);
        if (deg && degenerate) ++*degenerate;
        const double c = w * sign(r);
        s.value *= c;
        for (auto& g : s.gradient) g *= c;
        for (auto& h : s.hessian.data()) h *= c;
        return w * std::abs(r);
      };
    }
    out.push_back(std::move(o));
  }
  return out;
}

LossValue standard_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                        const Batch& batch_r, const Batch& batch_e, double lambda_e,
                        EvalCounter& counter, std::vector<double>* grad) {
  return assemble(trial, problem, batch_r, batch_e, lambda_e, pde::Formulation::Standard, counter,
                  grad);
}

LossValue variational_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                           const Batch& batch_r, const Batch& batch_e, double lambda_e,
                           EvalCounter& counter, std::vector<double>* grad) {
  return assemble(trial, problem, batch_r, batch_e, lambda_e, pde::Formulation::Variational,
                  counter, grad);
}

LossValue evaluate_loss(trial::TrialFunction& trial, const pde::PdeProblem& problem,
                        const LossConfig& cfg, const Batch& batch_r, const Batch& batch_e,
                        EvalCounter& counter, std::vector<double>* grad) {
  if (pde::is_smoothed(cfg.formulation) && !dynamic_cast<trial::SmoothedTrial*>(&trial)) {
    throw std::invalid_argument("loss: smoothed formulation requires a smoothed trial");
  }
  return assemble(trial, problem, batch_r, batch_e, cfg.lambda_e, cfg.formulation, counter, grad);
}

void adam_step(std::vector<double>& params, std::span<const double> gradient, AdamState& state,
               const AdamConfig& cfg) {
  const std::size_t n = params.size();
  if (gradient.size() != n) throw std::invalid_argument("adam_step: gradient size mismatch");
  if (state.m.size() != n) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.t = 0;
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < n; ++k) {
    double g = gradient[k];
    if (cfg.clip) g = std::clamp(g, -*cfg.clip, *cfg.clip);
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[k] / bc1;
    const double vhat = state.v[k] / bc2;
    params[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

TrialKind parse_trial_kind(const std::string& name) {
  if (name == "quantum") return TrialKind::Quantum;
  if (name == "quantum_identity_lambda") return TrialKind::QuantumIdentityLambda;
  if (name == "classical") return TrialKind::Classical;
  throw std::invalid_argument("unknown trial kind '" + name + "'");
}

std::string to_string(TrialKind kind) {
  switch (kind) {
    case TrialKind::Quantum: return "quantum";
    case TrialKind::QuantumIdentityLambda: return "quantum_identity_lambda";
    case TrialKind::Classical: return "classical";
  }
  return "?";
}

TrainConfig default_config(const std::string& name) {
  TrainConfig c;
  if (name == "poisson" || name == "p_laplace") {
    c.problem = name == "poisson" ? pde::PdeProblem::poisson() : pde::PdeProblem::p_laplace(3.0);
    c.network.n_qubits = 6;
    c.network.layers = 1;
    c.loss.lambda_e = 1.0;
    c.loss.n_r = 128;
    c.loss.n_e = 64;
    c.adam.learning_rate = 1e-3;
    c.adam.clip.reset();
    c.adam.iterations = 1000;
  } else if (name == "heat_1d" || name == "heat_2d") {
    const bool two = name == "heat_2d";
    c.problem = pde::PdeProblem::heat(two ? 2 : 1);
    c.network.n_qubits = two ? 6 : 4;
    c.network.layers = two ? 2 : 1;
    c.loss.lambda_e = 500.0;
    c.loss.n_r = two ? 64 : 128;
    c.loss.n_e = 64;
    c.adam.learning_rate = 5e-3;
    c.adam.clip = 1.0;
    c.adam.iterations = two ? 2000 : 1000;
  } else if (name == "hjb") {
    c.problem = pde::PdeProblem::hjb(2);
    c.network.n_qubits = 9;
    c.network.layers = 1;
    c.network.encoding = qnet::EncodingKind::Tanh;
    c.loss.lambda_e = 500.0;
    c.loss.n_r = 64;
    c.loss.n_e = 64;
    c.adam.learning_rate = 5e-3;
    c.adam.clip = 1.0;
    c.adam.iterations = 750;
  } else {
    throw std::invalid_argument("unknown problem '" + name +
                                "' (expected poisson, p_laplace, heat_1d, heat_2d or hjb)");
  }
  return c;
}

std::shared_ptr<trial::TrialFunction> make_trial(const TrainConfig& cfg) {
  RngStream root(cfg.seed, 0);
  RngStream net_rng = root.split(1);
  const std::size_t d_in = cfg.problem.input_dim();
  std::shared_ptr<trial::TrialFunction> base;
  if (cfg.trial_kind == TrialKind::Classical) {
    base = std::make_shared<trial::ClassicalTrial>(
        classical::sample_network(cfg.network.classical_nodes, d_in, net_rng),
        cfg.network.classical_fd_h);
  } else {
    qnet::BuildOptions opts;
    opts.haar = cfg.trial_kind == TrialKind::Quantum;
    base = std::make_shared<trial::QuantumTrial>(
        qnet::build_network(cfg.network.n_qubits, cfg.network.layers, d_in, cfg.network.encoding,
                            net_rng, opts),
        cfg.network.engine);
  }
  if (pde::is_smoothed(cfg.loss.formulation)) {
    if (!cfg.loss.smoothing) throw std::invalid_argument("smoothed formulation needs smoothing");
    return std::make_shared<trial::SmoothedTrial>(base, *cfg.loss.smoothing, root.split(3));
  }
  return base;
}

std::string metric_name(const pde::PdeProblem& problem) {
  return problem.kind == pde::ProblemKind::Poisson || problem.kind == pde::ProblemKind::PLaplace
             ? "l2_relative_error"
             : "mse";
}

MetricReference metric_reference(const TrainConfig& cfg) {
  const pde::PdeProblem& pr = cfg.problem;
  using Key = std::tuple<std::string, std::size_t, std::uint64_t, std::size_t, double, double>;
  static std::mutex mu;
  static std::map<Key, MetricReference> cache;
  const Key key{pr.name() + "/" + pde::to_string(pr.hjb_mode), cfg.metric_samples,
                cfg.metric_seed, pr.kind == pde::ProblemKind::Hjb ? cfg.hjb_mc_samples : 0,
                pr.p, pr.a};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  RngStream rng(cfg.metric_seed, 7);
  MetricReference ref;
  ref.points = pr.sample_domain(cfg.metric_samples, rng);
  ref.values.reserve(ref.points.size());
  RngStream mc = rng.split(1);
  for (const auto& z : ref.points) {
    if (pr.kind == pde::ProblemKind::Hjb) {
      const std::vector<double> x(z.begin() + 1, z.end());
      ref.values.push_back(
          pde::hjb_reference(z[0], x, cfg.hjb_mc_samples, mc, pr.hjb_mode, pr.mu, pr.T).value);
    } else {
      ref.values.push_back(pr.exact(z));
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, ref);
  return ref;
}

double metric(trial::TrialFunction& trial, const pde::PdeProblem& problem,
              const MetricReference& reference) {
  if (reference.points.empty()) throw std::invalid_argument("metric: empty reference");
  double num = 0.0, den = 0.0;
  EvalCounter counter;
  const DerivativeRequest value_only;
  for (std::size_t k = 0; k < reference.points.size(); ++k) {
    const double u = trial.derivatives(reference.points[k], value_only, counter).value;
    const double e = u - reference.values[k];
    num += e * e;
    den += reference.values[k] * reference.values[k];
  }
  if (metric_name(problem) == "mse") return num / static_cast<double>(reference.points.size());
  if (den == 0.0) throw std::invalid_argument("metric: reference solution vanishes");
  return std::sqrt(num / den);
}

std::string make_checkpoint(const TrainConfig& cfg, const trial::TrialFunction& t) {
  const trial::TrialFunction* base = &t;
  json j;
  if (const auto* s = dynamic_cast<const trial::SmoothedTrial*>(base)) {
    j["smoothing"] = {{"sigma", s->config().sigma},
                      {"K", s->config().K},
                      {"antithetic", s->config().antithetic}};
    base = &s->base();
  }
  j["problem"] = problem_to_json(cfg.problem);
  j["seed"] = cfg.seed;
  if (const auto* q = dynamic_cast<const trial::QuantumTrial*>(base)) {
    j["kind"] = "quantum";
    j["engine"] = trial::to_string(q->engine());
    j["network"] = json::parse(qnet::serialize_network(q->network()));
  } else if (const auto* c = dynamic_cast<const trial::ClassicalTrial*>(base)) {
    j["kind"] = "classical";
    j["fd_h"] = cfg.network.classical_fd_h;
    j["network"] = json::parse(classical::serialize_network(c->network()));
  } else {
    j["kind"] = "analytic";
  }
  return j.dump(2);
}

LoadedCheckpoint load_checkpoint(const std::string& text) {
  const json j = json::parse(text);
  LoadedCheckpoint out;
  out.problem = problem_from_json(j.at("problem"));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quantum") {
    out.trial = std::make_shared<trial::QuantumTrial>(
        qnet::deserialize_network(j.at("network").dump()),
        trial::parse_engine(j.value("engine", std::string("fast"))));
  } else if (kind == "classical") {
    out.trial = std::make_shared<trial::ClassicalTrial>(
        classical::deserialize_network(j.at("network").dump()), j.value("fd_h", 1e-4));
  } else if (kind == "analytic") {
    out.trial = trial::analytic_trial(out.problem, j.value("offset", 0.0));
  } else {
    throw std::invalid_argument("checkpoint: unknown kind '" + kind + "'");
  }
  return out;
}

RunResult train(const TrainConfig& cfg) {
  validate(cfg.loss, cfg.problem);
  const auto start = std::chrono::steady_clock::now();
  auto trial = make_trial(cfg);
  RngStream batch_rng = RngStream(cfg.seed, 0).split(2);
  std::vector<double> params = trial->parameters();
  std::vector<double> grad;
  AdamState state;
  EvalCounter counter;
  RunResult res;
  res.seed = cfg.seed;
  res.history.reserve(cfg.adam.iterations);
  for (std::size_t it = 1; it <= cfg.adam.iterations; ++it) {
    const Batch br = cfg.problem.sample_domain(cfg.loss.n_r, batch_rng);
    const Batch be = cfg.problem.sample_boundary(cfg.loss.n_e, batch_rng);
    const LossValue lv = evaluate_loss(*trial, cfg.problem, cfg.loss, br, be, counter, &grad);
    adam_step(params, grad, state, cfg.adam);
    trial->set_parameters(params);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start).count();
    res.history.push_back({it, lv.total, ms, counter.evaluations});
  }
  res.metric_name = metric_name(cfg.problem);
  res.final_metric = metric(*trial, cfg.problem, metric_reference(cfg));
  res.evaluations = counter.evaluations;
  res.checkpoint = make_checkpoint(cfg, *trial);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace qpinn::train
