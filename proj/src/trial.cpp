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

#include "qpinn/trial.hpp"

#include <stdexcept>

#include "qpinn/qdiff.hpp"

namespace qpinn::trial {
namespace {

std::size_t qindex_grad(std::size_t i) { return 1 + i; }
std::size_t qindex_hess(std::size_t d, std::size_t i, std::size_t j) { return 1 + d + i * d + j; }

// Linear functional <sens, derivs> over every entry.
double contract(const InputDerivatives& sens, const InputDerivatives& dv) {
  double s = sens.value * dv.value;
  for (std::size_t i = 0; i < sens.gradient.size(); ++i) s += sens.gradient[i] * dv.gradient[i];
  const auto hs = sens.hessian.data();
  const auto hd = dv.hessian.data();
  for (std::size_t k = 0; k < hs.size(); ++k) s += hs[k] * hd[k];
  return s;
}

void check_dim(std::span<const double> x, std::size_t dim, const char* what) {
  if (x.size() != dim) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

Engine parse_engine(const std::string& name) {
  if (name == "shift") return Engine::Shift;
  if (name == "fast") return Engine::Fast;
  throw std::invalid_argument("unknown engine '" + name + "' (expected shift or fast)");
}

std::string to_string(Engine engine) { return engine == Engine::Shift ? "shift" : "fast"; }

QuantumTrial::QuantumTrial(qnet::NetworkSpec net, Engine engine)
    : net_(std::move(net)), engine_(engine) {}

void QuantumTrial::set_parameters(std::span<const double> theta) {
  net_.set_flat_parameters(theta);
}

double QuantumTrial::value(std::span<const double> x) const { return qnet::evaluate(net_, x); }

InputDerivatives QuantumTrial::derivatives(std::span<const double> x,
                                           const DerivativeRequest& request,
                                           EvalCounter& counter) {
  if (engine_ == Engine::Fast) return qdiff::fast_derivatives(net_, x, request);
  return qdiff::shift_derivatives(net_, x, request, counter);
}

double QuantumTrial::accumulate(const SampleObjective& objective, std::span<double> grad,
                                EvalCounter& counter) {
  if (engine_ == Engine::Fast) return qdiff::fast_accumulate(net_, objective, grad);
  return qdiff::shift_accumulate(net_, objective, grad, counter);
}

ClassicalTrial::ClassicalTrial(classical::ClassicalRandomNet net, double fd_h)
    : net_(std::move(net)), fd_h_(fd_h) {
  if (!(fd_h_ > 0.0)) throw std::invalid_argument("ClassicalTrial: fd_h must be > 0");
}

void ClassicalTrial::set_parameters(std::span<const double> theta) {
  if (theta.size() != net_.nodes) throw std::invalid_argument("ClassicalTrial: wrong parameter count");
  net_.W.assign(theta.begin(), theta.end());
}

double ClassicalTrial::value(std::span<const double> x) const {
  return classical::classical_forward(net_, x);
}

std::vector<InputDerivatives> ClassicalTrial::feature_derivatives(
    std::span<const double> x, const DerivativeRequest& request) const {
  check_dim(x, net_.d, "ClassicalTrial");
  const std::size_t d = net_.d;
  const double h = fd_h_;
  std::vector<InputDerivatives> out(net_.nodes, InputDerivatives::zeros(d));
  std::vector<double> xs(x.begin(), x.end());
  auto feature = [&](std::size_t i) { return std::max(0.0, net_.preactivation(i, xs)); };
  auto shifted = [&](std::size_t i, std::size_t a, double sa, std::size_t b, double sb) {
    xs[a] += sa;
    xs[b] += sb;
    const double v = feature(i);
    xs[a] -= sa;
    xs[b] -= sb;
    return v;
  };
  for (std::size_t i = 0; i < net_.nodes; ++i) {
    InputDerivatives& o = out[i];
    const double z = net_.preactivation(i, x);
    o.value = std::max(0.0, z);
    for (std::size_t k : request.gradient) o.gradient[k] = z > 0.0 ? net_.E(i, k) : 0.0;
    if (request.hessian == HessianMode::None) continue;
    for (std::size_t a : request.hessian_coords) {
      for (std::size_t b : request.hessian_coords) {
        if (a == b) {
          o.hessian(a, a) =
              (shifted(i, a, h, a, 0.0) - 2.0 * o.value + shifted(i, a, -h, a, 0.0)) / (h * h);
        } else if (request.hessian != HessianMode::Diagonal && a < b) {
          const double v = (shifted(i, a, h, b, h) - shifted(i, a, h, b, -h) -
                            shifted(i, a, -h, b, h) + shifted(i, a, -h, b, -h)) /
                           (4.0 * h * h);
          o.hessian(a, b) = o.hessian(b, a) = v;
        }
      }
    }
  }
  return out;
}

InputDerivatives ClassicalTrial::derivatives(std::span<const double> x,
                                             const DerivativeRequest& request,
                                             EvalCounter& counter) {
  const auto feats = feature_derivatives(x, request);
  InputDerivatives out = InputDerivatives::zeros(net_.d);
  for (std::size_t i = 0; i < net_.nodes; ++i) {
    const double w = net_.W[i];
    out.value += w * feats[i].value;
    for (std::size_t k = 0; k < net_.d; ++k) out.gradient[k] += w * feats[i].gradient[k];
    auto dst = out.hessian.data();
    const auto src = feats[i].hessian.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
  }
  counter.add();
  return out;
}

double ClassicalTrial::accumulate(const SampleObjective& objective, std::span<double> grad,
                                  EvalCounter& counter) {
  if (grad.size() != net_.nodes) throw std::invalid_argument("ClassicalTrial: gradient size");
  const auto feats = feature_derivatives(objective.point, objective.request);
  InputDerivatives out = InputDerivatives::zeros(net_.d);
  for (std::size_t i = 0; i < net_.nodes; ++i) {
    const double w = net_.W[i];
    out.value += w * feats[i].value;
    for (std::size_t k = 0; k < net_.d; ++k) out.gradient[k] += w * feats[i].gradient[k];
    auto dst = out.hessian.data();
    const auto src = feats[i].hessian.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
  }
  counter.add();
  InputDerivatives sens = InputDerivatives::zeros(net_.d);
  const double loss = objective.loss(out, sens);
  for (std::size_t i = 0; i < net_.nodes; ++i) grad[i] += contract(sens, feats[i]);
  return loss;
}

SmoothedTrial::SmoothedTrial(std::shared_ptr<TrialFunction> base, smooth::SmoothingConfig cfg,
                             RngStream rng)
    : base_(std::move(base)), cfg_(cfg), rng_(std::move(rng)) {
  if (!base_) throw std::invalid_argument("SmoothedTrial: null base trial");
  smooth::validate(cfg_);
}

InputDerivatives SmoothedTrial::derivatives(std::span<const double> x,
                                            const DerivativeRequest& request,
                                            EvalCounter& counter) {
  const smooth::Stencil st = smooth::build_stencil(x, request, cfg_, rng_);
  DerivativeRequest value_only;
  const auto res = smooth::apply_stencil(st, [&](std::span<const double> p) {
    return base_->derivatives(p, value_only, counter).value;
  });
  return res.mean;
}

double SmoothedTrial::accumulate(const SampleObjective& objective, std::span<double> grad,
                                 EvalCounter& counter) {
  const std::size_t d = input_dim();
  const smooth::Stencil st = smooth::build_stencil(objective.point, objective.request, cfg_, rng_);
  const std::size_t np = st.points.size();
  const std::size_t nt = parameter_count();
  if (grad.size() != nt) throw std::invalid_argument("SmoothedTrial: gradient size");

  SampleObjective point_obj;
  point_obj.request = DerivativeRequest{};
  point_obj.loss = [](const InputDerivatives& dv, InputDerivatives& s) {
    s.value = 1.0;
    return dv.value;
  };
  std::vector<double> u(np);
  std::vector<double> point_grads(np * nt, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    point_obj.point = st.points[p];
    u[p] = base_->accumulate(point_obj, std::span<double>(point_grads).subspan(p * nt, nt),
                             counter);
  }

  InputDerivatives dv = InputDerivatives::zeros(d);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& w = st.weights[p];
    dv.value += w[0] * u[p];
    for (std::size_t i = 0; i < d; ++i) dv.gradient[i] += w[qindex_grad(i)] * u[p];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) dv.hessian(i, j) += w[qindex_hess(d, i, j)] * u[p];
    }
  }
  InputDerivatives sens = InputDerivatives::zeros(d);
  const double loss = objective.loss(dv, sens);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& w = st.weights[p];
    double c = sens.value * w[0];
    for (std::size_t i = 0; i < d; ++i) c += sens.gradient[i] * w[qindex_grad(i)];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) c += sens.hessian(i, j) * w[qindex_hess(d, i, j)];
    }
    if (c == 0.0) continue;
    for (std::size_t k = 0; k < nt; ++k) grad[k] += c * point_grads[p * nt + k];
  }
  return loss;
}

FunctionTrial::FunctionTrial(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {
  if (!fn_) throw std::invalid_argument("FunctionTrial: empty callable");
}

void FunctionTrial::set_parameters(std::span<const double> theta) {
  if (!theta.empty()) throw std::invalid_argument("FunctionTrial: has no parameters");
}

double FunctionTrial::value(std::span<const double> x) const {
  check_dim(x, dim_, "FunctionTrial");
  return fn_(x, DerivativeRequest{}).value;
}

InputDerivatives FunctionTrial::derivatives(std::span<const double> x,
                                            const DerivativeRequest& request,
                                            EvalCounter& counter) {
  check_dim(x, dim_, "FunctionTrial");
  counter.add();
  return fn_(x, request);
}

double FunctionTrial::accumulate(const SampleObjective& objective, std::span<double>,
                                 EvalCounter& counter) {
  const InputDerivatives dv = derivatives(objective.point, objective.request, counter);
  InputDerivatives sens = InputDerivatives::zeros(dim_);
  return objective.loss(dv, sens);
}

std::shared_ptr<FunctionTrial> analytic_trial(const pde::PdeProblem& problem, double offset) {
  if (!problem.has_analytic_solution()) {
    throw std::invalid_argument("analytic_trial: problem has no analytic solution");
  }
  const std::size_t dim = problem.input_dim();
  const std::size_t off = problem.spatial_offset();
  return std::make_shared<FunctionTrial>(
      dim, [problem, offset, dim, off](std::span<const double> z, const DerivativeRequest&) {
        const pde::DerivativeBundle b = problem.exact_bundle(z);
        InputDerivatives out = InputDerivatives::zeros(dim);
        out.value = b.value + offset;
        for (std::size_t i = 0; i < b.gradient.size(); ++i) out.gradient[off + i] = b.gradient[i];
        if (b.time_derivative) out.gradient[0] = *b.time_derivative;
        if (b.hessian) {
          for (std::size_t i = 0; i < problem.d; ++i) {
            for (std::size_t j = 0; j < problem.d; ++j) {
              out.hessian(off + i, off + j) = (*b.hessian)(i, j);
            }
          }
        }
        return out;
      });
}

}  // namespace qpinn::trial
