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

#include "qpinn/qdiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpinn::qdiff {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require_shift(double s) {
  if (std::abs(std::sin(s)) < 1e-12) {
    throw std::invalid_argument("parameter shift: sin(s) must be nonzero");
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// d(angle)/d(x_i) as a factor that may depend on Theta.
struct Partial {
  std::size_t site = 0;
  std::size_t coord = 0;
};

// One contribution coef * prod(partials) * second * g(evaluation) to one
// derivative entry. `second` is d^2 angle / dx_i dx_j (encoding sites only).
struct Term {
  std::size_t eval = 0;
  std::size_t quantity = 0;  // 0 value, 1 + i gradient, 1 + d + i d + j hessian
  double coef = 0.0;
  int n_partials = 0;
  Partial partials[2];
};

struct Expansion {
  std::vector<qnet::ShiftMap> evaluations;
  std::vector<Term> terms;
};

class ExpansionBuilder {
 public:
  ExpansionBuilder(const qnet::NetworkSpec& net, std::span<const double> x)
      : net_(net), x_(x.begin(), x.end()), sites_(qnet::angle_registry(net)) {
    by_coord_.resize(net.d_in);
    for (const auto& s : sites_) {
      for (std::size_t i : s.dependencies) by_coord_[i].push_back(s.gate_id);
    }
  }

  const std::vector<std::size_t>& sites_on(std::size_t coord) const { return by_coord_[coord]; }
  const qnet::AngleSite& site(std::size_t id) const { return sites_[id]; }
  std::size_t dim() const { return net_.d_in; }

  std::size_t add_eval(qnet::ShiftMap shifts) {
    out_.evaluations.push_back(std::move(shifts));
    return out_.evaluations.size() - 1;
  }

  void add_term(std::size_t eval, std::size_t quantity, double coef,
                std::initializer_list<Partial> partials) {
    Term t;
    t.eval = eval;
    t.quantity = quantity;
    t.coef = coef;
    for (const auto& p : partials) t.partials[t.n_partials++] = p;
    out_.terms.push_back(t);
  }

  double second_partial(std::size_t site, std::size_t i, std::size_t j) const {
    return qnet::angle_second_partial(net_, sites_[site], x_, i, j);
  }

  std::size_t grad_q(std::size_t i) const { return 1 + i; }
  std::size_t hess_q(std::size_t i, std::size_t j) const { return 1 + dim() + i * dim() + j; }

  Expansion take() { return std::move(out_); }

 private:
  const qnet::NetworkSpec& net_;
  std::vector<double> x_;
  std::vector<qnet::AngleSite> sites_;
  std::vector<std::vector<std::size_t>> by_coord_;
  Expansion out_;
};

// Hessian entry (i, j) via mixed four-point rules for distinct sites and the
// three-point rule for shared sites. On the diagonal the three-point step
// also yields the gradient entry.
void add_hessian_entry(ExpansionBuilder& b, std::size_t i, std::size_t j) {
  const double s = kHalfPi;
  const double w4 = 1.0 / (4.0 * std::sin(s) * std::sin(s));
  const std::size_t q = b.hess_q(i, j);
  for (std::size_t a : b.sites_on(i)) {
    for (std::size_t c : b.sites_on(j)) {
      if (a == c) continue;
      const double sign[4] = {1.0, -1.0, -1.0, 1.0};
      const double sa[4] = {s, -s, s, -s};
      const double sc[4] = {s, s, -s, -s};
      for (int k = 0; k < 4; ++k) {
        const std::size_t e = b.add_eval({{a, sa[k]}, {c, sc[k]}});
        b.add_term(e, q, sign[k] * w4, {{a, i}, {c, j}});
      }
    }
  }
  const auto& dep_j = b.sites_on(j);
  for (std::size_t a : b.sites_on(i)) {
    if (std::find(dep_j.begin(), dep_j.end(), a) == dep_j.end()) continue;
    const std::size_t ep = b.add_eval({{a, kHalfPi}});
    const std::size_t e0 = b.add_eval({});
    const std::size_t em = b.add_eval({{a, -kHalfPi}});
    // g_aa = (g+ - 2 g0 + g-)/2, g_a = (g+ - g-)/2
    b.add_term(ep, q, 0.5, {{a, i}, {a, j}});
    b.add_term(e0, q, -1.0, {{a, i}, {a, j}});
    b.add_term(em, q, 0.5, {{a, i}, {a, j}});
    const double second = b.second_partial(a, i, j);
    if (second != 0.0) {
      b.add_term(ep, q, 0.5 * second, {});
      b.add_term(em, q, -0.5 * second, {});
    }
    if (i == j) {
      b.add_term(ep, b.grad_q(i), 0.5, {{a, i}});
      b.add_term(em, b.grad_q(i), -0.5, {{a, i}});
    }
  }
}

Expansion build_expansion(const qnet::NetworkSpec& net, std::span<const double> x,
                          const DerivativeRequest& request) {
  ExpansionBuilder b(net, x);
  const std::size_t d = net.d_in;
  for (std::size_t i : request.gradient) {
    if (i >= d) throw std::out_of_range("DerivativeRequest: gradient coordinate out of range");
  }
  for (std::size_t i : request.hessian_coords) {
    if (i >= d) throw std::out_of_range("DerivativeRequest: hessian coordinate out of range");
  }
  if (request.value) {
    const std::size_t e = b.add_eval({});
    b.add_term(e, 0, 1.0, {});
  }
  std::vector<bool> grad_done(d, false);
  std::vector<std::size_t> hc = request.hessian_coords;
  std::sort(hc.begin(), hc.end());
  hc.erase(std::unique(hc.begin(), hc.end()), hc.end());
  if (request.hessian != HessianMode::None) {
    for (std::size_t ii = 0; ii < hc.size(); ++ii) {
      for (std::size_t jj = 0; jj < hc.size(); ++jj) {
        const std::size_t i = hc[ii];
        const std::size_t j = hc[jj];
        if (request.hessian == HessianMode::Diagonal && i != j) continue;
        if (request.hessian == HessianMode::Commuting && jj < ii) continue;
        add_hessian_entry(b, i, j);
      }
      grad_done[hc[ii]] = true;
    }
  }
  for (std::size_t i : request.gradient) {
    if (grad_done[i]) continue;
    grad_done[i] = true;
    for (std::size_t a : b.sites_on(i)) {
      const std::size_t ep = b.add_eval({{a, kHalfPi}});
      const std::size_t em = b.add_eval({{a, -kHalfPi}});
      const double w = 1.0 / (2.0 * std::sin(kHalfPi));
      b.add_term(ep, b.grad_q(i), w, {{a, i}});
      b.add_term(em, b.grad_q(i), -w, {{a, i}});
    }
  }
  return b.take();
}

// Theta index of the component that the partial dangle/dx_i depends on, or
// -1 when it is Theta-free. The coefficient of that dependence is 2.
long partial_theta_index(const qnet::NetworkSpec& net, const qnet::AngleSite& site,
                         std::size_t coord) {
  if (site.kind != qnet::SiteKind::UatRz) return -1;
  const std::size_t block = (site.layer * net.n_qubits + site.qubit) * (net.d_in + 2);
  return static_cast<long>(block + 1 + coord);
}

InputDerivatives assemble(const qnet::NetworkSpec& net, std::span<const double> x,
                          const Expansion& ex, const std::vector<double>& g,
                          const DerivativeRequest& request) {
  const std::size_t d = net.d_in;
  const auto sites = qnet::angle_registry(net);
  InputDerivatives out = InputDerivatives::zeros(d);
  std::vector<double> q(1 + d + d * d, 0.0);
  for (const auto& t : ex.terms) {
    double w = t.coef;
    for (int k = 0; k < t.n_partials; ++k) {
      w *= qnet::angle_partial(net, sites[t.partials[k].site], x, t.partials[k].coord);
    }
    q[t.quantity] += w * g[t.eval];
  }
  out.value = q[0];
  for (std::size_t i = 0; i < d; ++i) out.gradient[i] = q[1 + i];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.hessian(i, j) = q[1 + d + i * d + j];
  }
  if (request.hessian == HessianMode::Commuting) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) out.hessian(i, j) = out.hessian(j, i);
    }
  }
  return out;
}

std::vector<double> run_evaluations(const qnet::NetworkSpec& net, std::span<const double> x,
                                    const Expansion& ex, EvalCounter& counter) {
  std::vector<double> g(ex.evaluations.size());
  for (std::size_t e = 0; e < g.size(); ++e) g[e] = qnet::evaluate_shifted(net, x, ex.evaluations[e]);
  counter.add(g.size());
  return g;
}

}  // namespace

ShiftPlan first_derivative_plan(std::size_t gate_id, double s) {
  require_shift(s);
  ShiftPlan p;
  p.evaluations = {{{{gate_id, s}}, 1.0}, {{{gate_id, -s}}, -1.0}};
  p.denominator = 2.0 * std::sin(s);
  return p;
}

ShiftPlan mixed_derivative_plan(std::size_t gate_a, std::size_t gate_b, double s) {
  require_shift(s);
  if (gate_a == gate_b) throw std::invalid_argument("mixed derivative: gates must differ");
  ShiftPlan p;
  p.evaluations = {{{{gate_a, s}, {gate_b, s}}, 1.0},
                   {{{gate_a, -s}, {gate_b, s}}, -1.0},
                   {{{gate_a, s}, {gate_b, -s}}, -1.0},
                   {{{gate_a, -s}, {gate_b, -s}}, 1.0}};
  p.denominator = 4.0 * std::sin(s) * std::sin(s);
  return p;
}

ShiftPlan second_same_plan(std::size_t gate_id, SameSiteVariant variant) {
  ShiftPlan p;
  if (variant == SameSiteVariant::TwoPoint) {
    p.evaluations = {{{{gate_id, kPi}}, 1.0}, {{}, -1.0}};
  } else {
    p.evaluations = {{{{gate_id, kHalfPi}}, 1.0}, {{}, -2.0}, {{{gate_id, -kHalfPi}}, 1.0}};
  }
  p.denominator = 2.0;
  return p;
}

ShiftPlan order_d_plan(std::size_t gate_id, int order) {
  if (order < 2) throw std::invalid_argument("order-d rule: order must be >= 2");
  const int d = order;
  ShiftPlan p;
  p.denominator = std::pow(2.0 * std::sin(kPi / d), d);
  p.evaluations.push_back({{{gate_id, kPi}}, 1.0 + ((d % 2 == 0) ? 1.0 : -1.0)});
  for (int i = 1; i <= d - 1; ++i) {
    const double sign = ((i + d) % 2 == 0) ? 1.0 : -1.0;
    p.evaluations.push_back({{{gate_id, 2.0 * kPi * i / d - kPi}}, sign * binomial(d, i)});
  }
  return p;
}

ShiftPlan order_d_unreduced_plan(std::size_t gate_id, int order) {
  if (order < 2) throw std::invalid_argument("order-d rule: order must be >= 2");
  const int d = order;
  ShiftPlan p;
  p.denominator = std::pow(2.0 * std::sin(kPi / d), d);
  for (int i = 0; i <= d; ++i) {
    const double sign = ((i + d) % 2 == 0) ? 1.0 : -1.0;
    p.evaluations.push_back({{{gate_id, 2.0 * kPi * i / d - kPi}}, sign * binomial(d, i)});
  }
  return p;
}

double run_plan(const qnet::NetworkSpec& net, std::span<const double> x, const ShiftPlan& plan,
                EvalCounter& counter) {
  double acc = 0.0;
  for (const auto& [shifts, w] : plan.evaluations) acc += w * qnet::evaluate_shifted(net, x, shifts);
  counter.add(plan.evaluations.size());
  return acc / plan.denominator;
}

double angle_derivative(const qnet::NetworkSpec& net, std::span<const double> x,
                        std::size_t gate_id, double s, EvalCounter& counter) {
  return run_plan(net, x, first_derivative_plan(gate_id, s), counter);
}

SameSiteResult angle_second_derivative_same(const qnet::NetworkSpec& net,
                                            std::span<const double> x, std::size_t gate_id,
                                            SameSiteVariant variant, EvalCounter& counter) {
  const ShiftPlan plan = second_same_plan(gate_id, variant);
  std::vector<double> g;
  for (const auto& [shifts, w] : plan.evaluations) {
    (void)w;
    g.push_back(qnet::evaluate_shifted(net, x, shifts));
  }
  counter.add(g.size());
  SameSiteResult r;
  if (variant == SameSiteVariant::TwoPoint) {
    r.second = (g[0] - g[1]) / 2.0;
  } else {
    r.second = (g[0] - 2.0 * g[1] + g[2]) / 2.0;
    r.first = (g[0] - g[2]) / 2.0;
    r.has_first = true;
  }
  return r;
}

double angle_mixed_derivative(const qnet::NetworkSpec& net, std::span<const double> x,
                              std::size_t gate_a, std::size_t gate_b, double s,
                              EvalCounter& counter) {
  return run_plan(net, x, mixed_derivative_plan(gate_a, gate_b, s), counter);
}

double angle_derivative_order_d(const qnet::NetworkSpec& net, std::span<const double> x,
                                std::size_t gate_id, int order, EvalCounter& counter) {
  return run_plan(net, x, order_d_plan(gate_id, order), counter);
}

double angle_derivative_order_d_unreduced(const qnet::NetworkSpec& net,
                                          std::span<const double> x, std::size_t gate_id,
                                          int order, EvalCounter& counter) {
  return run_plan(net, x, order_d_unreduced_plan(gate_id, order), counter);
}

InputDerivatives shift_derivatives(const qnet::NetworkSpec& net, std::span<const double> x,
                                   const DerivativeRequest& request, EvalCounter& counter) {
  const Expansion ex = build_expansion(net, x, request);
  const std::vector<double> g = run_evaluations(net, x, ex, counter);
  return assemble(net, x, ex, g, request);
}

std::vector<double> spatial_gradient(const qnet::NetworkSpec& net, std::span<const double> x,
                                     EvalCounter& counter) {
  DerivativeRequest req;
  req.value = false;
  for (std::size_t i = 0; i < net.d_in; ++i) req.gradient.push_back(i);
  return shift_derivatives(net, x, req, counter).gradient;
}

Matrix spatial_hessian(const qnet::NetworkSpec& net, std::span<const double> x, bool commuting,
                       EvalCounter& counter) {
  DerivativeRequest req;
  req.value = false;
  req.hessian = commuting ? HessianMode::Commuting : HessianMode::Full;
  for (std::size_t i = 0; i < net.d_in; ++i) req.hessian_coords.push_back(i);
  return shift_derivatives(net, x, req, counter).hessian;
}

double shift_accumulate(const qnet::NetworkSpec& net, const SampleObjective& objective,
                        std::span<double> grad, EvalCounter& counter) {
  const std::span<const double> x = objective.point;
  const std::size_t d = net.d_in;
  const std::size_t n_theta = net.parameter_count();
  if (grad.size() != n_theta) throw std::invalid_argument("shift_accumulate: gradient size");
  const Expansion ex = build_expansion(net, x, objective.request);
  const std::vector<double> g = run_evaluations(net, x, ex, counter);
  const InputDerivatives derivs = assemble(net, x, ex, g, objective.request);

  InputDerivatives sens = InputDerivatives::zeros(d);
  const double loss = objective.loss(derivs, sens);
  std::vector<double> s_q(1 + d + d * d, 0.0);
  s_q[0] = sens.value;
  for (std::size_t i = 0; i < d; ++i) s_q[1 + i] = sens.gradient[i];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = sens.hessian(i, j);
      // Mirrored entries were read from the computed upper triangle.
      if (objective.request.hessian == HessianMode::Commuting && j < i) s = 0.0;
      if (objective.request.hessian == HessianMode::Commuting && j > i) s += sens.hessian(j, i);
      s_q[1 + d + i * d + j] = s;
    }
  }

  const auto sites = qnet::angle_registry(net);
  // Per-evaluation weight W_e and the explicit dependence of the weights on
  // Theta through dangle/dx_i = 2 gamma_i.
  std::vector<double> w_e(ex.evaluations.size(), 0.0);
  for (const auto& t : ex.terms) {
    const double s = s_q[t.quantity];
    if (s == 0.0) continue;
    double p[2] = {1.0, 1.0};
    for (int k = 0; k < t.n_partials; ++k) {
      p[k] = qnet::angle_partial(net, sites[t.partials[k].site], x, t.partials[k].coord);
    }
    w_e[t.eval] += s * t.coef * p[0] * p[1];
    for (int k = 0; k < t.n_partials; ++k) {
      const long idx = partial_theta_index(net, sites[t.partials[k].site], t.partials[k].coord);
      if (idx < 0) continue;
      grad[static_cast<std::size_t>(idx)] += s * t.coef * 2.0 * p[1 - k] * g[t.eval];
    }
  }

  // dg_e/dTheta_k by a pi/2 shift on the site carrying Theta_k.
  for (std::size_t l = 0; l < net.layers; ++l) {
    for (std::size_t qb = 0; qb < net.n_qubits; ++qb) {
      const std::size_t block = (l * net.n_qubits + qb) * (d + 2);
      const std::size_t rz = qnet::uat_rz_site_id(net, l, qb);
      const std::size_t ry = qnet::uat_ry_site_id(net, l, qb);
      for (std::size_t k = 0; k < d + 2; ++k) {
        const std::size_t site = (k == 0) ? ry : rz;
        const double chain = (k == 0) ? 2.0 : (k == d + 1 ? 2.0 : 2.0 * x[k - 1]);
        double acc = 0.0;
        for (std::size_t e = 0; e < ex.evaluations.size(); ++e) {
          qnet::ShiftMap plus = ex.evaluations[e];
          qnet::ShiftMap minus = ex.evaluations[e];
          plus[site] += kHalfPi;
          minus[site] -= kHalfPi;
          const double dg = 0.5 * (qnet::evaluate_shifted(net, x, plus) -
                                   qnet::evaluate_shifted(net, x, minus));
          acc += w_e[e] * dg;
        }
        counter.add(2 * ex.evaluations.size());
        grad[block + k] += chain * acc;
      }
    }
  }
  return loss;
}

double theta_gradient(const qnet::NetworkSpec& net, std::span<const SampleObjective> batch,
                      std::vector<double>& grad, EvalCounter& counter) {
  if (batch.empty()) throw std::invalid_argument("theta_gradient: empty batch");
  grad.assign(net.parameter_count(), 0.0);
  double loss = 0.0;
  for (const auto& obj : batch) loss += shift_accumulate(net, obj, grad, counter);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : grad) v *= inv;
  return loss * inv;
}

std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x, double h) {
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    out[i] = (fp - fm) / (2.0 * h);
  }
  return out;
}

Matrix fd_hessian(const ScalarField& f, std::span<const double> x, double h) {
  const std::size_t d = x.size();
  std::vector<double> p(x.begin(), x.end());
  Matrix out(d, d);
  const double f0 = f(p);
  for (std::size_t i = 0; i < d; ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    out(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (std::size_t j = 0; j < i; ++j) {
      auto at = [&](double si, double sj) {
        p[i] = x[i] + si * h;
        p[j] = x[j] + sj * h;
        const double v = f(p);
        p[i] = x[i];
        p[j] = x[j];
        return v;
      };
      const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace qpinn::qdiff
