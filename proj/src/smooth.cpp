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

#include "qpinn/smooth.hpp"

#include <cmath>
#include <stdexcept>

namespace qpinn::smooth {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> offset(std::span<const double> x, const std::vector<double>& delta,
                           double sign) {
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += sign * delta[i];
  return p;
}

DerivativeRequest everything(std::size_t dim) {
  DerivativeRequest r;
  r.value = true;
  r.hessian = HessianMode::Full;
  for (std::size_t i = 0; i < dim; ++i) {
    r.gradient.push_back(i);
    r.hessian_coords.push_back(i);
  }
  return r;
}

}  // namespace

void validate(const SmoothingConfig& cfg) {
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("smoothing: sigma must be > 0");
  if (cfg.K == 0) throw std::invalid_argument("smoothing: K must be >= 1");
  if (cfg.antithetic && cfg.K % 2 != 0) {
    throw std::invalid_argument("smoothing: K must be even with antithetic pairing");
  }
}

Stencil build_stencil(std::span<const double> x, const DerivativeRequest& request,
                      const SmoothingConfig& cfg, RngStream& rng) {
  validate(cfg);
  const std::size_t d = x.size();
  Stencil st;
  st.dim = d;
  st.draws = cfg.antithetic ? cfg.K / 2 : cfg.K;
  const std::size_t nq = st.quantity_count();
  const double s2 = cfg.sigma * cfg.sigma;
  const double s4 = s2 * s2;
  const double inv = 1.0 / static_cast<double>(st.draws);

  std::vector<bool> on_hess(d, false);
  const bool want_hess = request.hessian != HessianMode::None && !request.hessian_coords.empty();
  if (want_hess) {
    for (std::size_t i : request.hessian_coords) {
      if (i >= d) throw std::out_of_range("smoothing: hessian coordinate out of range");
      on_hess[i] = true;
    }
  }
  auto hess_weight = [&](const std::vector<double>& delta, std::size_t i, std::size_t j) {
    if (!on_hess[i] || !on_hess[j]) return 0.0;
    if (request.hessian == HessianMode::Diagonal && i != j) return 0.0;
    return delta[i] * delta[j] - (i == j ? s2 : 0.0);
  };

  std::vector<double> delta(d);
  for (std::size_t r = 0; r < st.draws; ++r) {
    for (auto& v : delta) v = cfg.sigma * rng.normal();
    if (cfg.antithetic) {
      std::vector<double> wp(nq, 0.0), wm(nq, 0.0), w0(nq, 0.0);
      wp[0] = wm[0] = 0.5 * inv;
      for (std::size_t i = 0; i < d; ++i) {
        wp[1 + i] = delta[i] / (2.0 * s2) * inv;
        wm[1 + i] = -wp[1 + i];
      }
      if (want_hess) {
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            const double w = hess_weight(delta, i, j) / (2.0 * s4) * inv;
            wp[1 + d + i * d + j] = w;
            wm[1 + d + i * d + j] = w;
            w0[1 + d + i * d + j] = -2.0 * w;
          }
        }
      }
      st.points.push_back(offset(x, delta, 1.0));
      st.weights.push_back(std::move(wp));
      st.draw_of.push_back(r);
      st.points.push_back(offset(x, delta, -1.0));
      st.weights.push_back(std::move(wm));
      st.draw_of.push_back(r);
      if (want_hess) {
        st.points.emplace_back(x.begin(), x.end());
        st.weights.push_back(std::move(w0));
        st.draw_of.push_back(r);
      }
    } else {
      std::vector<double> w(nq, 0.0);
      w[0] = inv;
      for (std::size_t i = 0; i < d; ++i) w[1 + i] = delta[i] / s2 * inv;
      if (want_hess) {
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) w[1 + d + i * d + j] = hess_weight(delta, i, j) / s4 * inv;
        }
      }
      st.points.push_back(offset(x, delta, 1.0));
      st.weights.push_back(std::move(w));
      st.draw_of.push_back(r);
    }
  }
  return st;
}

StencilResult apply_stencil(const Stencil& st, const Evaluator& u) {
  const std::size_t d = st.dim;
  const std::size_t nq = st.quantity_count();
  StencilResult res;
  res.u_values.resize(st.points.size());
  for (std::size_t p = 0; p < st.points.size(); ++p) res.u_values[p] = u(st.points[p]);

  // Per-draw estimates (weights carry 1/draws, so rescale by draws).
  std::vector<double> mean(nq, 0.0), sq(nq, 0.0), cur(nq, 0.0);
  const double nd = static_cast<double>(st.draws);
  std::size_t p = 0;
  while (p < st.points.size()) {
    const std::size_t r = st.draw_of[p];
    std::fill(cur.begin(), cur.end(), 0.0);
    for (; p < st.points.size() && st.draw_of[p] == r; ++p) {
      for (std::size_t q = 0; q < nq; ++q) cur[q] += st.weights[p][q] * res.u_values[p] * nd;
    }
    for (std::size_t q = 0; q < nq; ++q) {
      mean[q] += cur[q];
      sq[q] += cur[q] * cur[q];
    }
  }
  std::vector<double> se(nq, 0.0);
  for (std::size_t q = 0; q < nq; ++q) {
    mean[q] /= nd;
    const double var = nd > 1 ? std::max(0.0, (sq[q] - nd * mean[q] * mean[q]) / (nd - 1.0)) : 0.0;
    se[q] = std::sqrt(var / nd);
  }
  auto unpack = [&](const std::vector<double>& v) {
    InputDerivatives o = InputDerivatives::zeros(d);
    o.value = v[0];
    for (std::size_t i = 0; i < d; ++i) o.gradient[i] = v[1 + i];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) o.hessian(i, j) = v[1 + d + i * d + j];
    }
    return o;
  };
  res.mean = unpack(mean);
  res.std_error = unpack(se);
  return res;
}

Estimate smoothed_value(const Evaluator& u, std::span<const double> x,
                        const SmoothingConfig& cfg, RngStream& rng) {
  DerivativeRequest r;
  const auto res = apply_stencil(build_stencil(x, r, cfg, rng), u);
  return {res.mean.value, res.std_error.value};
}

VectorEstimate smoothed_gradient(const Evaluator& u, std::span<const double> x,
                                 const SmoothingConfig& cfg, RngStream& rng) {
  DerivativeRequest r;
  for (std::size_t i = 0; i < x.size(); ++i) r.gradient.push_back(i);
  const auto res = apply_stencil(build_stencil(x, r, cfg, rng), u);
  return {res.mean.gradient, res.std_error.gradient};
}

MatrixEstimate smoothed_hessian(const Evaluator& u, std::span<const double> x,
                                const SmoothingConfig& cfg, RngStream& rng) {
  const auto res = apply_stencil(build_stencil(x, everything(x.size()), cfg, rng), u);
  return {res.mean.hessian, res.std_error.hessian};
}

Estimate smoothed_laplacian(const Evaluator& u, std::span<const double> x,
                            const SmoothingConfig& cfg, RngStream& rng) {
  // The trace is its own linear functional, so its standard error comes from
  // a stencil whose Hessian block is collapsed onto entry (0, 0).
  DerivativeRequest r = everything(x.size());
  Stencil st = build_stencil(x, r, cfg, rng);
  const std::size_t d = st.dim;
  for (auto& w : st.weights) {
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) tr += w[1 + d + i * d + i];
    for (std::size_t q = 1 + d; q < w.size(); ++q) w[q] = 0.0;
    w[1 + d] = tr;
  }
  const auto res = apply_stencil(st, u);
  return {res.mean.hessian(0, 0), res.std_error.hessian(0, 0)};
}

VectorEstimate smoothed_time_derivative(const Evaluator& u, double t, std::span<const double> x,
                                        const SmoothingConfig& cfg, RngStream& rng) {
  std::vector<double> z;
  z.push_back(t);
  z.insert(z.end(), x.begin(), x.end());
  return smoothed_gradient(u, z, cfg, rng);
}

double lipschitz_diagnostic(double u_max, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lipschitz_diagnostic: sigma must be > 0");
  if (u_max < 0.0) throw std::invalid_argument("lipschitz_diagnostic: u_max must be >= 0");
  return u_max / sigma * std::sqrt(2.0 / kPi);
}

}  // namespace qpinn::smooth
