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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "jet.hpp"
#include "qpinn/qdiff.hpp"

namespace qpinn::qdiff {
namespace {

using Complex = std::complex<double>;

struct Plan {
  std::vector<std::size_t> coords;
  int order = 0;
};

Plan make_plan(const qnet::NetworkSpec& net, const DerivativeRequest& request) {
  Plan p;
  p.coords = request.gradient;
  if (request.hessian != HessianMode::None) {
    p.coords.insert(p.coords.end(), request.hessian_coords.begin(), request.hessian_coords.end());
  }
  std::sort(p.coords.begin(), p.coords.end());
  p.coords.erase(std::unique(p.coords.begin(), p.coords.end()), p.coords.end());
  for (std::size_t c : p.coords) {
    if (c >= net.d_in) throw std::out_of_range("DerivativeRequest: coordinate out of range");
  }
  if (p.coords.size() > 4) {
    throw std::invalid_argument("fast mode: at most 4 differentiated coordinates");
  }
  if (request.hessian != HessianMode::None && !request.hessian_coords.empty()) {
    p.order = 2;
  } else if (!p.coords.empty()) {
    p.order = 1;
  }
  return p;
}

template <std::size_t D, int Ord>
class JetSimulator {
 public:
  using CJ = jet::Jet<Complex, D, Ord>;
  using RJ = jet::Jet<double, D, Ord>;
  static constexpr std::size_t M = CJ::M;

  JetSimulator(const qnet::NetworkSpec& net, std::span<const double> x,
               const std::vector<std::size_t>& coords)
      : net_(net), x_(x.begin(), x.end()), layout_(qnet::circuit_layout(net)) {
    for (std::size_t k = 0; k < D; ++k) coords_[k] = coords[k];
    build_angles();
  }

  // Output jet of <C>.
  RJ forward() {
    const std::size_t dim = std::size_t{1} << net_.n_qubits;
    psi_.assign(dim, CJ{});
    psi_[0].c[0] = 1.0;
    for (const auto& g : layout_) apply(psi_, g, false);
    apply_cost(psi_, chi_);
    RJ y;
    for (std::size_t b = 0; b < dim; ++b) {
      const CJ t = jet::mul_conj(chi_[b], psi_[b]);
      for (std::size_t k = 0; k < M; ++k) y.c[k] += t.c[k].real();
    }
    return y;
  }

  // After forward(): adds d(loss)/dTheta given d(loss)/d(output coefficients).
  void backward(const std::array<double, M>& sens, std::span<double> grad) {
    const std::size_t d = net_.d_in;
    for (std::size_t gi = layout_.size(); gi-- > 0;) {
      const auto& g = layout_[gi];
      if (g.kind == qsim::GateKind::DenseUnitary) break;
      if (g.site_id >= 0 && g.site_id < static_cast<long>(net_.n_qubits)) break;  // encoding
      if (g.kind == qsim::GateKind::RZ || g.kind == qsim::GateKind::RY) {
        const CJ z = generator_overlap(g);
        // d(loss)/d(angle coefficient c) = sum_c' sens_c' [2 Re(e_c z)]_c'
        std::array<double, 1 + D> dl{};
        for (std::size_t c = 0; c < (Ord >= 1 ? 1 + D : 1); ++c) {
          RJ e;
          e.c[c] = 1.0;
          const CJ ez = jet::mul(e, z);
          double acc = 0.0;
          for (std::size_t k = 0; k < M; ++k) acc += sens[k] * 2.0 * ez.c[k].real();
          dl[c] = acc;
        }
        const auto site = static_cast<std::size_t>(g.site_id);
        const std::size_t flat = (site - net_.n_qubits) / 2;  // layer * n + qubit
        const std::size_t block = flat * (d + 2);
        if (g.kind == qsim::GateKind::RY) {
          grad[block] += 2.0 * dl[0];
        } else {
          grad[block + d + 1] += 2.0 * dl[0];
          for (std::size_t i = 0; i < d; ++i) grad[block + 1 + i] += 2.0 * x_[i] * dl[0];
          if constexpr (Ord >= 1) {
            for (std::size_t k = 0; k < D; ++k) grad[block + 1 + coords_[k]] += 2.0 * dl[1 + k];
          }
        }
      }
      apply(psi_, g, true);
      apply(chi_, g, true);
    }
  }

 private:
  void build_angles() {
    const auto sites = qnet::angle_registry(net_);
    angles_.assign(sites.size(), RJ{});
    for (const auto& s : sites) {
      RJ a;
      a.c[0] = qnet::angle_value(net_, s, x_);
      if constexpr (Ord >= 1) {
        for (std::size_t k = 0; k < D; ++k) a.c[1 + k] = qnet::angle_partial(net_, s, x_, coords_[k]);
      }
      if constexpr (Ord >= 2) {
        for (std::size_t k = 0; k < D; ++k) {
          a.c[RJ::pair(k, k)] = 0.5 * qnet::angle_second_partial(net_, s, x_, coords_[k], coords_[k]);
        }
      }
      angles_[s.gate_id] = a;
    }
  }

  void apply(std::vector<CJ>& v, const qnet::LayoutGate& g, bool inverse) const {
    const std::size_t dim = v.size();
    switch (g.kind) {
      case qsim::GateKind::CNOT: {
        const std::size_t cm = std::size_t{1} << g.control;
        const std::size_t tm = std::size_t{1} << g.qubit;
        for (std::size_t b = 0; b < dim; ++b) {
          if ((b & cm) && !(b & tm)) std::swap(v[b], v[b | tm]);
        }
        break;
      }
      case qsim::GateKind::DenseUnitary:
        apply_dense(v, inverse);
        break;
      case qsim::GateKind::RZ:
      case qsim::GateKind::RY: {
        RJ half = angles_[static_cast<std::size_t>(g.site_id)];
        half.scale(inverse ? -0.5 : 0.5);
        const RJ c = jet::cos_jet(half);
        const RJ s = jet::sin_jet(half);
        const std::size_t mask = std::size_t{1} << g.qubit;
        if (g.kind == qsim::GateKind::RZ) {
          CJ e0, e1;  // exp(-i h), exp(+i h)
          for (std::size_t k = 0; k < M; ++k) {
            e0.c[k] = Complex(c.c[k], -s.c[k]);
            e1.c[k] = Complex(c.c[k], s.c[k]);
          }
          for (std::size_t b = 0; b < dim; ++b) v[b] = jet::mul((b & mask) ? e1 : e0, v[b]);
        } else {
          for (std::size_t b = 0; b < dim; ++b) {
            if (b & mask) continue;
            const CJ a0 = v[b];
            const CJ a1 = v[b | mask];
            v[b] = jet::mul(c, a0) - jet::mul(s, a1);
            v[b | mask] = jet::mul(s, a0) + jet::mul(c, a1);
          }
        }
        break;
      }
      default:
        throw std::logic_error("fast mode: unsupported gate");
    }
  }

  void apply_dense(std::vector<CJ>& v, bool inverse) const {
    const ComplexMatrix& u = *net_.haar;
    const std::size_t dim = v.size();
    std::vector<CJ> out(dim);
    for (std::size_t col = 0; col < dim; ++col) {
      const CJ& a = v[col];
      bool nonzero = false;
      for (std::size_t k = 0; k < M && !nonzero; ++k) nonzero = a.c[k] != Complex{};
      if (!nonzero) continue;
      for (std::size_t row = 0; row < dim; ++row) {
        const Complex m = inverse ? std::conj(u(col, row)) : u(row, col);
        for (std::size_t k = 0; k < M; ++k) out[row].c[k] += m * a.c[k];
      }
    }
    v.swap(out);
  }

  void apply_cost(const std::vector<CJ>& in, std::vector<CJ>& out) const {
    const std::size_t dim = in.size();
    out.assign(dim, CJ{});
    for (const auto& m : net_.cost.masks()) {
      Complex phase = m.coefficient;
      for (int k = 0; k < (m.y_count & 3); ++k) phase *= Complex(0.0, 1.0);
      for (std::size_t b = 0; b < dim; ++b) {
        const Complex w = (std::popcount(b & m.z_mask) & 1) ? -phase : phase;
        CJ& o = out[b ^ m.x_mask];
        for (std::size_t k = 0; k < M; ++k) o.c[k] += w * in[b].c[k];
      }
    }
  }

  // -(i/2) <chi| G |psi> as a jet.
  CJ generator_overlap(const qnet::LayoutGate& g) const {
    const std::size_t dim = psi_.size();
    const std::size_t mask = std::size_t{1} << g.qubit;
    CJ acc;
    if (g.kind == qsim::GateKind::RZ) {
      for (std::size_t b = 0; b < dim; ++b) {
        const CJ t = jet::mul_conj(psi_[b], chi_[b]);
        if (b & mask) acc -= t; else acc += t;
      }
    } else {
      // Y|0> = i|1>, Y|1> = -i|0>
      CJ s;
      for (std::size_t b = 0; b < dim; ++b) {
        if (b & mask) continue;
        s += jet::mul_conj(psi_[b], chi_[b | mask]);
        s -= jet::mul_conj(psi_[b | mask], chi_[b]);
      }
      s.scale(Complex(0.0, 1.0));
      acc = s;
    }
    acc.scale(Complex(0.0, -0.5));
    return acc;
  }

  const qnet::NetworkSpec& net_;
  std::vector<double> x_;
  std::vector<qnet::LayoutGate> layout_;
  std::array<std::size_t, D> coords_{};
  std::vector<RJ> angles_;
  std::vector<CJ> psi_;
  std::vector<CJ> chi_;
};

template <std::size_t D, int Ord>
InputDerivatives to_derivatives(const jet::Jet<double, D, Ord>& y, const Plan& plan,
                                const DerivativeRequest& request, std::size_t dim) {
  InputDerivatives out = InputDerivatives::zeros(dim);
  out.value = y.c[0];
  if constexpr (Ord >= 1) {
    for (std::size_t k = 0; k < D; ++k) {
      const std::size_t i = plan.coords[k];
      if (std::find(request.gradient.begin(), request.gradient.end(), i) != request.gradient.end() ||
          (request.hessian != HessianMode::None &&
           std::find(request.hessian_coords.begin(), request.hessian_coords.end(), i) !=
               request.hessian_coords.end())) {
        out.gradient[i] = y.c[1 + k];
      }
    }
  }
  if constexpr (Ord >= 2) {
    const auto& hc = request.hessian_coords;
    auto on = [&](std::size_t i) { return std::find(hc.begin(), hc.end(), i) != hc.end(); };
    for (std::size_t a = 0; a < D; ++a) {
      for (std::size_t b = 0; b < D; ++b) {
        const std::size_t i = plan.coords[a];
        const std::size_t j = plan.coords[b];
        if (!on(i) || !on(j)) continue;
        if (request.hessian == HessianMode::Diagonal && i != j) continue;
        const double v = y.c[jet::Jet<double, D, Ord>::pair(a, b)];
        out.hessian(i, j) = (a == b) ? 2.0 * v : v;
      }
    }
  }
  return out;
}

template <std::size_t D, int Ord>
std::array<double, jet::size(D, Ord)> to_sensitivity(const InputDerivatives& sens,
                                                     const Plan& plan) {
  std::array<double, jet::size(D, Ord)> s{};
  s[0] = sens.value;
  if constexpr (Ord >= 1) {
    for (std::size_t k = 0; k < D; ++k) s[1 + k] = sens.gradient[plan.coords[k]];
  }
  if constexpr (Ord >= 2) {
    for (std::size_t a = 0; a < D; ++a) {
      for (std::size_t b = a; b < D; ++b) {
        const std::size_t i = plan.coords[a];
        const std::size_t j = plan.coords[b];
        const std::size_t p = jet::Jet<double, D, Ord>::pair(a, b);
        s[p] = (a == b) ? 2.0 * sens.hessian(i, i) : sens.hessian(i, j) + sens.hessian(j, i);
      }
    }
  }
  return s;
}

template <std::size_t D, int Ord>
double run(const qnet::NetworkSpec& net, std::span<const double> x, const Plan& plan,
           const DerivativeRequest& request, const SampleLoss* loss, std::span<double> grad,
           InputDerivatives* out) {
  JetSimulator<D, Ord> sim(net, x, plan.coords);
  const auto y = sim.forward();
  InputDerivatives derivs = to_derivatives<D, Ord>(y, plan, request, net.d_in);
  if (!loss) {
    *out = std::move(derivs);
    return 0.0;
  }
  InputDerivatives sens = InputDerivatives::zeros(net.d_in);
  const double value = (*loss)(derivs, sens);
  sim.backward(to_sensitivity<D, Ord>(sens, plan), grad);
  return value;
}

template <int Ord>
double dispatch_d(const qnet::NetworkSpec& net, std::span<const double> x, const Plan& plan,
                  const DerivativeRequest& request, const SampleLoss* loss,
                  std::span<double> grad, InputDerivatives* out) {
  switch (plan.coords.size()) {
    case 0: return run<0, 0>(net, x, plan, request, loss, grad, out);
    case 1: return run<1, Ord>(net, x, plan, request, loss, grad, out);
    case 2: return run<2, Ord>(net, x, plan, request, loss, grad, out);
    case 3: return run<3, Ord>(net, x, plan, request, loss, grad, out);
    default: return run<4, Ord>(net, x, plan, request, loss, grad, out);
  }
}

double dispatch(const qnet::NetworkSpec& net, std::span<const double> x,
                const DerivativeRequest& request, const SampleLoss* loss, std::span<double> grad,
                InputDerivatives* out) {
  if (x.size() != net.d_in) throw std::invalid_argument("fast mode: input dimension mismatch");
  const Plan plan = make_plan(net, request);
  if (plan.order == 2) return dispatch_d<2>(net, x, plan, request, loss, grad, out);
  if (plan.order == 1) return dispatch_d<1>(net, x, plan, request, loss, grad, out);
  return run<0, 0>(net, x, plan, request, loss, grad, out);
}

}  // namespace

InputDerivatives fast_derivatives(const qnet::NetworkSpec& net, std::span<const double> x,
                                  const DerivativeRequest& request) {
  InputDerivatives out;
  dispatch(net, x, request, nullptr, {}, &out);
  return out;
}

double fast_accumulate(const qnet::NetworkSpec& net, const SampleObjective& objective,
                       std::span<double> grad) {
  if (grad.size() != net.parameter_count()) {
    throw std::invalid_argument("fast_accumulate: gradient size");
  }
  return dispatch(net, objective.point, objective.request, &objective.loss, grad, nullptr);
}

}  // namespace qpinn::qdiff
