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

#include "qpinn/pde.hpp"

#include <cmath>
#include <stdexcept>

namespace qpinn::pde {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerate = 1e-12;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_dim(std::span<const double> z, std::size_t n, const char* what) {
  if (z.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " coordinates, got " + std::to_string(z.size()));
  }
}

}  // namespace

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "poisson") return ProblemKind::Poisson;
  if (name == "p_laplace") return ProblemKind::PLaplace;
  if (name == "heat") return ProblemKind::Heat;
  if (name == "hjb") return ProblemKind::Hjb;
  throw std::invalid_argument("unknown problem kind '" + name + "'");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Poisson: return "poisson";
    case ProblemKind::PLaplace: return "p_laplace";
    case ProblemKind::Heat: return "heat";
    case ProblemKind::Hjb: return "hjb";
  }
  return "?";
}

HjbMode parse_hjb_mode(const std::string& name) {
  if (name == "standard") return HjbMode::Standard;
  if (name == "literal") return HjbMode::Literal;
  throw std::invalid_argument("unknown hjb mode '" + name + "'");
}

std::string to_string(HjbMode mode) {
  return mode == HjbMode::Standard ? "standard" : "literal";
}

Formulation parse_formulation(const std::string& name) {
  if (name == "standard") return Formulation::Standard;
  if (name == "variational") return Formulation::Variational;
  if (name == "standard_smoothed") return Formulation::StandardSmoothed;
  if (name == "variational_smoothed") return Formulation::VariationalSmoothed;
  throw std::invalid_argument("unknown loss formulation '" + name + "'");
}

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::Standard: return "standard";
    case Formulation::Variational: return "variational";
    case Formulation::StandardSmoothed: return "standard_smoothed";
    case Formulation::VariationalSmoothed: return "variational_smoothed";
  }
  return "?";
}

bool is_smoothed(Formulation f) {
  return f == Formulation::StandardSmoothed || f == Formulation::VariationalSmoothed;
}

bool is_variational(Formulation f) {
  return f == Formulation::Variational || f == Formulation::VariationalSmoothed;
}

double DerivativeBundle::laplacian() const {
  if (!hessian) throw std::logic_error("DerivativeBundle: Hessian missing");
  double s = 0.0;
  for (std::size_t i = 0; i < hessian->rows(); ++i) s += (*hessian)(i, i);
  return s;
}

double p_laplace_residual(const DerivativeBundle& b, double f_val, double p, bool* degenerate) {
  if (!(p > 1.0)) throw std::invalid_argument("p_laplace_residual: p must be > 1");
  if (degenerate) *degenerate = false;
  const double lap = b.laplacian();
  if (p == 2.0) return lap + f_val;
  const double g2 = norm2(b.gradient);
  const double g = std::sqrt(g2);
  if (g < kDegenerate && p < 4.0) {
    if (degenerate) *degenerate = true;
    return std::pow(std::max(g, kDegenerate), p - 2.0) * lap + f_val;
  }
  const Matrix& h = *b.hessian;
  double mixed = 0.0;
  for (std::size_t i = 0; i < b.gradient.size(); ++i) {
    for (std::size_t j = 0; j < b.gradient.size(); ++j) {
      mixed += b.gradient[i] * b.gradient[j] * h(i, j);
    }
  }
  return std::pow(g, p - 4.0) * (g2 * lap + (p - 2.0) * mixed) + f_val;
}

double variational_density(const DerivativeBundle& b, double f_val, double p) {
  const double g = std::sqrt(norm2(b.gradient));
  return std::pow(g, p) / p - f_val * b.value;
}

double heat_residual(const DerivativeBundle& b) {
  if (!b.time_derivative) throw std::logic_error("heat_residual: time derivative missing");
  return b.laplacian() - *b.time_derivative;
}

double hjb_residual(const DerivativeBundle& b, double mu) {
  if (!b.time_derivative) throw std::logic_error("hjb_residual: time derivative missing");
  return *b.time_derivative + b.laplacian() - mu * norm2(b.gradient);
}

double hjb_terminal(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::log((1.0 + s) / 2.0);
}

McValue hjb_reference(double t, std::span<const double> x, std::size_t mc_samples,
                      RngStream& rng, HjbMode mode, double mu, double T) {
  return hjb_reference(t, x, mc_samples, rng, TerminalFn(hjb_terminal), mode, mu, T);
}

McValue hjb_reference(double t, std::span<const double> x, std::size_t mc_samples,
                      RngStream& rng, const TerminalFn& terminal, HjbMode mode, double mu,
                      double T) {
  if (mc_samples == 0) throw std::invalid_argument("hjb_reference: mc_samples must be >= 1");
  if (t > T) throw std::invalid_argument("hjb_reference: t must be <= T");
  const std::size_t d = x.size();
  const double scale = std::sqrt(2.0 * (T - t));
  std::vector<double> pt(d);
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < mc_samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) pt[i] = x[i] - scale * rng.normal();
    const double v = std::exp(-mu * terminal(pt));
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(mc_samples);
  const double m = sum / n;
  const double var = n > 1 ? std::max(0.0, (sq - n * m * m) / (n - 1.0)) : 0.0;
  const double se_m = std::sqrt(var / n);
  McValue out;
  out.mode = mode;
  if (mode == HjbMode::Standard) {
    out.value = -std::log(m) / mu;
    out.std_error = se_m / (std::abs(mu) * m);
  } else {
    const double c = std::pow(2.0 * kPi, 0.5 * static_cast<double>(d));
    out.value = -mu / c * std::log(c * m);
    out.std_error = std::abs(mu) / c * se_m / m;
  }
  return out;
}

double poisson_exact(double x, double y) {
  return std::cos(5.0 * x) * std::cos(y) + y / (1.0 + x) + 1.0;
}

double poisson_source(double x, double y) {
  const double q = 1.0 + x;
  return 26.0 * std::cos(y) * std::cos(5.0 * x) - 2.0 * y / (q * q * q);
}

DerivativeBundle poisson_exact_bundle(double x, double y) {
  const double c5 = std::cos(5.0 * x), s5 = std::sin(5.0 * x);
  const double cy = std::cos(y), sy = std::sin(y);
  const double q = 1.0 + x;
  DerivativeBundle b;
  b.value = poisson_exact(x, y);
  b.gradient = {-5.0 * s5 * cy - y / (q * q), -c5 * sy + 1.0 / q};
  Matrix h(2, 2);
  h(0, 0) = -25.0 * c5 * cy + 2.0 * y / (q * q * q);
  h(1, 1) = -c5 * cy;
  h(0, 1) = h(1, 0) = 5.0 * s5 * sy - 1.0 / (q * q);
  b.hessian = h;
  return b;
}

double heat_exact(double t, std::span<const double> x, double a) {
  const double d = static_cast<double>(x.size());
  double u = std::pow(d, 1.0 / d) * std::exp(-a * a * kPi * kPi * d * t);
  for (double xi : x) u *= std::sin(a * kPi * xi);
  return u;
}

DerivativeBundle heat_exact_bundle(double t, std::span<const double> x, double a) {
  const std::size_t d = x.size();
  const double dd = static_cast<double>(d);
  const double k = a * kPi;
  const double amp = std::pow(dd, 1.0 / dd) * std::exp(-k * k * dd * t);
  std::vector<double> s(d), c(d);
  for (std::size_t i = 0; i < d; ++i) {
    s[i] = std::sin(k * x[i]);
    c[i] = std::cos(k * x[i]);
  }
  auto prod_except = [&](std::size_t i, std::size_t j) {
    double p = amp;
    for (std::size_t m = 0; m < d; ++m) {
      if (m != i && m != j) p *= s[m];
    }
    return p;
  };
  DerivativeBundle b;
  b.value = prod_except(d, d);
  b.time_derivative = -k * k * dd * b.value;
  b.gradient.resize(d);
  Matrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    b.gradient[i] = k * c[i] * prod_except(i, i);
    h(i, i) = -k * k * b.value;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) h(i, j) = k * k * c[i] * c[j] * prod_except(i, j);
    }
  }
  b.hessian = h;
  return b;
}

double heat_lipschitz_lower_bound(std::size_t d, double a) {
  const double dd = static_cast<double>(d);
  const std::vector<double> half(d, 0.5);
  const double u0 = heat_exact(0.0, half, a);
  const double time_part = a * a * kPi * kPi * dd * u0;
  const double space_part = a * kPi * std::cos(a * kPi / 2.0) * std::pow(dd, 1.0 / dd) * dd *
                            std::pow(std::sin(a * kPi / 2.0), dd - 1.0);
  return std::sqrt(time_part * time_part + space_part * space_part);
}

PdeProblem PdeProblem::poisson() {
  PdeProblem p;
  p.kind = ProblemKind::Poisson;
  p.d = 2;
  p.p = 2.0;
  return p;
}

PdeProblem PdeProblem::p_laplace(double pv) {
  PdeProblem p;
  p.kind = ProblemKind::PLaplace;
  p.d = 2;
  p.p = pv;
  p.validate();
  return p;
}

PdeProblem PdeProblem::heat(std::size_t d) {
  PdeProblem p;
  p.kind = ProblemKind::Heat;
  p.d = d;
  p.T = 1.0;
  p.a = 0.25;
  return p;
}

PdeProblem PdeProblem::hjb(std::size_t d) {
  PdeProblem p;
  p.kind = ProblemKind::Hjb;
  p.d = d;
  p.T = 1.0;
  p.mu = 1.0;
  return p;
}

void PdeProblem::validate() const {
  if (d == 0) throw std::invalid_argument("problem: dimension must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("problem: p must be > 1");
  if (!(T > 0.0)) throw std::invalid_argument("problem: T must be > 0");
  if ((kind == ProblemKind::Poisson || kind == ProblemKind::PLaplace) && d != 2) {
    throw std::invalid_argument("problem: the Poisson/p-Laplace solution is defined for d = 2");
  }
  if (kind == ProblemKind::Poisson && p != 2.0) {
    throw std::invalid_argument("problem: poisson requires p = 2");
  }
}

std::string PdeProblem::name() const {
  switch (kind) {
    case ProblemKind::Poisson: return "poisson";
    case ProblemKind::PLaplace: return "p_laplace";
    case ProblemKind::Heat: return "heat_" + std::to_string(d) + "d";
    case ProblemKind::Hjb: return "hjb";
  }
  return "?";
}

double PdeProblem::source(std::span<const double> z) const {
  require_dim(z, input_dim(), "source");
  if (kind == ProblemKind::Poisson) return poisson_source(z[0], z[1]);
  if (kind == ProblemKind::PLaplace) {
    if (p == 2.0) return poisson_source(z[0], z[1]);
    // Manufactured so that the Poisson solution solves -Delta_p u = f.
    const DerivativeBundle b = poisson_exact_bundle(z[0], z[1]);
    return -p_laplace_residual(b, 0.0, p);
  }
  return 0.0;
}

double PdeProblem::boundary_value(std::span<const double> z) const {
  require_dim(z, input_dim(), "boundary_value");
  if (kind == ProblemKind::Hjb) return hjb_terminal(z.subspan(1));
  return exact(z);
}

double PdeProblem::exact(std::span<const double> z) const {
  require_dim(z, input_dim(), "exact");
  switch (kind) {
    case ProblemKind::Poisson:
    case ProblemKind::PLaplace:
      return poisson_exact(z[0], z[1]);
    case ProblemKind::Heat:
      return heat_exact(z[0], z.subspan(1), a);
    case ProblemKind::Hjb:
      break;
  }
  throw std::logic_error("exact: HJB has no closed-form solution; use hjb_reference");
}

DerivativeBundle PdeProblem::exact_bundle(std::span<const double> z) const {
  require_dim(z, input_dim(), "exact_bundle");
  if (kind == ProblemKind::Heat) return heat_exact_bundle(z[0], z.subspan(1), a);
  if (kind == ProblemKind::Hjb) throw std::logic_error("exact_bundle: not available for HJB");
  return poisson_exact_bundle(z[0], z[1]);
}

DerivativeRequest PdeProblem::interior_request(Formulation f) const {
  DerivativeRequest r;
  const std::size_t off = spatial_offset();
  std::vector<std::size_t> spatial;
  for (std::size_t i = 0; i < d; ++i) spatial.push_back(off + i);
  if (is_variational(f)) {
    if (kind != ProblemKind::Poisson && kind != ProblemKind::PLaplace) {
      throw std::invalid_argument("variational loss requires a poisson or p_laplace problem");
    }
    r.value = true;
    r.gradient = spatial;
    return r;
  }
  r.value = false;
  switch (kind) {
    case ProblemKind::Poisson:
      r.hessian = HessianMode::Diagonal;
      r.hessian_coords = spatial;
      break;
    case ProblemKind::PLaplace:
      if (p == 2.0) {
        r.hessian = HessianMode::Diagonal;
      } else {
        r.gradient = spatial;
        r.hessian = HessianMode::Commuting;
      }
      r.hessian_coords = spatial;
      break;
    case ProblemKind::Heat:
      r.gradient = {0};
      r.hessian = HessianMode::Diagonal;
      r.hessian_coords = spatial;
      break;
    case ProblemKind::Hjb:
      r.gradient = spatial;
      r.gradient.insert(r.gradient.begin(), 0);
      r.hessian = HessianMode::Diagonal;
      r.hessian_coords = spatial;
      break;
  }
  return r;
}

DerivativeBundle PdeProblem::to_bundle(const InputDerivatives& dv) const {
  const std::size_t off = spatial_offset();
  DerivativeBundle b;
  b.value = dv.value;
  b.gradient.assign(dv.gradient.begin() + static_cast<long>(off), dv.gradient.end());
  Matrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) h(i, j) = dv.hessian(off + i, off + j);
  }
  b.hessian = h;
  if (has_time()) b.time_derivative = dv.gradient[0];
  return b;
}

double PdeProblem::residual(const DerivativeBundle& b, std::span<const double> z,
                            bool* degenerate) const {
  if (degenerate) *degenerate = false;
  switch (kind) {
    case ProblemKind::Poisson:
      return b.laplacian() + source(z);
    case ProblemKind::PLaplace:
      return p_laplace_residual(b, source(z), p, degenerate);
    case ProblemKind::Heat:
      return heat_residual(b);
    case ProblemKind::Hjb:
      return hjb_residual(b, mu);
  }
  return 0.0;
}

double PdeProblem::residual_at(const InputDerivatives& dv, std::span<const double> z,
                               InputDerivatives* sens, bool* degenerate) const {
  if (degenerate) *degenerate = false;
  const std::size_t off = spatial_offset();
  const std::size_t dim = input_dim();
  if (dv.gradient.size() != dim || dv.hessian.rows() != dim) {
    throw std::invalid_argument("residual_at: derivative shape does not match the problem");
  }
  if (sens) *sens = InputDerivatives::zeros(dim);
  double lap = 0.0, g2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lap += dv.hessian(off + i, off + i);
    g2 += dv.gradient[off + i] * dv.gradient[off + i];
  }
  auto lap_sens = [&](double w) {
    if (!sens) return;
    for (std::size_t i = 0; i < d; ++i) sens->hessian(off + i, off + i) += w;
  };
  switch (kind) {
    case ProblemKind::Poisson:
      lap_sens(1.0);
      return lap + source(z);
    case ProblemKind::PLaplace: {
      const double f_val = source(z);
      if (p == 2.0) {
        lap_sens(1.0);
        return lap + f_val;
      }
      const double g = std::sqrt(g2);
      if (g < kDegenerate && p < 4.0) {
        if (degenerate) *degenerate = true;
        const double c = std::pow(kDegenerate, p - 2.0);
        lap_sens(c);
        return c * lap + f_val;
      }
      double mixed = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          mixed += dv.gradient[off + i] * dv.gradient[off + j] * dv.hessian(off + i, off + j);
        }
      }
      const double a_term = g2 * lap + (p - 2.0) * mixed;
      const double pref = std::pow(g, p - 4.0);
      if (sens) {
        // d(pref)/du_k = (p - 4) g^(p-6) u_k
        const double dpref = (p - 4.0) * std::pow(g, p - 6.0);
        for (std::size_t k = 0; k < d; ++k) {
          const double uk = dv.gradient[off + k];
          double hk = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            hk += (dv.hessian(off + k, off + j) + dv.hessian(off + j, off + k)) *
                  dv.gradient[off + j];
          }
          sens->gradient[off + k] = dpref * uk * a_term + pref * (2.0 * uk * lap + (p - 2.0) * hk);
          for (std::size_t j = 0; j < d; ++j) {
            sens->hessian(off + k, off + j) =
                pref * ((k == j ? g2 : 0.0) + (p - 2.0) * uk * dv.gradient[off + j]);
          }
        }
      }
      return pref * a_term + f_val;
    }
    case ProblemKind::Heat:
      lap_sens(1.0);
      if (sens) sens->gradient[0] = -1.0;
      return lap - dv.gradient[0];
    case ProblemKind::Hjb:
      lap_sens(1.0);
      if (sens) {
        sens->gradient[0] = 1.0;
        for (std::size_t i = 0; i < d; ++i) sens->gradient[off + i] = -2.0 * mu * dv.gradient[off + i];
      }
      return dv.gradient[0] + lap - mu * g2;
  }
  return 0.0;
}

double PdeProblem::variational_at(const InputDerivatives& dv, std::span<const double> z,
                                  InputDerivatives* sens) const {
  if (kind != ProblemKind::Poisson && kind != ProblemKind::PLaplace) {
    throw std::invalid_argument("variational loss requires a poisson or p_laplace problem");
  }
  const std::size_t dim = input_dim();
  if (dv.gradient.size() != dim) {
    throw std::invalid_argument("variational_at: derivative shape does not match the problem");
  }
  const double f_val = source(z);
  const double g2 = norm2(dv.gradient);
  const double g = std::sqrt(g2);
  if (sens) {
    *sens = InputDerivatives::zeros(dim);
    sens->value = -f_val;
    const double c = (p == 2.0) ? 1.0 : (g > 0.0 ? std::pow(g, p - 2.0) : 0.0);
    for (std::size_t i = 0; i < dim; ++i) sens->gradient[i] = c * dv.gradient[i];
  }
  return std::pow(g, p) / p - f_val * dv.value;
}

std::vector<std::vector<double>> PdeProblem::sample_domain(std::size_t count,
                                                           RngStream& rng) const {
  std::vector<std::vector<double>> pts(count, std::vector<double>(input_dim()));
  for (auto& z : pts) {
    switch (kind) {
      case ProblemKind::Poisson:
      case ProblemKind::PLaplace:
        for (auto& v : z) v = rng.uniform();
        break;
      case ProblemKind::Heat:
        z[0] = rng.uniform(0.0, T);
        for (std::size_t i = 1; i < z.size(); ++i) z[i] = rng.uniform();
        break;
      case ProblemKind::Hjb:
        z[0] = rng.uniform(0.0, T);
        for (std::size_t i = 1; i < z.size(); ++i) z[i] = rng.normal();
        break;
    }
  }
  return pts;
}

std::vector<std::vector<double>> PdeProblem::sample_boundary(std::size_t count,
                                                             RngStream& rng) const {
  std::vector<std::vector<double>> pts(count, std::vector<double>(input_dim()));
  const std::size_t off = spatial_offset();
  auto on_face = [&](std::vector<double>& z) {
    for (std::size_t i = off; i < z.size(); ++i) z[i] = rng.uniform();
    const std::size_t face = static_cast<std::size_t>(rng.below(2 * d));
    z[off + face / 2] = (face % 2 == 0) ? 0.0 : 1.0;
  };
  for (std::size_t k = 0; k < count; ++k) {
    auto& z = pts[k];
    switch (kind) {
      case ProblemKind::Poisson:
      case ProblemKind::PLaplace:
        on_face(z);
        break;
      case ProblemKind::Heat:
        // First half: initial data at t = 0; second half: spatial boundary.
        if (k < (count + 1) / 2) {
          z[0] = 0.0;
          for (std::size_t i = 1; i < z.size(); ++i) z[i] = rng.uniform();
        } else {
          z[0] = rng.uniform(0.0, T);
          on_face(z);
        }
        break;
      case ProblemKind::Hjb:
        z[0] = T;
        for (std::size_t i = 1; i < z.size(); ++i) z[i] = rng.normal();
        break;
    }
  }
  return pts;
}

}  // namespace qpinn::pde
