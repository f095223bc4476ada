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

#include "qpinn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpinn/complexity.hpp"
#include "qpinn/config.hpp"
#include "qpinn/experiment.hpp"
#include "qpinn/pde.hpp"
#include "qpinn/qdiff.hpp"
#include "qpinn/qnet.hpp"
#include "qpinn/qsim.hpp"
#include "qpinn/smooth.hpp"
#include "qpinn/train.hpp"

namespace qpinn::verify {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail << what;
      ok = false;
    }
  }
};

qnet::NetworkSpec random_network(std::size_t n, std::size_t M, std::size_t d, RngStream& rng) {
  qnet::NetworkSpec net = qnet::build_network(n, M, d, qnet::EncodingKind::ChebyshevAcos, rng);
  std::vector<double> theta(net.parameter_count());
  for (auto& t : theta) t = rng.uniform(-1.0, 1.0);
  net.set_flat_parameters(theta);
  return net;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

CheckResult check_qsim() {
  Check c;
  qsim::QuantumState s(1);
  qsim::apply_gate_inplace(s, qsim::GateOp::ry(0, kPi / 2));
  c.expect(std::abs(s.amplitudes()[0].real() - std::sqrt(0.5)) < 1e-12 &&
               std::abs(s.amplitudes()[1].real() - std::sqrt(0.5)) < 1e-12,
           "RY(pi/2)|0> amplitudes");
  qsim::QuantumState z(3);
  c.expect(std::abs(qsim::expectation(z, qsim::PauliHamiltonian::ising_ring(3)) - 6.0) < 1e-12,
           "Ising expectation on |000>");
  RngStream rng(11);
  qsim::QuantumState r(4);
  for (int k = 0; k < 200; ++k) {
    const auto q = static_cast<std::size_t>(rng.below(4));
    qsim::apply_gate_inplace(r, qsim::GateOp::rotation(qsim::GateKind::RX, q, rng.uniform(-3, 3)));
    qsim::apply_gate_inplace(r, qsim::GateOp::cnot(q, (q + 1) % 4));
  }
  c.expect(std::abs(r.norm_squared() - 1.0) < 1e-10, "norm drift after 400 gates");
  return {"qsim gates and expectation", c.ok, c.detail.str()};
}

CheckResult check_lemma_decomposition() {
  Check c;
  RngStream rng(12);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Random involutory G = n . (X, Y, Z) and random Hermitian C.
    double v[3] = {rng.normal(), rng.normal(), rng.normal()};
    const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    ComplexMatrix G(2, 2);
    const char sym[3] = {'X', 'Y', 'Z'};
    for (int k = 0; k < 3; ++k) {
      const ComplexMatrix P = qsim::pauli_matrix(sym[k]);
      for (std::size_t e = 0; e < 4; ++e) G.data()[e] += (v[k] / nv) * P.data()[e];
    }
    ComplexMatrix C(2, 2);
    C(0, 0) = rng.normal();
    C(1, 1) = rng.normal();
    C(0, 1) = {rng.normal(), rng.normal()};
    C(1, 0) = std::conj(C(0, 1));
    const ComplexMatrix Gd = adjoint(G);
    const ComplexMatrix GCG = multiply(multiply(Gd, C), G);
    for (int k = 0; k < 10; ++k) {
      const double x = rng.uniform(-kPi, kPi);
      ComplexMatrix Mx(2, 2);
      for (std::size_t e = 0; e < 4; ++e) {
        Mx.data()[e] = std::cos(x / 2) * (e == 0 || e == 3 ? 1.0 : 0.0) -
                       qsim::Complex(0, 1) * std::sin(x / 2) * G.data()[e];
      }
      const ComplexMatrix lhs = multiply(multiply(adjoint(Mx), C), Mx);
      const ComplexMatrix GdC = multiply(Gd, C);
      const ComplexMatrix CG = multiply(C, G);
      for (std::size_t e = 0; e < 4; ++e) {
        const auto A = (GCG.data()[e] + C.data()[e]) / 2.0;
        const auto B = (C.data()[e] - GCG.data()[e]) / 2.0;
        const auto Ct = qsim::Complex(0, 0.5) * (GdC.data()[e] - CG.data()[e]);
        worst = std::max(worst, std::abs(lhs.data()[e] - (A + B * std::cos(x) + Ct * std::sin(x))));
      }
    }
  }
  c.expect(worst < 1e-12, "decomposition deviation " + std::to_string(worst));
  return {"conjugation decomposition", c.ok, c.detail.str()};
}

CheckResult check_shift_oracle(bool tamper) {
  Check c;
  qnet::NetworkSpec net;
  RngStream rng(13);
  net = qnet::build_network(1, 1, 1, qnet::EncodingKind::ChebyshevAcos, rng, {false});
  net.cost = qsim::PauliHamiltonian(1, {{1.0, "Z"}});
  net.params[0] = qnet::UatParams{0.15, {0.0}, 0.0};
  const std::vector<double> x{0.4};
  const std::size_t site = qnet::uat_ry_site_id(net, 0, 0);
  qdiff::ShiftPlan plan = qdiff::first_derivative_plan(site);
  if (tamper) plan.denominator *= 1.05;
  EvalCounter counter;
  const double got = qdiff::run_plan(net, x, plan, counter);
  c.expect(std::abs(got + std::sin(0.3)) < 1e-10, "first-derivative shift rule on cos circuit");
  for (int order = 2; order <= 6; ++order) {
    EvalCounter oc;
    const double v = qdiff::angle_derivative_order_d(net, x, site, order, oc);
    // d^k/dx^k cos x = cos(x + k pi / 2)
    c.expect(std::abs(v - std::cos(0.3 + order * kPi / 2)) < 1e-9 &&
                 oc.evaluations == static_cast<std::uint64_t>(order),
             "order-" + std::to_string(order) + " rule");
  }
  return {"shift rules on analytic circuit", c.ok, c.detail.str()};
}

CheckResult check_fd_oracles() {
  Check c;
  RngStream rng(14);
  double g_err = 0.0, h_err = 0.0, f_err = 0.0;
  for (int k = 0; k < 8; ++k) {
    const std::size_t n = 2 + k % 3;
    const std::size_t d = 1 + k % 2;
    const auto net = random_network(n, 1 + k % 2, d, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform(0.1, 0.9);
    const qdiff::ScalarField f = [&](std::span<const double> p) { return qnet::evaluate(net, p); };
    EvalCounter counter;
    const auto g = qdiff::spatial_gradient(net, x, counter);
    const auto H = qdiff::spatial_hessian(net, x, false, counter);
    g_err = std::max(g_err, max_abs_diff(g, qdiff::fd_gradient(f, x, 1e-5)));
    h_err = std::max(h_err, max_abs_diff(H, qdiff::fd_hessian(f, x, 1e-4)));
    DerivativeRequest req;
    for (std::size_t i = 0; i < d; ++i) {
      req.gradient.push_back(i);
      req.hessian_coords.push_back(i);
    }
    req.hessian = HessianMode::Full;
    const auto fast = qdiff::fast_derivatives(net, x, req);
    f_err = std::max(f_err, std::max(max_abs_diff(fast.gradient, g), max_abs_diff(fast.hessian, H)));
  }
  c.expect(g_err <= 1e-5, "gradient vs FD " + std::to_string(g_err));
  c.expect(h_err <= 1e-5, "Hessian vs FD " + std::to_string(h_err));
  c.expect(f_err <= 1e-9, "fast vs shift " + std::to_string(f_err));
  return {"shift engine vs finite differences and fast mode", c.ok, c.detail.str()};
}

CheckResult check_smoothing() {
  Check c;
  RngStream rng(15);
  smooth::SmoothingConfig cfg{0.1, 20000, true};
  const std::vector<double> x{0.3, -0.2};
  const smooth::Evaluator prod = [](std::span<const double> p) { return p[0] * p[1]; };
  const smooth::Evaluator sq = [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; };
  const auto h = smooth::smoothed_hessian(prod, x, cfg, rng);
  c.expect(std::abs(h.mean(0, 1) - 1.0) <= 4 * h.std_error(0, 1) + 1e-12, "Hessian of x1 x2");
  const auto lap = smooth::smoothed_laplacian(sq, x, cfg, rng);
  c.expect(std::abs(lap.mean - 4.0) <= 4 * lap.std_error + 1e-12, "Laplacian of |x|^2");
  const auto g = smooth::smoothed_gradient(sq, x, cfg, rng);
  c.expect(std::abs(g.mean[0] - 0.6) <= 4 * g.std_error[0] + 1e-12, "gradient of |x|^2");
  return {"smoothing estimators", c.ok, c.detail.str()};
}

CheckResult check_residuals() {
  Check c;
  RngStream rng(16);
  const auto poisson = pde::PdeProblem::poisson();
  const auto heat = pde::PdeProblem::heat(2);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto zp = poisson.sample_domain(1, rng)[0];
    worst = std::max(worst, std::abs(poisson.residual(poisson.exact_bundle(zp), zp)));
    const auto zh = heat.sample_domain(1, rng)[0];
    worst = std::max(worst, std::abs(heat.residual(heat.exact_bundle(zh), zh)));
  }
  c.expect(worst < 1e-7, "analytic residual " + std::to_string(worst));
  return {"analytic residual oracles", c.ok, c.detail.str()};
}

CheckResult check_complexity() {
  Check c;
  RngStream rng(17);
  struct Case {
    pde::PdeProblem problem;
    pde::Formulation f;
    complexity::LossKind loss;
  };
  const std::vector<Case> cases{
      {pde::PdeProblem::poisson(), pde::Formulation::Standard, complexity::LossKind::Standard},
      {pde::PdeProblem::poisson(), pde::Formulation::Variational,
       complexity::LossKind::Variational},
      {pde::PdeProblem::p_laplace(3.0), pde::Formulation::Standard,
       complexity::LossKind::Standard},
      {pde::PdeProblem::heat(1), pde::Formulation::Standard, complexity::LossKind::Standard}};
  for (const auto& cs : cases) {
    const auto net = random_network(4, 1, cs.problem.input_dim(), rng);
    auto prof = complexity::profile_from_network(net, cs.problem);
    prof.n_r = 1;
    prof.n_e = 0;
    EvalCounter counter;
    const auto z = cs.problem.sample_domain(1, rng)[0];
    qdiff::shift_derivatives(net, z, cs.problem.interior_request(cs.f), counter);
    const auto want = complexity::xi(prof, complexity::pde_kind_of(cs.problem), cs.loss);
    c.expect(counter.evaluations == want, cs.problem.name() + " " + pde::to_string(cs.f) +
                                              " counter " + std::to_string(counter.evaluations) +
                                              " vs " + std::to_string(want));
  }
  const auto rows = complexity::crossover_report(2, 3, 1024, 1, 1, 20);
  std::uint64_t first_vs = 0, first_s = 0;
  bool std_gt_var = true;
  for (const auto& r : rows) {
    if (!first_vs && r.var_smoothed_lt_variational) first_vs = r.d;
    if (!first_s && r.smoothed_lt_variational) first_s = r.d;
    std_gt_var = std_gt_var && r.standard_gt_variational;
  }
  c.expect(first_vs == 9 && first_s == 10 && std_gt_var, "crossover dimensions");
  return {"complexity counts and crossovers", c.ok, c.detail.str()};
}

CheckResult check_training(const std::string& problem, const std::string& formulation,
                           double threshold, std::size_t workers) {
  Check c;
  config::RunConfig rc;
  rc.problem_name = problem;
  rc.train = train::default_config(problem);
  rc.train.loss.formulation = pde::parse_formulation(formulation);
  rc.output_dir = "qpinn_verify/" + problem;
  const auto res = experiment::run_experiment(rc, workers);
  c.expect(res.metric.mean <= threshold, "mean metric " + std::to_string(res.metric.mean) +
                                             " above " + std::to_string(threshold));
  return {problem + " training (5 seeds)", c.ok,
          c.ok ? "mean " + std::to_string(res.metric.mean) : c.detail.str()};
}

}  // namespace

Level parse_level(const std::string& name) {
  if (name == "fast") return Level::Fast;
  if (name == "full") return Level::Full;
  throw std::invalid_argument("unknown verify level '" + name + "' (expected fast or full)");
}

std::vector<CheckResult> run(const Options& options, std::ostream& log) {
  std::vector<std::function<CheckResult()>> checks{
      check_qsim,
      check_lemma_decomposition,
      [&] { return check_shift_oracle(options.tamper_shift_denominator); },
      check_fd_oracles,
      check_smoothing,
      check_residuals,
      check_complexity};
  if (options.level == Level::Full) {
    checks.push_back([&] { return check_training("poisson", "variational", 0.15, options.workers); });
    checks.push_back([&] { return check_training("heat_1d", "standard", 5e-3, options.workers); });
  }
  std::vector<CheckResult> out;
  for (const auto& chk : checks) {
    CheckResult r;
    try {
      r = chk();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    log << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) log << " (" << r.detail << ")";
    log << '\n';
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qpinn::verify
