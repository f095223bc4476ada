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


#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "qpinn/qdiff.hpp"

using namespace qpinn;
using qdiff::SameSiteVariant;
using testing::kPi;

namespace {

// Two qubits, identity Lambda, no encoding, cost Z_1. The CNOT ring maps Z_1
// back to Z_0 Z_1, so u = cos(ta) cos(tb) for RY angles ta, tb.
qnet::NetworkSpec separable_circuit(double ta, double tb) {
  RngStream rng(1);
  auto net = qnet::build_network(2, 1, 1, qnet::EncodingKind::ChebyshevAcos, rng, {false});
  net.encoding.chi = {0.0, 0.0};
  net.cost = qsim::PauliHamiltonian(2, {{1.0, "IZ"}});
  net.uat(0, 0) = qnet::UatParams{ta / 2, {0.0}, 0.0};
  net.uat(0, 1) = qnet::UatParams{tb / 2, {0.0}, 0.0};
  return net;
}

double angle_fd_mixed(const qnet::NetworkSpec& net, std::span<const double> x, std::size_t a,
                      std::size_t b, double h) {
  auto f = [&](double sa, double sb) {
    qnet::ShiftMap m;
    m[a] += sa;
    m[b] += sb;
    return qnet::evaluate_shifted(net, x, m);
  };
  return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
}

DerivativeRequest full_request(std::size_t d, HessianMode mode) {
  DerivativeRequest r;
  for (std::size_t i = 0; i < d; ++i) {
    r.gradient.push_back(i);
    r.hessian_coords.push_back(i);
  }
  r.hessian = mode;
  return r;
}

// Squared residual of u + u_x0 + u_x0x0 - 0.3 with its sensitivities.
SampleObjective toy_objective(std::vector<double> x) {
  SampleObjective o;
  o.point = std::move(x);
  o.request.gradient = {0};
  o.request.hessian = HessianMode::Diagonal;
  o.request.hessian_coords = {0};
  o.loss = [](const InputDerivatives& d, InputDerivatives& s) {
    const double r = d.value + d.gradient[0] + d.hessian(0, 0) - 0.3;
    s.value = 2 * r;
    s.gradient[0] = 2 * r;
    s.hessian(0, 0) = 2 * r;
    return r * r;
  };
  return o;
}

double batch_loss(const qnet::NetworkSpec& net, const std::vector<SampleObjective>& batch) {
  double total = 0.0;
  for (const auto& o : batch) {
    const auto d = qdiff::fast_derivatives(net, o.point, o.request);
    InputDerivatives s = InputDerivatives::zeros(net.d_in);
    total += o.loss(d, s);
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("first derivative on the cos circuit") {
  const auto net = testing::cos_circuit(0.3);
  const std::size_t site = qnet::uat_ry_site_id(net, 0, 0);
  const std::vector<double> x{0.5};
  EvalCounter c;
  CHECK(std::abs(qdiff::angle_derivative(net, x, site, qdiff::kHalfPi, c) + 0.295520) < 5e-7);
  CHECK(std::abs(qdiff::angle_derivative(net, x, site, qdiff::kHalfPi, c) + std::sin(0.3)) < 1e-14);
  CHECK(std::abs(qdiff::angle_derivative(net, x, site, kPi / 4, c) + std::sin(0.3)) < 1e-10);
  CHECK(c.evaluations == 6);
  CHECK_THROWS_AS(qdiff::angle_derivative(net, x, site, kPi, c), std::invalid_argument);
  CHECK_THROWS_AS(qdiff::angle_derivative(net, x, site, 0.0, c), std::invalid_argument);
  // The encoding RZ acts on |0>, so its angle never matters.
  const std::size_t enc = qnet::encoding_site_id(net, 0);
  CHECK(std::abs(qdiff::angle_derivative(net, x, enc, qdiff::kHalfPi, c)) < 1e-15);
}

TEST_CASE("same-site second derivative variants") {
  const auto net = testing::cos_circuit(0.3);
  const std::size_t site = qnet::uat_ry_site_id(net, 0, 0);
  const std::vector<double> x{0.5};
  EvalCounter c2, c3;
  const auto two = qdiff::angle_second_derivative_same(net, x, site, SameSiteVariant::TwoPoint, c2);
  const auto three =
      qdiff::angle_second_derivative_same(net, x, site, SameSiteVariant::ThreePoint, c3);
  CHECK(std::abs(two.second + std::cos(0.3)) < 1e-14);
  CHECK(std::abs(three.second + std::cos(0.3)) < 1e-14);
  CHECK(three.has_first);
  CHECK(std::abs(three.first + std::sin(0.3)) < 1e-14);
  CHECK(c2.evaluations == 2);
  CHECK(c3.evaluations == 3);
  RngStream rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto r = testing::random_network(1 + k % 3, 1, 2, rng);
    const std::vector<double> y{rng.uniform(), rng.uniform()};
    const std::size_t id = static_cast<std::size_t>(rng.below(qnet::site_count(r)));
    EvalCounter c;
    const double a = qdiff::angle_second_derivative_same(r, y, id, SameSiteVariant::TwoPoint, c).second;
    const double b =
        qdiff::angle_second_derivative_same(r, y, id, SameSiteVariant::ThreePoint, c).second;
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("mixed derivative: separability, symmetry and finite differences") {
  const double ta = 0.7, tb = -0.4;
  const auto net = separable_circuit(ta, tb);
  const std::vector<double> x{0.5};
  CHECK(std::abs(qnet::evaluate(net, x) - std::cos(ta) * std::cos(tb)) < 1e-14);
  const std::size_t a = qnet::uat_ry_site_id(net, 0, 0), b = qnet::uat_ry_site_id(net, 0, 1);
  EvalCounter c;
  const double ga = qdiff::angle_derivative(net, x, a, qdiff::kHalfPi, c);
  const double gb = qdiff::angle_derivative(net, x, b, qdiff::kHalfPi, c);
  const double mixed = qdiff::angle_mixed_derivative(net, x, a, b, qdiff::kHalfPi, c);
  // d/dta d/dtb cos(ta) cos(tb) = sin(ta) sin(tb) = (-sin ta cos tb)(-cos ta sin tb) / (cos ta cos tb)
  CHECK(std::abs(mixed - std::sin(ta) * std::sin(tb)) < 1e-14);
  CHECK(std::abs(mixed * qnet::evaluate(net, x) - ga * gb) < 1e-14);
  CHECK_THROWS(qdiff::angle_mixed_derivative(net, x, a, b, 0.0, c));

  RngStream rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto r = testing::random_network(3, 1 + k % 2, 2, rng);
    const std::vector<double> y{rng.uniform(), rng.uniform()};
    const auto ns = qnet::site_count(r);
    const std::size_t i = static_cast<std::size_t>(rng.below(ns));
    std::size_t j = static_cast<std::size_t>(rng.below(ns));
    if (j == i) j = (i + 1) % ns;
    EvalCounter cc;
    const double m1 = qdiff::angle_mixed_derivative(r, y, i, j, qdiff::kHalfPi, cc);
    const double m2 = qdiff::angle_mixed_derivative(r, y, j, i, qdiff::kHalfPi, cc);
    CHECK(cc.evaluations == 8);
    CHECK(std::abs(m1 - m2) < 1e-12);
    CHECK(std::abs(m1 - angle_fd_mixed(r, y, i, j, 1e-4)) < 1e-6);
  }
}

TEST_CASE("order-d rule on the cos circuit") {
  const auto net = testing::cos_circuit(0.3);
  const std::size_t site = qnet::uat_ry_site_id(net, 0, 0);
  const std::vector<double> x{0.5};
  EvalCounter c;
  CHECK(std::abs(qdiff::angle_derivative_order_d(net, x, site, 3, c) - 0.295520) < 5e-7);
  CHECK(c.evaluations == 3);
  EvalCounter c2;
  const double o2 = qdiff::angle_derivative_order_d(net, x, site, 2, c2);
  const double same =
      qdiff::angle_second_derivative_same(net, x, site, SameSiteVariant::ThreePoint, c2).second;
  CHECK(std::abs(o2 - same) < 1e-10);
  EvalCounter c4;
  CHECK(std::abs(qdiff::angle_derivative_order_d(net, x, site, 4, c4) - std::cos(0.3)) < 1e-9);
  CHECK(c4.evaluations == 4);
  for (int order = 2; order <= 7; ++order) {
    EvalCounter cr, cu;
    const double r = qdiff::angle_derivative_order_d(net, x, site, order, cr);
    const double u = qdiff::angle_derivative_order_d_unreduced(net, x, site, order, cu);
    CHECK(std::abs(r - u) < 1e-9);
    CHECK(std::abs(r - std::cos(0.3 + order * kPi / 2)) < 1e-9);
    CHECK(cr.evaluations == static_cast<std::uint64_t>(order));
    CHECK(cu.evaluations == static_cast<std::uint64_t>(order + 1));
  }
  CHECK_THROWS_AS(qdiff::angle_derivative_order_d(net, x, site, 1, c), std::invalid_argument);
}

TEST_CASE("spatial gradient") {
  RngStream rng(4);
  // n = 1 and d = 3: the only encoding site reads coordinate 2; zeroing gamma_0
  // leaves coordinate 0 unused.
  auto net = testing::random_network(1, 1, 3, rng);
  net.uat(0, 0).gamma[0] = 0.0;
  const std::vector<double> x{0.2, 0.4, 0.6};
  EvalCounter c;
  CHECK(qdiff::spatial_gradient(net, x, c)[0] == 0.0);

  for (int k = 0; k < 10; ++k) {
    const auto r = testing::random_network(4, 1 + k % 2, 2, rng);
    const std::vector<double> y{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    const qdiff::ScalarField f = [&](std::span<const double> p) { return qnet::evaluate(r, p); };
    EvalCounter cc;
    const auto g = qdiff::spatial_gradient(r, y, cc);
    CHECK(testing::max_abs_diff(g, qdiff::fd_gradient(f, y, 1e-5)) < 1e-5);
    std::uint64_t sum_alpha = 0;
    for (const auto& s : qnet::angle_registry(r)) sum_alpha += s.dependencies.size();
    CHECK(cc.evaluations == 2 * sum_alpha);
  }
}

TEST_CASE("spatial Hessian: symmetry, finite differences, and counts") {
  RngStream rng(5);
  for (int k = 0; k < 8; ++k) {
    const auto r = testing::random_network(2 + k % 3, 1, 2, rng);
    const std::vector<double> y{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    const qdiff::ScalarField f = [&](std::span<const double> p) { return qnet::evaluate(r, p); };
    EvalCounter c;
    const Matrix H = qdiff::spatial_hessian(r, y, false, c);
    CHECK(std::abs(H(0, 1) - H(1, 0)) < 1e-9);
    CHECK(testing::max_abs_diff(H, qdiff::fd_hessian(f, y, 1e-4)) < 1e-4);
    EvalCounter cc;
    CHECK(testing::max_abs_diff(qdiff::spatial_hessian(r, y, true, cc), H) < 1e-9);
  }
  // n = 6, M = 1, d = 2: alpha_i = 9, alpha_12 = 6. The counter applies the
  // same-site reduction on the diagonal (alpha_ii = alpha_i), giving
  // 2 (4 * 81 - 9) + (4 * 81 - 6) = 948.
  auto net = testing::random_network(6, 1, 2, rng);
  const std::vector<double> x{0.3, 0.7};
  EvalCounter c;
  qdiff::spatial_hessian(net, x, true, c);
  CHECK(c.evaluations == 948);
  // The idealized count with alpha_ii = M n would be 3 (324 - 6) = 954.
  CHECK(3 * (324 - 6) == 954);
}

TEST_CASE("fast engine agrees with the shift engine") {
  RngStream rng(6);
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = 1 + k % 3;
    const auto r = testing::random_network(1 + k % 4, 1 + k % 2, d, rng,
                                           k % 2 ? qnet::EncodingKind::Tanh
                                                 : qnet::EncodingKind::ChebyshevAcos);
    std::vector<double> y(d);
    for (auto& v : y) v = rng.uniform(0.1, 0.9);
    const auto req = full_request(d, HessianMode::Full);
    EvalCounter c;
    const auto s = qdiff::shift_derivatives(r, y, req, c);
    const auto f = qdiff::fast_derivatives(r, y, req);
    CHECK(std::abs(s.value - f.value) < 1e-12);
    CHECK(testing::max_abs_diff(s.gradient, f.gradient) < 1e-9);
    CHECK(testing::max_abs_diff(s.hessian, f.hessian) < 1e-9);
  }
}

TEST_CASE("finite-difference error shrinks fourfold when h halves") {
  RngStream rng(7);
  const auto r = testing::random_network(3, 1, 1, rng);
  const std::vector<double> y{0.4};
  EvalCounter c;
  const double exact = qdiff::spatial_gradient(r, y, c)[0];
  const qdiff::ScalarField f = [&](std::span<const double> p) { return qnet::evaluate(r, p); };
  const double e1 = std::abs(qdiff::fd_gradient(f, y, 2e-2)[0] - exact);
  const double e2 = std::abs(qdiff::fd_gradient(f, y, 1e-2)[0] - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("theta gradient") {
  SUBCASE("stationary point of a one-parameter toy net") {
    auto net = testing::cos_circuit(0.0);
    SampleObjective o;
    o.point = {0.5};
    o.loss = [](const InputDerivatives& d, InputDerivatives& s) {
      s.value = 2 * (d.value - 1.0);
      return (d.value - 1.0) * (d.value - 1.0);
    };
    std::vector<SampleObjective> batch{o};
    std::vector<double> g;
    EvalCounter c;
    qdiff::theta_gradient(net, batch, g, c);
    for (double v : g) CHECK(std::abs(v) < 1e-8);
  }
  SUBCASE("finite differences on a 2-qubit net with 4 samples") {
    RngStream rng(8);
    auto net = testing::random_network(2, 1, 1, rng);
    std::vector<SampleObjective> batch;
    for (int k = 0; k < 4; ++k) batch.push_back(toy_objective({rng.uniform(0.1, 0.9)}));
    std::vector<double> g;
    EvalCounter c;
    qdiff::theta_gradient(net, batch, g, c);
    const auto theta = net.flat_parameters();
    std::vector<double> fast(theta.size(), 0.0);
    for (const auto& o : batch) qdiff::fast_accumulate(net, o, fast);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      auto tp = theta, tm = theta;
      tp[k] += 1e-5;
      tm[k] -= 1e-5;
      auto np = net, nm = net;
      np.set_flat_parameters(tp);
      nm.set_flat_parameters(tm);
      const double fd = (batch_loss(np, batch) - batch_loss(nm, batch)) / 2e-5;
      CHECK(std::abs(g[k] - fd) < 1e-5);
      CHECK(std::abs(fast[k] / 4.0 - g[k]) < 1e-9);
    }
    // Each sample needs the value, 2 alpha evaluations for u_x and 3 per
    // same-site Hessian term; every one of them is repeated at +-pi/2 per parameter.
    std::uint64_t per_sample = 0;
    EvalCounter single;
    qdiff::shift_derivatives(net, batch[0].point, batch[0].request, single);
    per_sample = single.evaluations;
    CHECK(c.evaluations == 4 * per_sample * (1 + 2 * theta.size()));
  }
  SUBCASE("doubling a batch of identical halves leaves the mean gradient unchanged") {
    RngStream rng(9);
    auto net = testing::random_network(2, 1, 1, rng);
    std::vector<SampleObjective> batch;
    for (int k = 0; k < 3; ++k) batch.push_back(toy_objective({rng.uniform()}));
    auto doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    std::vector<double> g1, g2;
    EvalCounter c;
    qdiff::theta_gradient(net, batch, g1, c);
    qdiff::theta_gradient(net, doubled, g2, c);
    CHECK(testing::max_abs_diff(g1, g2) < 1e-12);
  }
}
