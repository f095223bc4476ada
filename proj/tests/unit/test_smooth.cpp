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
#include "qpinn/qnet.hpp"
#include "qpinn/smooth.hpp"

using namespace qpinn;
using smooth::Evaluator;
using smooth::SmoothingConfig;

namespace {

const Evaluator kConst = [](std::span<const double>) { return 2.5; };
const Evaluator kAffine = [](std::span<const double> p) { return 1.0 + 3.0 * p[0] - 2.0 * p[1]; };
const Evaluator kSquare = [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; };
const Evaluator kProduct = [](std::span<const double> p) { return p[0] * p[1]; };
const Evaluator kSin = [](std::span<const double> p) { return std::sin(5.0 * p[0]) + p[1] * p[1]; };

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("configuration errors") {
  RngStream rng(1);
  const std::vector<double> x{0.0, 0.0};
  CHECK_THROWS_AS(smooth::smoothed_value(kConst, x, {0.1, 7, true}, rng), std::invalid_argument);
  CHECK_THROWS_AS(smooth::smoothed_value(kConst, x, {0.0, 8, true}, rng), std::invalid_argument);
  CHECK_THROWS_AS(smooth::smoothed_value(kConst, x, {0.1, 0, false}, rng), std::invalid_argument);
  CHECK_NOTHROW(smooth::smoothed_value(kConst, x, {0.1, 7, false}, rng));
  CHECK_THROWS_AS(smooth::lipschitz_diagnostic(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("smoothed value") {
  RngStream rng(2);
  const std::vector<double> x{0.3, -0.7};
  CHECK(smooth::smoothed_value(kConst, x, {0.5, 10, true}, rng).mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(smooth::smoothed_value(kConst, x, {0.5, 11, false}, rng).mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(std::abs(smooth::smoothed_value(kAffine, x, {0.3, 20, true}, rng).mean - kAffine(x)) < 1e-14);
  const auto sq = smooth::smoothed_value(kSquare, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(sq.mean, kSquare(x) + 0.01 * 2, sq.std_error));
}

TEST_CASE("smoothed gradient") {
  RngStream rng(3);
  const std::vector<double> x{1.0, 0.0};
  const auto c = smooth::smoothed_gradient(kConst, x, {0.1, 100, true}, rng);
  CHECK(c.mean[0] == 0.0);
  CHECK(c.mean[1] == 0.0);
  const auto a = smooth::smoothed_gradient(kAffine, x, {0.1, 10000, true}, rng);
  CHECK(testing::within_se(a.mean[0], 3.0, a.std_error[0]));
  CHECK(testing::within_se(a.mean[1], -2.0, a.std_error[1]));
  const auto s = smooth::smoothed_gradient(kSquare, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(s.mean[0], 2.0, s.std_error[0]));
  CHECK(testing::within_se(s.mean[1], 0.0, s.std_error[1]));
}

TEST_CASE("smoothed Hessian and Laplacian") {
  RngStream rng(4);
  const std::vector<double> x{0.4, -0.2};
  const auto aff = smooth::smoothed_hessian(kAffine, x, {0.1, 1000, true}, rng);
  for (double v : aff.mean.data()) CHECK(std::abs(v) < 1e-9);
  const auto lap = smooth::smoothed_laplacian(kSquare, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(lap.mean, 4.0, lap.std_error));
  const auto h = smooth::smoothed_hessian(kProduct, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(h.mean(0, 1), 1.0, h.std_error(0, 1)));
  CHECK(testing::within_se(h.mean(1, 0), 1.0, h.std_error(1, 0)));
  CHECK(testing::within_se(h.mean(0, 0), 0.0, h.std_error(0, 0)));
  CHECK(testing::within_se(h.mean(1, 1), 0.0, h.std_error(1, 1)));
}

TEST_CASE("smoothed time derivative") {
  RngStream rng(5);
  const std::vector<double> x{2.0};
  const Evaluator lin_t = [](std::span<const double> z) { return z[0]; };
  const Evaluator tx = [](std::span<const double> z) { return z[0] * z[1]; };
  // Each paired draw contributes delta_t^2 / sigma^2, so the estimate is 1 up
  // to Monte Carlo error rather than exactly.
  const auto lt = smooth::smoothed_time_derivative(lin_t, 0.5, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(lt.mean[0], 1.0, lt.std_error[0]));
  CHECK(testing::within_se(lt.mean[1], 0.0, lt.std_error[1]));
  const auto p = smooth::smoothed_time_derivative(tx, 0.5, x, {0.1, 100000, true}, rng);
  CHECK(testing::within_se(p.mean[0], 2.0, p.std_error[0]));
  CHECK(testing::within_se(p.mean[1], 0.5, p.std_error[1]));
  const auto c = smooth::smoothed_time_derivative(kConst, 0.5, x, {0.1, 100, true}, rng);
  CHECK(c.mean[0] == 0.0);
  CHECK(c.mean[1] == 0.0);
}

TEST_CASE("Lipschitz diagnostic") {
  CHECK(std::abs(smooth::lipschitz_diagnostic(18.0, 0.1) - 143.619) < 5e-4);
  CHECK(smooth::lipschitz_diagnostic(18.0, 1e12) < 1e-10);
  // A bound of 22360 at sigma = 0.1 needs 3n sqrt(2/pi) / 0.1 > 22360.
  const double n_needed = 22360.0 * 0.1 / (3.0 * std::sqrt(2.0 / testing::kPi));
  CHECK(n_needed > 900.0);
  CHECK(smooth::lipschitz_diagnostic(3.0 * 935, 0.1) > 22360.0);
}

TEST_CASE("estimators are unbiased across batches") {
  RngStream rng(6);
  const std::vector<double> x{0.2, 0.5};
  const int batches = 200;
  double g0 = 0.0, g0sq = 0.0, l = 0.0, lsq = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double v = smooth::smoothed_gradient(kSquare, x, {0.1, 200, true}, rng).mean[0];
    g0 += v;
    g0sq += v * v;
    const double w = smooth::smoothed_laplacian(kSquare, x, {0.1, 200, true}, rng).mean;
    l += w;
    lsq += w * w;
  }
  auto se = [&](double s, double s2) {
    const double m = s / batches;
    return std::sqrt((s2 / batches - m * m) / (batches - 1));
  };
  CHECK(testing::within_se(g0 / batches, 0.4, se(g0, g0sq), 4.0));
  CHECK(testing::within_se(l / batches, 4.0, se(l, lsq), 4.0));
}

TEST_CASE("paired estimators reduce variance on sin(5 x1) + x2^2") {
  const std::vector<double> x{0.3, 0.4};
  // Same seed and the same number of Gaussian draws, so both estimators see
  // identical delta_k.
  const SmoothingConfig paired{0.1, 40000, true}, plain{0.1, 20000, false};
  RngStream a(7), b(7);
  const auto gp = smooth::smoothed_gradient(kSin, x, paired, a);
  const auto gq = smooth::smoothed_gradient(kSin, x, plain, b);
  for (std::size_t i = 0; i < 2; ++i) CHECK(gp.std_error[i] <= gq.std_error[i]);
  RngStream c(8), d(8);
  const auto hp = smooth::smoothed_hessian(kSin, x, paired, c);
  const auto hq = smooth::smoothed_hessian(kSin, x, plain, d);
  for (std::size_t k = 0; k < 4; ++k) CHECK(hp.std_error.data()[k] <= hq.std_error.data()[k]);
  RngStream e(9), f(9);
  CHECK(smooth::smoothed_laplacian(kSin, x, paired, e).std_error <=
        smooth::smoothed_laplacian(kSin, x, plain, f).std_error);
}

TEST_CASE("stencil draws and point counts") {
  RngStream rng(10);
  const std::vector<double> x{0.1, 0.2};
  DerivativeRequest grad_only;
  grad_only.gradient = {0, 1};
  const auto sg = smooth::build_stencil(x, grad_only, {0.1, 64, true}, rng);
  CHECK(sg.draws == 32);
  CHECK(sg.points.size() == 64);
  DerivativeRequest hess = grad_only;
  hess.hessian = HessianMode::Full;
  hess.hessian_coords = {0, 1};
  const auto sh = smooth::build_stencil(x, hess, {0.1, 64, true}, rng);
  CHECK(sh.points.size() == 96);
  const auto sp = smooth::build_stencil(x, hess, {0.1, 64, false}, rng);
  CHECK(sp.draws == 64);
  CHECK(sp.points.size() == 64);
}

TEST_CASE("shot-noise gradient error stays within the bound") {
  RngStream rng(11);
  const auto net = testing::random_network(2, 1, 2, rng);
  const SmoothingConfig cfg{0.1, 1000, true};
  DerivativeRequest req;
  req.gradient = {0, 1};
  RngStream shots(12);
  const Evaluator exact = [&](std::span<const double> p) { return qnet::evaluate(net, p); };
  const Evaluator noisy = [&](std::span<const double> p) {
    return qsim::expectation_shots(qnet::prepare_state(net, p), net.cost, 2000, shots);
  };
  for (double x0 : {0.2, 0.5, 0.8}) {
    for (double x1 : {0.3, 0.7}) {
      const std::vector<double> x{x0, x1};
      const auto st = smooth::build_stencil(x, req, cfg, rng);
      const auto re = smooth::apply_stencil(st, exact);
      const auto rs = smooth::apply_stencil(st, noisy);
      double eps = 0.0;
      for (std::size_t p = 0; p < re.u_values.size(); ++p) {
        eps = std::max(eps, std::abs(re.u_values[p] - rs.u_values[p]));
      }
      std::vector<double> gap{rs.mean.gradient[0] - re.mean.gradient[0],
                              rs.mean.gradient[1] - re.mean.gradient[1]};
      const double bound = std::sqrt(2.0) * eps / cfg.sigma + 4.0 * norm(rs.std_error.gradient);
      CHECK(norm(gap) <= bound);
    }
  }
}

TEST_CASE("smoothed network gradients respect the Lipschitz ceiling") {
  RngStream rng(13);
  const auto net = testing::random_network(2, 1, 2, rng);
  const Evaluator u = [&](std::span<const double> p) { return qnet::evaluate(net, p); };
  const SmoothingConfig cfg{0.1, 64, true};
  const double ceiling = smooth::lipschitz_diagnostic(3.0 * 2, cfg.sigma);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> x{rng.uniform(), rng.uniform()};
    worst = std::max(worst, norm(smooth::smoothed_gradient(u, x, cfg, rng).mean));
  }
  CHECK(worst <= ceiling);
}
