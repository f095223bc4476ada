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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "qpinn/complexity.hpp"
#include "qpinn/train.hpp"

using namespace qpinn;
using namespace qpinn::complexity;
using u64 = std::uint64_t;

namespace {

// Independent closed forms used as oracles.
u64 ref_standard_general(const ComplexityProfile& p) {
  u64 s = 0;
  for (std::size_t i = 0; i < p.d; ++i) {
    for (std::size_t j = p.commuting ? i : 0; j < p.d; ++j) {
      s += 4 * p.alpha[i] * p.alpha[j] - p.alpha_mixed[i][j];
    }
  }
  return p.n_r * s + p.n_e;
}

u64 ref_sum(const ComplexityProfile& p, u64 (*f)(u64)) {
  u64 s = 0;
  for (u64 a : p.alpha) s += f(a);
  return s;
}

u64 ref_p2(const ComplexityProfile& p) {
  return p.n_r * ref_sum(p, [](u64 a) { return 4 * a * a - a; }) + p.n_e;
}

u64 ref_heat(const ComplexityProfile& p) {
  return p.n_r * (2 * p.alpha_t + ref_sum(p, [](u64 a) { return 4 * a * a - a; })) + p.n_e;
}

u64 ref_hjb(const ComplexityProfile& p) {
  return p.n_r * (2 * p.alpha_t + 3 * ref_sum(p, [](u64 a) { return a * (2 * a - 1); })) + p.n_e;
}

u64 ref_variational(const ComplexityProfile& p) {
  return p.n_r * (1 + 2 * ref_sum(p, [](u64 a) { return a; })) + p.n_e;
}

ComplexityProfile random_profile(RngStream& rng) {
  ComplexityProfile p;
  p.d = 1 + rng.below(4);
  p.alpha.resize(p.d);
  for (auto& a : p.alpha) a = 1 + rng.below(30);
  p.alpha_mixed.assign(p.d, std::vector<u64>(p.d, 0));
  for (std::size_t i = 0; i < p.d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const u64 m = rng.below(std::min(p.alpha[i], p.alpha[j]) + 1);
      p.alpha_mixed[i][j] = p.alpha_mixed[j][i] = m;
    }
  }
  p.alpha_t = rng.below(20);
  p.n_r = 1 + rng.below(256);
  p.n_e = rng.below(128);
  p.K = 1 + rng.below(2048);
  p.N_theta = rng.below(100);
  p.commuting = rng.uniform() < 0.5;
  return p;
}

ComplexityProfile n6_profile() {
  RngStream rng(3);
  const auto net = qnet::build_network(6, 1, 2, qnet::EncodingKind::ChebyshevAcos, rng);
  auto p = profile_from_network(net, pde::PdeProblem::poisson());
  p.n_r = 128;
  p.n_e = 64;
  return p;
}

}  // namespace

TEST_CASE("worked examples for the n = 6, M = 1, d = 2 network") {
  const auto p = n6_profile();
  REQUIRE(p.alpha == std::vector<u64>{9, 9});
  CHECK(p.alpha_mixed[0][1] == 6);
  CHECK(p.alpha_mixed[1][0] == 6);
  CHECK(p.alpha_mixed[0][0] == 9);
  CHECK(xi(p, PdeKind::PLaplaceP2, LossKind::Variational) == 4800);
  CHECK(xi(p, PdeKind::PLaplaceP2, LossKind::Standard) == 80704);
  CHECK(p.N_theta == 24);
}

TEST_CASE("quartic coefficient example") {
  CHECK(xi_explicit(2, 3, 1, 1, 0, 1, LossKind::Standard, Convention::Printed) == 318);
  for (u64 d = 1; d <= 12; ++d) {
    const u64 poly = 72 * d * d * d * d + 141 * d * d * d + 87 * d * d + 18 * d;
    CHECK(xi_explicit(2, 3, d, 1, 0, 1, LossKind::Standard, Convention::Printed) == poly);
    CHECK(xi_explicit(2, 3, d, 5, 7, 1, LossKind::Standard, Convention::Printed) == 5 * poly + 7);
  }
}

TEST_CASE("crossover dimensions") {
  const auto rows = crossover_report(2, 3, 1024, 100, 100, 20);
  REQUIRE(rows.size() == 20);
  u64 first_vs = 0, first_s = 0;
  for (const auto& r : rows) {
    if (!first_vs && r.var_smoothed_lt_variational) first_vs = r.d;
    if (!first_s && r.smoothed_lt_variational) first_s = r.d;
    CHECK(r.standard_gt_variational);
    CHECK(r.var_smoothed_lt_smoothed);
    CHECK(r.n == 3 * r.d);
  }
  CHECK(first_vs == 9);
  CHECK(first_s == 10);
  for (const auto& r : rows) {
    CHECK(r.var_smoothed_lt_variational == (r.d >= 9));
    CHECK(r.smoothed_lt_variational == (r.d >= 10));
  }
  const auto csv = crossover_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  CHECK(csv.rfind("d,n,xi_standard", 0) == 0);
}

TEST_CASE("generic convention keeps standard above variational") {
  for (const auto& r : crossover_report(2, 3, 1024, 100, 100, 20, Convention::Generic)) {
    CHECK(r.standard_gt_variational);
  }
}

TEST_CASE("profile from registry") {
  RngStream rng(5);
  const auto heat_net = qnet::build_network(4, 1, 2, qnet::EncodingKind::ChebyshevAcos, rng);
  const auto hp = profile_from_network(heat_net, pde::PdeProblem::heat(1));
  CHECK(hp.alpha_t == 6);
  CHECK(hp.alpha == std::vector<u64>{6});
  const auto m0 = qnet::build_network(6, 0, 2, qnet::EncodingKind::ChebyshevAcos, rng);
  const auto p0 = profile_from_network(m0, pde::PdeProblem::poisson());
  CHECK(p0.alpha == std::vector<u64>{3, 3});
  CHECK(p0.alpha_mixed[0][1] == 0);
  CHECK_THROWS_AS(profile_from_network(heat_net, pde::PdeProblem::heat(2)),
                  std::invalid_argument);
  for (u64 n_per_d : {1, 2, 3}) {
    for (u64 M : {1, 2}) {
      for (u64 d : {1, 2, 3}) {
        const auto net = qnet::build_network(n_per_d * d, M, d, qnet::EncodingKind::ChebyshevAcos,
                                             rng);
        auto prob = pde::PdeProblem::poisson();
        prob.d = d;
        const auto got = profile_from_network(net, prob);
        const auto want = idealized_profile(M, n_per_d, d, 0, 0, 0, Convention::Generic);
        CHECK(got.alpha == want.alpha);
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            if (i != j) CHECK(got.alpha_mixed[i][j] == want.alpha_mixed[i][j]);
          }
        }
        CHECK(got.N_theta == want.N_theta);
      }
    }
  }
}

TEST_CASE("random profiles agree with the closed forms") {
  RngStream rng(17);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_profile(rng);
    CHECK(xi(p, PdeKind::PLaplaceGeneral, LossKind::Standard) == ref_standard_general(p));
    CHECK(xi(p, PdeKind::PLaplaceP2, LossKind::Standard) == ref_p2(p));
    CHECK(xi(p, PdeKind::Heat, LossKind::Standard) == ref_heat(p));
    CHECK(xi(p, PdeKind::Hjb, LossKind::Standard) == ref_hjb(p));
    CHECK(xi(p, PdeKind::PLaplaceGeneral, LossKind::Variational) == ref_variational(p));
    CHECK(xi(p, PdeKind::PLaplaceP2, LossKind::Variational) == ref_variational(p));
    CHECK(xi(p, PdeKind::PLaplaceGeneral, LossKind::Smoothed) == p.K * (5 * p.n_r + p.n_e));
    CHECK(xi(p, PdeKind::PLaplaceP2, LossKind::Smoothed) == p.K * (3 * p.n_r + p.n_e));
    CHECK(xi(p, PdeKind::PLaplaceGeneral, LossKind::VariationalSmoothed) ==
          p.K * (3 * p.n_r + p.n_e));
    CHECK(xi_with_gradient(p, PdeKind::PLaplaceP2, LossKind::Standard) ==
          (1 + 2 * p.N_theta) * ref_p2(p));
  }
}

TEST_CASE("monotonicity and the commuting branch") {
  RngStream rng(23);
  for (int k = 0; k < 100; ++k) {
    const auto p = random_profile(rng);
    for (auto pde : {PdeKind::PLaplaceGeneral, PdeKind::PLaplaceP2, PdeKind::Heat, PdeKind::Hjb}) {
      for (auto loss : {LossKind::Standard, LossKind::Smoothed}) {
        const u64 base = xi(p, pde, loss);
        auto q = p;
        ++q.n_r;
        CHECK(xi(q, pde, loss) >= base);
        q = p;
        ++q.n_e;
        CHECK(xi(q, pde, loss) >= base);
        q = p;
        ++q.K;
        CHECK(xi(q, pde, loss) >= base);
        q = p;
        ++q.alpha[rng.below(p.d)];
        CHECK(xi(q, pde, loss) >= base);
      }
    }
    auto c = p, nc = p;
    c.commuting = true;
    nc.commuting = false;
    CHECK(xi(c, PdeKind::PLaplaceGeneral, LossKind::Standard) <=
          xi(nc, PdeKind::PLaplaceGeneral, LossKind::Standard));
  }
}

TEST_CASE("invalid combinations and shapes") {
  auto p = n6_profile();
  CHECK_THROWS_AS(xi(p, PdeKind::Heat, LossKind::Variational), std::invalid_argument);
  CHECK_THROWS_AS(xi(p, PdeKind::Hjb, LossKind::Variational), std::invalid_argument);
  CHECK_THROWS_AS(xi(p, PdeKind::Heat, LossKind::VariationalSmoothed), std::invalid_argument);
  p.alpha.pop_back();
  CHECK_THROWS_AS(xi(p, PdeKind::PLaplaceP2, LossKind::Standard), std::invalid_argument);
  CHECK_THROWS_AS(parse_pde_kind("wave"), std::invalid_argument);
  CHECK_THROWS_AS(parse_loss_kind("robust"), std::invalid_argument);
  CHECK_THROWS_AS(idealized_profile(1, 0, 2, 1, 1, 1, Convention::Printed),
                  std::invalid_argument);
  for (auto k : {PdeKind::PLaplaceGeneral, PdeKind::PLaplaceP2, PdeKind::Heat, PdeKind::Hjb}) {
    CHECK(parse_pde_kind(to_string(k)) == k);
  }
  for (auto k : {LossKind::Standard, LossKind::Variational, LossKind::Smoothed,
                 LossKind::VariationalSmoothed}) {
    CHECK(parse_loss_kind(to_string(k)) == k);
  }
}

namespace {

u64 measured(const std::string& problem, pde::Formulation f, std::size_t nr, std::size_t ne,
             ComplexityProfile& prof) {
  auto cfg = train::default_config(problem);
  cfg.network.n_qubits = 2;
  cfg.network.layers = 1;
  cfg.network.engine = trial::Engine::Shift;
  cfg.loss.formulation = f;
  auto tr = train::make_trial(cfg);
  RngStream rng(9);
  const auto br = cfg.problem.sample_domain(nr, rng);
  const auto be = cfg.problem.sample_boundary(ne, rng);
  EvalCounter c;
  train::evaluate_loss(*tr, cfg.problem, cfg.loss, br, be, c);
  const auto& q = dynamic_cast<const trial::QuantumTrial&>(*tr);
  prof = profile_from_network(q.network(), cfg.problem);
  prof.n_r = nr;
  prof.n_e = ne;
  return c.evaluations;
}

}  // namespace

TEST_CASE("shift-engine counters match the per-sample formulas") {
  ComplexityProfile prof;
  u64 got = measured("poisson", pde::Formulation::Standard, 6, 5, prof);
  CHECK(got == xi(prof, PdeKind::PLaplaceP2, LossKind::Standard));
  got = measured("poisson", pde::Formulation::Variational, 6, 5, prof);
  CHECK(got == xi(prof, PdeKind::PLaplaceP2, LossKind::Variational));
  got = measured("heat_1d", pde::Formulation::Standard, 6, 5, prof);
  CHECK(got == xi(prof, PdeKind::Heat, LossKind::Standard));
  got = measured("hjb", pde::Formulation::Standard, 6, 5, prof);
  CHECK(got == xi(prof, PdeKind::Heat, LossKind::Standard));
  CHECK(got < xi(prof, PdeKind::Hjb, LossKind::Standard));
}
