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

#pragma once

// Truncated multivariate Taylor polynomials in D variables up to order Ord.
// Layout: [value, c_1..c_D, then pairs (i <= j)], where the pair (i, i)
// holds the coefficient of eta_i^2 (half the second derivative) and (i, j)
// the coefficient of eta_i eta_j (the mixed second derivative).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qpinn::jet {

constexpr std::size_t size(std::size_t D, int Ord) {
  return 1 + (Ord >= 1 ? D : 0) + (Ord >= 2 ? D * (D + 1) / 2 : 0);
}


template <std::size_t D>
constexpr std::array<std::size_t, D * D> pair_table() {
  std::array<std::size_t, D * D> t{};
  std::size_t k = 1 + D;
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = i; j < D; ++j) {
      t[i * D + j] = k;
      t[j * D + i] = k;
      ++k;
    }
  }
  return t;
}

template <typename T, std::size_t D, int Ord>
struct Jet {
  static constexpr std::size_t M = size(D, Ord);
  std::array<T, M> c{};

  static constexpr std::size_t pair(std::size_t i, std::size_t j) {
    constexpr auto table = pair_table<D>();
    return table[i * D + j];
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k < M; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k < M; ++k) c[k] -= o.c[k];
    return *this;
  }
  template <typename S>
  Jet& scale(const S& s) {
    for (std::size_t k = 0; k < M; ++k) c[k] *= s;
    return *this;
  }
};

template <typename T, std::size_t D, int Ord>
Jet<T, D, Ord> operator+(Jet<T, D, Ord> a, const Jet<T, D, Ord>& b) {
  return a += b;
}

template <typename T, std::size_t D, int Ord>
Jet<T, D, Ord> operator-(Jet<T, D, Ord> a, const Jet<T, D, Ord>& b) {
  return a -= b;
}

// Truncated product.
template <typename A, typename B, std::size_t D, int Ord>
auto mul(const Jet<A, D, Ord>& a, const Jet<B, D, Ord>& b) {
  using R = decltype(A{} * B{});
  Jet<R, D, Ord> r;
  r.c[0] = a.c[0] * b.c[0];
  if constexpr (Ord >= 1) {
    for (std::size_t i = 0; i < D; ++i) r.c[1 + i] = a.c[0] * b.c[1 + i] + a.c[1 + i] * b.c[0];
  }
  if constexpr (Ord >= 2) {
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = i; j < D; ++j) {
        const std::size_t p = Jet<R, D, Ord>::pair(i, j);
        R v = a.c[0] * b.c[p] + a.c[p] * b.c[0] + a.c[1 + i] * b.c[1 + j];
        if (i != j) v += a.c[1 + j] * b.c[1 + i];
        r.c[p] = v;
      }
    }
  }
  return r;
}

// Product of a complex jet with the conjugate of another, coefficientwise
// conjugation (the expansion variables are real).
template <std::size_t D, int Ord>
Jet<std::complex<double>, D, Ord> mul_conj(const Jet<std::complex<double>, D, Ord>& a,
                                           const Jet<std::complex<double>, D, Ord>& b) {
  Jet<std::complex<double>, D, Ord> bc;
  for (std::size_t k = 0; k < bc.M; ++k) bc.c[k] = std::conj(b.c[k]);
  return mul(bc, a);
}

// f(theta) for a real jet theta, given f, f', f'' at the constant term.
template <std::size_t D, int Ord>
Jet<double, D, Ord> compose(const Jet<double, D, Ord>& theta, double f0, double f1, double f2) {
  Jet<double, D, Ord> r;
  r.c[0] = f0;
  if constexpr (Ord >= 1) {
    for (std::size_t i = 0; i < D; ++i) r.c[1 + i] = f1 * theta.c[1 + i];
  }
  if constexpr (Ord >= 2) {
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = i; j < D; ++j) {
        const std::size_t p = Jet<double, D, Ord>::pair(i, j);
        const double sq = theta.c[1 + i] * theta.c[1 + j] * (i == j ? 1.0 : 2.0);
        r.c[p] = f1 * theta.c[p] + 0.5 * f2 * sq;
      }
    }
  }
  return r;
}

template <std::size_t D, int Ord>
Jet<double, D, Ord> cos_jet(const Jet<double, D, Ord>& t) {
  return compose(t, std::cos(t.c[0]), -std::sin(t.c[0]), -std::cos(t.c[0]));
}

template <std::size_t D, int Ord>
Jet<double, D, Ord> sin_jet(const Jet<double, D, Ord>& t) {
  return compose(t, std::sin(t.c[0]), std::cos(t.c[0]), -std::sin(t.c[0]));
}

}  // namespace qpinn::jet
