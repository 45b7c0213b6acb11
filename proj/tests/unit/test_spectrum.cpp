// Copyright 2026 The sbhm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sbhm/spectrum.hpp"

namespace {

using sbhm::Complex;
using sbhm::Matrix;
using sbhm::Vector;

constexpr double kGolden = 0.6180339887498949;  // (sqrt 5 - 1) / 2

TEST(MuPair, Examples) {
  auto [p, m] = sbhm::mu_pair(-1, 0);
  EXPECT_EQ(p, Complex(1, 0));
  EXPECT_EQ(m, Complex(-1, 0));

  for (double a : {0.0, 0.3, 2.0, 7.5}) {
    auto [pp, mm] = sbhm::mu_pair(a * a / 4, a);
    EXPECT_EQ(pp, Complex(-a / 2, 0));
    EXPECT_EQ(mm, Complex(-a / 2, 0));
  }

  auto [p18, m18] = sbhm::mu_pair(-18, 1);
  EXPECT_NEAR(p18.real(), (-1 + std::sqrt(73.0)) / 2, 1e-14);
  EXPECT_NEAR(p18.real(), 3.77200187265877, 1e-12);
  EXPECT_NEAR(m18.real(), -4.77200187265877, 1e-12);
}

TEST(MuPair, ComplexCaseIsConjugatePair) {
  auto [p, m] = sbhm::mu_pair(5, 2);  // disc = 4 - 20
  EXPECT_DOUBLE_EQ(p.real(), -1);
  EXPECT_DOUBLE_EQ(p.imag(), 2);
  EXPECT_EQ(m, std::conj(p));
}

TEST(MuPair, RejectsNegativeFriction) {
  EXPECT_THROW(sbhm::mu_pair(-1, -0.1), sbhm::InvalidArgument);
}

// Property: both roots solve the characteristic polynomial and agree with the
// long-double quadratic formula.
TEST(MuPair, RootsSatisfyPolynomialAndMatchOracle) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> ul(-50, 50), ua(0, 10);
  for (int rep = 0; rep < 10000; ++rep) {
    const double a = ua(gen);
    const double l = rep % 10 == 0 ? a * a / 4 : ul(gen);
    auto [p, m] = sbhm::mu_pair(l, a);
    for (Complex mu : {p, m}) {
      const double scale = std::max({1.0, std::norm(mu), a * std::abs(mu), std::abs(l)});
      EXPECT_LE(std::abs(mu * mu + a * mu + l) / scale, 1e-14);
    }
    EXPECT_GE(p.real(), m.real());
    if (rep % 10 == 0) {
      // Exact double root; the oracle's square root of a rounding-level
      // discriminant is no reference here.
      EXPECT_EQ(p, Complex(-a / 2, 0));
      EXPECT_EQ(m, Complex(-a / 2, 0));
      continue;
    }
    auto [op, om] = oracle::quadratic_roots(l, a);
    EXPECT_NEAR(p.real(), double(op.real()), 1e-9 * std::max(1.0, std::abs(p)));
    EXPECT_NEAR(std::abs(p.imag()), std::abs(double(op.imag())), 1e-9 * std::max(1.0, std::abs(p)));
    EXPECT_NEAR(m.real(), double(om.real()), 1e-9 * std::max(1.0, std::abs(m)));
  }
}

TEST(Mu0, Examples) {
  EXPECT_DOUBLE_EQ(sbhm::mu0(-1, 0), 1.0);
  for (double a : {0.5, 1.0, 3.0}) EXPECT_NEAR(sbhm::mu0(-a * a, a), a * kGolden, 1e-14);
  EXPECT_NEAR(sbhm::mu0(-18, 1), 3.77200187265877, 1e-12);
  EXPECT_THROW(sbhm::mu0(0.0, 1), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::mu0(2.0, 1), sbhm::InvalidArgument);
}

TEST(PredictedExitRate, Examples) {
  for (double g : {1.0, 4.0, 18.0, 100.0})
    EXPECT_NEAR(sbhm::predicted_exit_rate(1, g, std::sqrt(g)),
                (1 + std::sqrt(5.0)) / 4 / std::sqrt(g), 1e-14);
  EXPECT_NEAR(sbhm::predicted_exit_rate(1, 1, 1e-12), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(sbhm::predicted_exit_rate(3, 7, 2), 3 * sbhm::predicted_exit_rate(1, 7, 2));
  EXPECT_NEAR(sbhm::predicted_exit_rate(1, 18, 1), (std::sqrt(73.0) + 1) / 72, 1e-15);
}

TEST(PredictedExitRate, RejectsNonPositiveInputs) {
  EXPECT_THROW(sbhm::predicted_exit_rate(0, 1, 1), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::predicted_exit_rate(1, 0, 1), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::predicted_exit_rate(1, 1, 0), sbhm::InvalidArgument);
}

// k / (2 mu0) with lambda1 = -gamma1 is the same number.
TEST(PredictedExitRate, EqualsIndexOverTwiceMu0) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 50);
  for (int rep = 0; rep < 1000; ++rep) {
    const double g = u(gen), a = u(gen);
    const int k = 1 + rep % 5;
    EXPECT_NEAR(sbhm::predicted_exit_rate(k, g, a), k / (2 * sbhm::mu0(-g, a)),
                1e-12 * sbhm::predicted_exit_rate(k, g, a));
  }
}

TEST(SaddleEigensystem, OneDimensionalGoldenCase) {
  Matrix h(1, 1);
  h << -1;
  const auto s = sbhm::saddle_eigensystem(h, 1);
  EXPECT_EQ(s.k, 1);
  EXPECT_NEAR(s.mu0, kGolden, 1e-15);
  ASSERT_EQ(s.blocks.size(), 1u);
  EXPECT_EQ(s.blocks[0].tag, sbhm::BlockCase::RealUnstable);
  EXPECT_LE(sbhm::block_residual(s, s.jacobi(h).entries), 1e-14);
}

TEST(SaddleEigensystem, CriticallyDampedJordanBlock) {
  const double a = 2;
  Matrix h = Vector((Vector(2) << -1, a * a / 4).finished()).asDiagonal();
  const auto s = sbhm::saddle_eigensystem(h, a);
  ASSERT_EQ(s.blocks.size(), 2u);
  EXPECT_EQ(s.blocks[0].tag, sbhm::BlockCase::RealUnstable);
  EXPECT_EQ(s.blocks[1].tag, sbhm::BlockCase::CriticallyDamped);
  Eigen::Matrix2cd jordan;
  jordan << -1.0, 1.0, 0.0, -1.0;
  EXPECT_EQ(s.blocks[1].block(), jordan);

  // Explicit A P = P diag(A1, A2), and P^-1 A P by solving.
  const Matrix A = s.jacobi(h).entries;
  const sbhm::ComplexMatrix ap = A.cast<Complex>() * s.basis;
  EXPECT_LE((ap - s.basis * s.block_diagonal()).cwiseAbs().maxCoeff(), 1e-14);
  const sbhm::ComplexMatrix pap = s.basis.fullPivLu().solve(ap);
  EXPECT_LE((pap - s.block_diagonal()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(std::isfinite(s.basis_condition));
}

TEST(SaddleEigensystem, CriticalBandDetection) {
  EXPECT_TRUE(sbhm::is_critically_damped(1.0 + 1e-10, 2.0));
  EXPECT_FALSE(sbhm::is_critically_damped(1.0 + 1e-6, 2.0));
  Matrix h = Vector((Vector(2) << -1, 1.0 + 5e-10).finished()).asDiagonal();
  const auto s = sbhm::saddle_eigensystem(h, 2.0);
  EXPECT_EQ(s.blocks[1].tag, sbhm::BlockCase::CriticallyDamped);
}

TEST(SaddleEigensystem, TenDimensionalCubicInstance) {
  const Vector lam = (Vector(10) << 9, 7, 5, 3, 1, -1, -3, -5, -7, -9).finished();
  const Matrix h = Matrix((2 * lam).asDiagonal());
  const auto s = sbhm::saddle_eigensystem(h, 1);
  EXPECT_EQ(s.k, 5);
  EXPECT_NEAR(s.mu0, (-1 + std::sqrt(1 + 4 * 18.0)) / 2, 1e-14);
  EXPECT_DOUBLE_EQ(s.blocks.front().lambda, -18);
  for (int i = 0; i < 10; ++i) {
    const auto want = s.blocks[i].lambda < 0    ? sbhm::BlockCase::RealUnstable
                      : s.blocks[i].lambda < 0.25 ? sbhm::BlockCase::RealStableDistinct
                                                  : sbhm::BlockCase::ComplexConjugate;
    EXPECT_EQ(s.blocks[i].tag, want);
  }
  EXPECT_LE(sbhm::block_residual(s, s.jacobi(h).entries), 1e-12);
}

TEST(SaddleEigensystem, Errors) {
  Matrix z = Vector((Vector(2) << -1, 1e-12).finished()).asDiagonal();
  EXPECT_THROW(sbhm::saddle_eigensystem(z, 1), sbhm::ZeroEigenvalue);
  Matrix m = Vector((Vector(2) << 1, 2).finished()).asDiagonal();
  EXPECT_THROW(sbhm::saddle_eigensystem(m, 1), sbhm::NoUnstableDirection);
  Matrix ns(2, 2);
  ns << -1, 1, 0, 2;
  EXPECT_THROW(sbhm::saddle_eigensystem(ns, 1), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::saddle_eigensystem(Matrix(0, 0), 1), sbhm::InvalidArgument);
}

// Ensemble properties over random strong saddles, checked against a general
// eigensolver on the assembled 2d x 2d matrix.
TEST(SaddleEigensystem, RandomEnsembleProperties) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> dim(2, 8);
  std::uniform_real_distribution<double> ua(0.05, 4);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = dim(gen);
    const Matrix h = oracle::random_strong_saddle(d, gen);
    const double a = ua(gen);
    const auto s = sbhm::saddle_eigensystem(h, a);

    std::vector<Complex> mus;
    for (const auto& b : s.blocks) {
      mus.push_back(b.mu_plus);
      mus.push_back(b.mu_minus);
    }
    EXPECT_LE(oracle::multiset_distance(mus, oracle::companion_eigenvalues(h, a)), 1e-8);
    EXPECT_LE(sbhm::block_residual(s, s.jacobi(h).entries), 1e-8);

    double max_re = -INFINITY;
    int positive = 0;
    for (const auto& b : s.blocks) {
      const bool unstable = b.lambda < 0;
      EXPECT_EQ(b.mu_plus.real() > 0, unstable);
      EXPECT_LT(b.mu_minus.real(), 0);
      if (!unstable) {
        EXPECT_LE(b.mu_plus.real(), -std::min(a / 2, std::abs(b.mu_plus.real())) + 1e-12);
      }
      positive += b.mu_plus.real() > 0;
      max_re = std::max({max_re, b.mu_plus.real(), b.mu_minus.real()});
      if (b.tag != sbhm::BlockCase::ComplexConjugate) EXPECT_EQ(b.mu_plus.imag(), 0.0);
    }
    EXPECT_EQ(positive, s.k);
    EXPECT_NEAR(s.mu0, max_re, 1e-12);
    EXPECT_TRUE(std::is_sorted(s.blocks.begin(), s.blocks.end(),
                               [](auto& x, auto& y) { return x.lambda < y.lambda; }));
  }
}

TEST(ExitTimeBound, Examples) {
  EXPECT_DOUBLE_EQ(sbhm::exit_time_bound(1.0, std::exp(-2.0)), 1.0);
  Matrix h(1, 1);
  h << -1;
  const auto s = sbhm::saddle_eigensystem(h, 1);
  EXPECT_NEAR(sbhm::exit_time_bound(s, 1e-4), std::log(1e4) / (2 * kGolden), 1e-12);
  EXPECT_NEAR(sbhm::exit_time_bound(s, 1e-4), 7.4513, 1e-4);
  EXPECT_DOUBLE_EQ(sbhm::exit_time_bound(s, 1e-8), 2 * sbhm::exit_time_bound(s, 1e-4));
  EXPECT_THROW(sbhm::exit_time_bound(s, 0.0), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::exit_time_bound(s, 1.0), sbhm::InvalidArgument);
}

}  // namespace
