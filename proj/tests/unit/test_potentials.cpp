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

#include <random>

#include "oracles.hpp"
#include "sbhm/potentials.hpp"

namespace {

using sbhm::Matrix;
using sbhm::Vector;

Vector vec(std::initializer_list<double> xs) {
  return sbhm::to_vector(std::vector<double>(xs));
}

TEST(Quadratic, Examples) {
  auto f = sbhm::make_quadratic({-1.0});
  EXPECT_DOUBLE_EQ(f.value(vec({2})), -2.0);
  EXPECT_DOUBLE_EQ(f.gradient(vec({2}))[0], -2.0);
  EXPECT_DOUBLE_EQ(f.hessian(vec({2}))(0, 0), -1.0);

  auto g = sbhm::make_quadratic({1.0, -1.0});
  EXPECT_EQ(g.value(vec({0, 0})), 0.0);
  EXPECT_EQ(g.gradient(vec({0, 0})).norm(), 0.0);

  auto h = sbhm::make_quadratic({9.0, -18.0});
  EXPECT_DOUBLE_EQ(h.value(vec({1, 1})), 0.5 * (9.0 - 18.0));
  EXPECT_DOUBLE_EQ(h.gradient(vec({1, 1}))[0], 9.0);
  EXPECT_DOUBLE_EQ(h.gradient(vec({1, 1}))[1], -18.0);
}

TEST(Quadratic, RejectsZeroAndEmptyLambda) {
  EXPECT_THROW(sbhm::make_quadratic({1.0, 0.0}), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::make_quadratic({}), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::make_cubic_regularized({0.0}), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::make_quadratic({NAN}), sbhm::InvalidArgument);
}

TEST(Quadratic, DimensionMismatchThrows) {
  auto f = sbhm::make_quadratic({1.0, 2.0});
  EXPECT_THROW(f.value(vec({1})), sbhm::InvalidArgument);
  EXPECT_THROW(f.hessian(vec({1, 2, 3})), sbhm::InvalidArgument);
}

TEST(CubicRegularized, Examples) {
  auto f = sbhm::make_cubic_regularized({1.0});
  EXPECT_EQ(f.value(vec({0})), 0.0);
  EXPECT_EQ(f.gradient(vec({0}))[0], 0.0);

  auto g = sbhm::make_cubic_regularized({-1.0});
  EXPECT_DOUBLE_EQ(g.value(vec({1})), 0.0);        // -1 + 1
  EXPECT_DOUBLE_EQ(g.gradient(vec({1}))[0], 1.0);  // -2 + 3

  // 2 lambda x + 3 x^2 = 0 at x = -2 lambda / 3.
  auto h = sbhm::make_cubic_regularized({-9.0});
  EXPECT_NEAR(h.gradient(vec({6}))[0], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.value(vec({6})), -9.0 * 36 + 216);
}

TEST(CubicRegularized, HessianAtOriginIsTwiceLambda) {
  auto f = sbhm::make_cubic_regularized({9, 7, 5, 3, 1, -1, -3, -5, -7, -9});
  const Matrix h = f.hessian(Vector::Zero(10));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(h(i, i), 2.0 * (9 - 2 * i));
  EXPECT_EQ((h - Matrix(h.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(CubicRegularized, HessianContinuousAcrossSwitchRadius) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n;
  auto f = sbhm::make_cubic_regularized({2.0, -1.0, 0.5, -3.0});
  for (int rep = 0; rep < 20; ++rep) {
    Vector dir(4);
    for (auto& c : dir) c = n(gen);
    dir.normalize();
    const Matrix above = f.hessian(1e-13 * dir);
    const Matrix below = f.hessian(1e-15 * dir);
    EXPECT_LE((above - below).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// Property: analytic derivatives agree with central differences on random
// points in [-2, 2]^d for both families.
class DerivativeAgreement : public ::testing::TestWithParam<sbhm::ObjectiveKind> {};

TEST_P(DerivativeAgreement, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int rep = 0; rep < 150; ++rep) {
    const int d = dim(gen);
    std::vector<double> lam(d);
    for (auto& l : lam) {
      do l = 4 * u(gen); while (std::abs(l) < 0.1);
    }
    const auto f = sbhm::make_objective({GetParam(), lam});
    Vector x(d);
    for (auto& c : x) c = u(gen);

    const Matrix h = f.hessian(x);
    EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12);

    const Vector g_fd = oracle::fd_gradient([&](const Vector& y) { return f.value(y); }, x);
    const Vector g = f.gradient(x);
    EXPECT_LE((g - g_fd).norm(), 1e-5 * std::max(1.0, g.norm())) << "rep " << rep;

    const Matrix h_fd =
        oracle::fd_jacobian([&](const Vector& y) { return f.gradient(y); }, x);
    EXPECT_LE((h - h_fd).norm(), 1e-5 * std::max(1.0, h.norm())) << "rep " << rep;
  }
}

INSTANTIATE_TEST_SUITE_P(Families, DerivativeAgreement,
                         ::testing::Values(sbhm::ObjectiveKind::Quadratic,
                                           sbhm::ObjectiveKind::CubicRegularizedQuadratic),
                         [](const auto& info) {
                           return info.param == sbhm::ObjectiveKind::Quadratic ? "Quadratic"
                                                                               : "Cubic";
                         });

TEST(ObjectiveKind, RoundTripsNames) {
  for (auto k : {sbhm::ObjectiveKind::Quadratic, sbhm::ObjectiveKind::CubicRegularizedQuadratic})
    EXPECT_EQ(sbhm::parse_objective_kind(sbhm::to_string(k)), k);
  EXPECT_THROW(sbhm::parse_objective_kind("quartic"), sbhm::InvalidArgument);
}

TEST(ClassifyPoint, Examples) {
  const auto saddle = sbhm::make_quadratic({1, -18});
  auto c = sbhm::classify_point(saddle, vec({0, 0}), {18, 0.1, 1});
  EXPECT_EQ(c.tag, sbhm::PointTag::StrictSaddleRegion);
  EXPECT_DOUBLE_EQ(c.min_eigenvalue, -18);

  const auto bowl = sbhm::make_quadratic({1, 2});
  EXPECT_EQ(sbhm::classify_point(bowl, vec({0, 0}), {1, 0.1, 1}).tag,
            sbhm::PointTag::StrongConvexRegion);

  const auto steep = sbhm::make_quadratic({1, -1});
  c = sbhm::classify_point(steep, vec({10, 0}), {1, 0.1, 1});
  EXPECT_EQ(c.tag, sbhm::PointTag::LargeGradient);
  EXPECT_DOUBLE_EQ(c.grad_norm, 10);

  // Flat direction below gamma1: neither saddle nor strongly convex.
  const auto weak = sbhm::make_quadratic({0.5, 3});
  EXPECT_EQ(sbhm::classify_point(weak, vec({0, 0}), {1, 0.1, 1}).tag,
            sbhm::PointTag::Violation);
}

TEST(ClassifyPoint, RejectsNonPositiveThresholds) {
  const auto f = sbhm::make_quadratic({1});
  EXPECT_THROW(sbhm::classify_point(f, vec({0}), {0, 1, 1}), sbhm::InvalidArgument);
  EXPECT_THROW(sbhm::classify_point(f, vec({0}), {1, -1, 1}), sbhm::InvalidArgument);
}

// Brute force: at the origin of a quadratic the tag is StrictSaddleRegion
// exactly when min lambda <= -gamma1.
TEST(ClassifyPoint, OriginOfQuadraticMatchesMinLambdaRule) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int rep = 0; rep < 2000; ++rep) {
    const int d = dim(gen);
    std::vector<double> lam(d);
    for (auto& l : lam) {
      do l = u(gen); while (l == 0.0);
    }
    const double gamma1 = std::abs(u(gen)) + 1e-3;
    const auto f = sbhm::make_quadratic(lam);
    const auto c = sbhm::classify_point(f, Vector::Zero(d), {gamma1, 0.1, 1});
    const double lmin = *std::min_element(lam.begin(), lam.end());
    EXPECT_EQ(c.tag == sbhm::PointTag::StrictSaddleRegion, lmin <= -gamma1);
  }
}

TEST(StrongSaddle, Examples) {
  auto r = sbhm::check_strong_saddle(sbhm::make_quadratic({9, -7}), vec({0, 0}), 5);
  EXPECT_TRUE(r.strong);
  EXPECT_EQ(r.eigenvalues, (std::vector<double>{-7, 9}));
  EXPECT_FALSE(sbhm::check_strong_saddle(sbhm::make_quadratic({9, -1}), vec({0, 0}), 5).strong);
}

TEST(StrongSaddle, TenDimensionalCubicInstance) {
  const auto f = sbhm::make_cubic_regularized({9, 7, 5, 3, 1, -1, -3, -5, -7, -9});
  const auto r = sbhm::check_strong_saddle(f, Vector::Zero(10), 1.0);
  EXPECT_TRUE(r.strong);
  EXPECT_DOUBLE_EQ(r.eigenvalues.front(), -18.0);
  EXPECT_TRUE(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
}

TEST(StrongSaddle, RejectsNonCriticalPoint) {
  const auto f = sbhm::make_quadratic({9, -7});
  EXPECT_THROW(sbhm::check_strong_saddle(f, vec({1e-3, 0}), 1), sbhm::NotCriticalPoint);
  EXPECT_NO_THROW(sbhm::check_strong_saddle(f, vec({1e-10, 0}), 1));
}

}  // namespace
