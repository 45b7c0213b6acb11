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

#ifndef SBHM_POTENTIALS_HPP
#define SBHM_POTENTIALS_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sbhm/errors.hpp"

namespace sbhm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A smooth potential on R^d with analytic first and second derivatives.
///
/// `gradient(x, g)` writes into a caller-owned buffer so the steppers can run
/// allocation-free; `g` is resized if needed.
template <class F>
concept Objective = requires(const F& f, const Vector& x, Vector& g) {
  { f.dim() } -> std::convertible_to<int>;
  { f.value(x) } -> std::convertible_to<double>;
  f.gradient(x, g);
  { f.hessian(x) } -> std::convertible_to<Matrix>;
};

namespace detail {

inline void validate_lambda(const Vector& lambda, std::string_view what) {
  require(lambda.size() > 0, std::string(what) + ": lambda must be non-empty");
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    require(std::isfinite(lambda[i]),
            std::string(what) + ": lambda entries must be finite");
    require(lambda[i] != 0.0,
            std::string(what) + ": lambda entries must be nonzero (index " +
                std::to_string(i) + ")");
  }
}

inline void check_dim(const Vector& x, Eigen::Index d) {
  require(x.size() == d, "dimension mismatch: expected " + std::to_string(d) +
                             ", got " + std::to_string(x.size()));
}

}  // namespace detail

/// f(x) = 1/2 x^T diag(lambda) x.
class Quadratic {
 public:
  explicit Quadratic(Vector lambda) : lambda_(std::move(lambda)) {
    detail::validate_lambda(lambda_, "quadratic");
  }

  int dim() const { return static_cast<int>(lambda_.size()); }
  const Vector& lambda() const { return lambda_; }

  double value(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    return 0.5 * (lambda_.array() * x.array().square()).sum();
  }

  void gradient(const Vector& x, Vector& g) const {
    g = lambda_.cwiseProduct(x);
  }

  Vector gradient(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    Vector g;
    gradient(x, g);
    return g;
  }

  Matrix hessian(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    return lambda_.asDiagonal();
  }

 private:
  Vector lambda_;
};

/// f(x) = x^T diag(lambda) x + |x|^3.
///
/// There is no 1/2 in front of the quadratic part, so the Hessian at the
/// origin is 2 diag(lambda) and the saddle curvature gamma1 = -2 min(lambda).
class CubicRegularizedQuadratic {
 public:
  // Below this radius the Hessian uses its x = 0 limit.
  static constexpr double kHessianSwitchRadius = 1e-14;

  explicit CubicRegularizedQuadratic(Vector lambda)
      : lambda_(std::move(lambda)) {
    detail::validate_lambda(lambda_, "cubic_reg_quadratic");
  }

  int dim() const { return static_cast<int>(lambda_.size()); }
  const Vector& lambda() const { return lambda_; }

  double value(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    const double r = x.norm();
    return (lambda_.array() * x.array().square()).sum() + r * r * r;
  }

  void gradient(const Vector& x, Vector& g) const {
    const double r = x.norm();
    g = (2.0 * lambda_.array() + 3.0 * r) * x.array();
  }

  Vector gradient(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    Vector g;
    gradient(x, g);
    return g;
  }

  Matrix hessian(const Vector& x) const {
    detail::check_dim(x, lambda_.size());
    Matrix h = Matrix((2.0 * lambda_).asDiagonal());
    const double r = x.norm();
    if (r >= kHessianSwitchRadius) {
      h.diagonal().array() += 3.0 * r;
      h.noalias() += (3.0 / r) * x * x.transpose();
    }
    return h;
  }

 private:
  Vector lambda_;
};

enum class ObjectiveKind { Quadratic, CubicRegularizedQuadratic };

inline std::string_view to_string(ObjectiveKind k) {
  return k == ObjectiveKind::Quadratic ? "quadratic" : "cubic_reg_quadratic";
}

inline ObjectiveKind parse_objective_kind(std::string_view s) {
  if (s == "quadratic") return ObjectiveKind::Quadratic;
  if (s == "cubic_reg_quadratic") return ObjectiveKind::CubicRegularizedQuadratic;
  throw InvalidArgument("unknown objective kind '" + std::string(s) +
                        "' (expected quadratic or cubic_reg_quadratic)");
}

/// Serializable description of a built-in objective.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Quadratic;
  std::vector<double> lambda;
};

/// Value-semantic wrapper over the built-in objectives. Immutable after
/// construction, so one instance can be shared by concurrent trials.
class ObjectiveFunction {
 public:
  ObjectiveFunction(Quadratic q) : impl_(std::move(q)) {}  // NOLINT
  ObjectiveFunction(CubicRegularizedQuadratic c) : impl_(std::move(c)) {}  // NOLINT

  ObjectiveKind kind() const {
    return std::holds_alternative<Quadratic>(impl_)
               ? ObjectiveKind::Quadratic
               : ObjectiveKind::CubicRegularizedQuadratic;
  }

  const Vector& lambda() const {
    return std::visit([](const auto& f) -> const Vector& { return f.lambda(); },
                      impl_);
  }

  int dim() const {
    return std::visit([](const auto& f) { return f.dim(); }, impl_);
  }
  double value(const Vector& x) const {
    return std::visit([&](const auto& f) { return f.value(x); }, impl_);
  }
  void gradient(const Vector& x, Vector& g) const {
    std::visit([&](const auto& f) { f.gradient(x, g); }, impl_);
  }
  Vector gradient(const Vector& x) const {
    return std::visit([&](const auto& f) { return f.gradient(x); }, impl_);
  }
  Matrix hessian(const Vector& x) const {
    return std::visit([&](const auto& f) { return f.hessian(x); }, impl_);
  }

 private:
  std::variant<Quadratic, CubicRegularizedQuadratic> impl_;
};

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline ObjectiveFunction make_quadratic(const std::vector<double>& lambda) {
  return Quadratic(to_vector(lambda));
}

inline ObjectiveFunction make_cubic_regularized(
    const std::vector<double>& lambda) {
  return CubicRegularizedQuadratic(to_vector(lambda));
}

inline ObjectiveFunction make_objective(const ObjectiveSpec& spec) {
  return spec.kind == ObjectiveKind::Quadratic
             ? make_quadratic(spec.lambda)
             : make_cubic_regularized(spec.lambda);
}

/// Eigenvalues of a symmetric matrix in ascending order.
inline Vector symmetric_eigenvalues(const Matrix& h) {
  detail::require(h.rows() == h.cols(), "matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver failed to converge");
  return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// Strict / strong saddle classification

struct SaddleClassParams {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double gamma3 = 1.0;

  void validate() const {
    detail::require(gamma1 > 0 && gamma2 > 0 && gamma3 > 0,
                    "saddle class parameters must be strictly positive");
  }
};

enum class PointTag { LargeGradient, StrictSaddleRegion, StrongConvexRegion, Violation };

inline std::string_view to_string(PointTag t) {
  switch (t) {
    case PointTag::LargeGradient: return "LargeGradient";
    case PointTag::StrictSaddleRegion: return "StrictSaddleRegion";
    case PointTag::StrongConvexRegion: return "StrongConvexRegion";
    case PointTag::Violation: return "Violation";
  }
  return "?";
}

struct PointClass {
  PointTag tag;
  double min_eigenvalue;
  double grad_norm;
};

/// Which case of the strict saddle property x falls in. Violation means f
/// fails the property at x; it is a result, not an error.
template <Objective F>
PointClass classify_point(const F& f, const Vector& x,
                          const SaddleClassParams& params) {
  params.validate();
  detail::check_dim(x, f.dim());
  Vector g;
  f.gradient(x, g);
  const double gnorm = g.norm();
  const double lmin = symmetric_eigenvalues(f.hessian(x))(0);
  PointTag tag;
  if (gnorm > params.gamma2)
    tag = PointTag::LargeGradient;
  else if (lmin <= -params.gamma1)
    tag = PointTag::StrictSaddleRegion;
  else if (lmin >= params.gamma1)
    tag = PointTag::StrongConvexRegion;
  else
    tag = PointTag::Violation;
  return {tag, lmin, gnorm};
}

inline constexpr double kCriticalPointTolerance = 1e-8;

struct StrongSaddleReport {
  bool strong;
  std::vector<double> eigenvalues;  // ascending
};

/// True iff every Hessian eigenvalue at the critical point x has modulus at
/// least gamma3.
template <Objective F>
StrongSaddleReport check_strong_saddle(const F& f, const Vector& x,
                                       double gamma3) {
  detail::require(gamma3 > 0, "gamma3 must be positive");
  detail::check_dim(x, f.dim());
  Vector g;
  f.gradient(x, g);
  if (g.norm() > kCriticalPointTolerance)
    throw NotCriticalPoint("check_strong_saddle: |grad f(x)| = " +
                           std::to_string(g.norm()) + " exceeds 1e-8");
  const Vector ev = symmetric_eigenvalues(f.hessian(x));
  StrongSaddleReport rep{true, std::vector<double>(ev.data(), ev.data() + ev.size())};
  rep.strong = std::all_of(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                           [&](double l) { return std::abs(l) >= gamma3; });
  return rep;
}

}  // namespace sbhm

#endif  // SBHM_POTENTIALS_HPP
