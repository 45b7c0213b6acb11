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

#ifndef SBHM_HAMILTONIAN_HPP
#define SBHM_HAMILTONIAN_HPP

#include <cmath>
#include <span>
#include <string>

#include "sbhm/errors.hpp"
#include "sbhm/potentials.hpp"

namespace sbhm {

/// Position-velocity pair (X, V) in R^d x R^d.
struct PhasePoint {
  Vector x;
  Vector v;

  PhasePoint() = default;
  PhasePoint(Vector x_, Vector v_) : x(std::move(x_)), v(std::move(v_)) {
    detail::require(x.size() == v.size(),
                    "phase point: position and velocity dimensions differ");
  }

  static PhasePoint zero(int d) {
    return {Vector::Zero(d), Vector::Zero(d)};
  }

  int dim() const { return static_cast<int>(x.size()); }

  /// Stacked column vector (X; V) in R^{2d}.
  Vector stacked() const {
    Vector y(2 * x.size());
    y << x, v;
    return y;
  }
};

struct FrictionParams {
  double alpha = 1.0;

  // alpha = 0 is accepted for the frictionless reduction.
  void validate() const {
    detail::require(std::isfinite(alpha) && alpha >= 0.0,
                    "friction alpha must be finite and non-negative");
  }
};

namespace detail {

template <Objective F>
void check_phase(const F& f, const PhasePoint& p) {
  require(p.x.size() == f.dim() && p.v.size() == f.dim(),
          "dimension mismatch: objective has d=" + std::to_string(f.dim()) +
              ", phase point has d=" + std::to_string(p.x.size()) + "/" +
              std::to_string(p.v.size()));
}

}  // namespace detail

/// H(X, V) = |V|^2 / 2 + f(X).
template <Objective F>
double hamiltonian(const F& f, const PhasePoint& p) {
  detail::check_phase(f, p);
  return 0.5 * p.v.squaredNorm() + f.value(p.x);
}

/// Gradient of H in the stacked ordering (dH/dX; dH/dV) = (grad f; V).
template <Objective F>
PhasePoint hamiltonian_gradient(const F& f, const PhasePoint& p) {
  detail::check_phase(f, p);
  Vector g;
  f.gradient(p.x, g);
  return {std::move(g), p.v};
}

/// Skew gradient (dH/dV, -dH/dX) = (V, -grad f(X)).
template <Objective F>
PhasePoint skew_gradient(const F& f, const PhasePoint& p) {
  detail::check_phase(f, p);
  Vector g;
  f.gradient(p.x, g);
  return {p.v, -g};
}

/// Dissipative vector field: skew gradient plus friction (0, -alpha V).
template <Objective F>
PhasePoint drift(const F& f, const PhasePoint& p, const FrictionParams& fr) {
  fr.validate();
  detail::check_phase(f, p);
  Vector g;
  f.gradient(p.x, g);
  return {p.v, -fr.alpha * p.v - g};
}

/// Linearization of the dissipative flow at (x0, 0):
///
///     A = [   0        I   ]
///         [ -hess f  -alpha I ]
struct JacobiMatrix {
  Matrix entries;
  int d = 0;
};

inline JacobiMatrix jacobi_from_hessian(const Matrix& hess, double alpha) {
  detail::require(hess.rows() == hess.cols(), "Hessian must be square");
  const auto d = hess.rows();
  JacobiMatrix a{Matrix::Zero(2 * d, 2 * d), static_cast<int>(d)};
  a.entries.topRightCorner(d, d).setIdentity();
  a.entries.bottomLeftCorner(d, d) = -hess;
  a.entries.bottomRightCorner(d, d).diagonal().setConstant(-alpha);
  return a;
}

template <Objective F>
JacobiMatrix jacobi_matrix(const F& f, const Vector& x0,
                           const FrictionParams& fr) {
  fr.validate();
  detail::check_dim(x0, f.dim());
  Vector g;
  f.gradient(x0, g);
  if (g.norm() > kCriticalPointTolerance)
    throw NotCriticalPoint("jacobi_matrix: |grad f(x0)| = " +
                           std::to_string(g.norm()) + " exceeds 1e-8");
  return jacobi_from_hessian(f.hessian(x0), fr.alpha);
}

/// |H(end) - H(start) + alpha * integral |V|^2 ds|, the violation of the
/// energy balance along a sampled deterministic trajectory. The integral is
/// the composite trapezoidal rule on the sample times.
template <Objective F>
double dissipation_residual(const F& f, const FrictionParams& fr,
                            std::span<const double> times,
                            std::span<const PhasePoint> states) {
  fr.validate();
  detail::require(times.size() == states.size(),
                  "dissipation_residual: times/states length mismatch");
  detail::require(states.size() >= 2,
                  "dissipation_residual: need at least two samples");
  double integral = 0.0;
  double prev = states.front().v.squaredNorm();
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double cur = states[i].v.squaredNorm();
    integral += 0.5 * (times[i] - times[i - 1]) * (prev + cur);
    prev = cur;
  }
  const double dh = hamiltonian(f, states.back()) - hamiltonian(f, states.front());
  return std::abs(dh + fr.alpha * integral);
}

}  // namespace sbhm

#endif  // SBHM_HAMILTONIAN_HPP
