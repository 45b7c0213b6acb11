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

#ifndef SBHM_SPECTRUM_HPP
#define SBHM_SPECTRUM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbhm/errors.hpp"
#include "sbhm/hamiltonian.hpp"
#include "sbhm/potentials.hpp"

namespace sbhm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Roots of mu^2 + alpha mu + lambda = 0, larger real part first. A zero
/// discriminant returns the repeated root -alpha/2 twice.
inline std::pair<Complex, Complex> mu_pair(double lambda, double alpha) {
  detail::require(std::isfinite(lambda) && std::isfinite(alpha) && alpha >= 0.0,
                  "mu_pair: need finite lambda and alpha >= 0");
  const double disc = alpha * alpha - 4.0 * lambda;
  if (disc > 0.0) {
    // mu- carries no cancellation; mu+ follows from mu+ mu- = lambda.
    const double minus = -0.5 * (alpha + std::sqrt(disc));
    const double plus = minus != 0.0 ? lambda / minus : 0.0;
    return {Complex(plus, 0.0), Complex(minus, 0.0)};
  }
  if (disc == 0.0) return {Complex(-0.5 * alpha, 0.0), Complex(-0.5 * alpha, 0.0)};
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(-0.5 * alpha, im), Complex(-0.5 * alpha, -im)};
}

/// Largest unstable rate at a saddle whose most negative Hessian eigenvalue
/// is lambda1.
inline double mu0(double lambda1, double alpha) {
  detail::require(lambda1 < 0.0, "mu0: lambda1 must be negative");
  detail::require(std::isfinite(alpha) && alpha >= 0.0, "mu0: alpha must be >= 0");
  return mu_pair(lambda1, alpha).first.real();
}

/// k (sqrt(alpha^2 + 4 gamma1) + alpha) / (4 gamma1): the predicted
/// coefficient of eps^-1 ln(eps^-1) in the mean hitting time of a local
/// minimum through k saddles of curvature at least gamma1.
inline double predicted_exit_rate(int k, double gamma1, double alpha) {
  detail::require(k > 0 && gamma1 > 0.0 && alpha > 0.0,
                  "predicted_exit_rate: k, gamma1 and alpha must be positive");
  return k * (std::sqrt(alpha * alpha + 4.0 * gamma1) + alpha) / (4.0 * gamma1);
}

enum class BlockCase { RealUnstable, RealStableDistinct, CriticallyDamped, ComplexConjugate };

inline std::string_view to_string(BlockCase c) {
  switch (c) {
    case BlockCase::RealUnstable: return "RealUnstable";
    case BlockCase::RealStableDistinct: return "RealStableDistinct";
    case BlockCase::CriticallyDamped: return "CriticallyDamped";
    case BlockCase::ComplexConjugate: return "ComplexConjugate";
  }
  return "?";
}

struct EigenBlockCase {
  BlockCase tag;
  double lambda;
  Complex mu_plus;
  Complex mu_minus;

  /// The 2x2 block A_i acting on (u_i+, u_i-).
  Eigen::Matrix2cd block() const {
    Eigen::Matrix2cd b;
    b << mu_plus, Complex(tag == BlockCase::CriticallyDamped ? 1.0 : 0.0, 0.0),
        Complex(0.0), mu_minus;
    return b;
  }
};

inline constexpr double kZeroEigenvalueTolerance = 1e-10;

/// Band in which lambda is treated as exactly alpha^2 / 4.
inline bool is_critically_damped(double lambda, double alpha) {
  return std::abs(lambda - 0.25 * alpha * alpha) <=
         1e-9 * std::max(1.0, alpha * alpha);
}

inline EigenBlockCase classify_block(double lambda, double alpha) {
  if (lambda < 0.0) {
    auto [p, m] = mu_pair(lambda, alpha);
    return {BlockCase::RealUnstable, lambda, p, m};
  }
  if (is_critically_damped(lambda, alpha)) {
    const Complex r(-0.5 * alpha, 0.0);
    return {BlockCase::CriticallyDamped, lambda, r, r};
  }
  auto [p, m] = mu_pair(lambda, alpha);
  return {lambda < 0.25 * alpha * alpha ? BlockCase::RealStableDistinct
                                        : BlockCase::ComplexConjugate,
          lambda, p, m};
}

/// Eigen-structure of A = [0 I; -hess -alpha I] at a strong saddle.
struct SaddleSpectrum {
  int d = 0;
  double alpha = 0.0;
  std::vector<EigenBlockCase> blocks;  // ordered by lambda ascending
  int k = 0;                           // saddle index
  double mu0 = 0.0;
  ComplexMatrix basis;                 // P = (u1+, u1-, ..., ud+, ud-)
  Matrix hessian_eigenvectors;         // orthonormal xi_i as columns
  double basis_condition = 0.0;        // 2-norm condition number of P

  ComplexMatrix block_diagonal() const {
    ComplexMatrix b = ComplexMatrix::Zero(2 * d, 2 * d);
    for (int i = 0; i < d; ++i) b.block<2, 2>(2 * i, 2 * i) = blocks[i].block();
    return b;
  }

  JacobiMatrix jacobi(const Matrix& hess) const {
    return jacobi_from_hessian(hess, alpha);
  }
};

/// max |A P - P diag(A_1, ..., A_d)|.
inline double block_residual(const SaddleSpectrum& s, const Matrix& a) {
  const ComplexMatrix ac = a.cast<Complex>();
  return (ac * s.basis - s.basis * s.block_diagonal()).cwiseAbs().maxCoeff();
}

/// Builds P and the block structure of the Jacobi matrix from the Hessian
/// eigenpairs (lambda_i, xi_i):
///   distinct roots      u_i+- = (xi_i; mu_i+- xi_i)
///   lambda = alpha^2/4  u_i+ = (xi_i; -alpha/2 xi_i), u_i- = a_i with
///                       (A + alpha/2 I) a_i = u_i+, a_i orthogonal to u_i+.
inline SaddleSpectrum saddle_eigensystem(const Matrix& hess, double alpha) {
  detail::require(hess.rows() == hess.cols() && hess.rows() > 0,
                  "saddle_eigensystem: Hessian must be square and non-empty");
  detail::require((hess - hess.transpose()).cwiseAbs().maxCoeff() <=
                      1e-12 * std::max(1.0, hess.cwiseAbs().maxCoeff()),
                  "saddle_eigensystem: Hessian must be symmetric");
  detail::require(std::isfinite(alpha) && alpha >= 0.0,
                  "saddle_eigensystem: alpha must be >= 0");

  Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
  if (es.info() != Eigen::Success)
    throw NumericalError("saddle_eigensystem: eigensolver failed");
  const Vector& lam = es.eigenvalues();
  const Matrix& xi = es.eigenvectors();
  const int d = static_cast<int>(hess.rows());

  for (int i = 0; i < d; ++i) {
    if (std::abs(lam[i]) < kZeroEigenvalueTolerance)
      throw ZeroEigenvalue("saddle_eigensystem: Hessian eigenvalue " +
                           std::to_string(lam[i]) + " is zero to 1e-10");
  }
  if (lam[0] > 0.0)
    throw NoUnstableDirection(
        "saddle_eigensystem: all Hessian eigenvalues are positive (a minimum)");

  SaddleSpectrum s;
  s.d = d;
  s.alpha = alpha;
  s.hessian_eigenvectors = xi;
  s.basis = ComplexMatrix::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    EigenBlockCase blk = classify_block(lam[i], alpha);
    const Eigen::VectorXcd x = xi.col(i).cast<Complex>();
    auto col_plus = s.basis.col(2 * i);
    auto col_minus = s.basis.col(2 * i + 1);
    col_plus.head(d) = x;
    col_plus.tail(d) = blk.mu_plus * x;
    if (blk.tag == BlockCase::CriticallyDamped) {
      // a = (c xi; (1 - alpha c / 2) xi) solves (A + alpha/2) a = u+ for any
      // c; c below is the minimum-norm choice.
      const double c = 0.5 * alpha / (1.0 + 0.25 * alpha * alpha);
      col_minus.head(d) = c * x;
      col_minus.tail(d) = (1.0 - 0.5 * alpha * c) * x;
    } else {
      col_minus.head(d) = x;
      col_minus.tail(d) = blk.mu_minus * x;
    }
    if (blk.tag == BlockCase::RealUnstable) ++s.k;
    s.blocks.push_back(blk);
  }
  s.mu0 = mu0(lam[0], alpha);

  Eigen::JacobiSVD<ComplexMatrix> svd(s.basis);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  s.basis_condition =
      smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return s;
}

/// ln(1/eps) / (2 mu0): predicted mean exit time from the saddle
/// neighbourhood in the rescaled clock.
inline double exit_time_bound(double mu0_value, double epsilon) {
  detail::require(epsilon > 0.0 && epsilon < 1.0,
                  "exit_time_bound: epsilon must lie in (0, 1)");
  detail::require(mu0_value > 0.0, "exit_time_bound: mu0 must be positive");
  return std::log(1.0 / epsilon) / (2.0 * mu0_value);
}

inline double exit_time_bound(const SaddleSpectrum& s, double epsilon) {
  return exit_time_bound(s.mu0, epsilon);
}

}  // namespace sbhm

#endif  // SBHM_SPECTRUM_HPP
