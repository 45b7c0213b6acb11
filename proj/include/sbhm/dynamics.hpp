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

#ifndef SBHM_DYNAMICS_HPP
#define SBHM_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbhm/errors.hpp"
#include "sbhm/hamiltonian.hpp"
#include "sbhm/potentials.hpp"
#include "sbhm/random.hpp"
#include "sbhm/spectrum.hpp"

namespace sbhm {

/// Parameters shared by the stochastic heavy-ball iteration and its
/// rescaled SDE limit
///
///     dX = V dt + sqrt(eps) sigma1 dW1
///     dV = (-alpha V - grad f(X)) dt + sqrt(eps) sigma2 dW2.
///
/// `sigma1` absent means no position noise.
struct DynamicsParams {
  double alpha = 1.0;
  double epsilon = 0.01;
  std::optional<Matrix> sigma1;
  Matrix sigma2;

  /// sigma2 = sigma2_scale I, and sigma1 = sigma1_scale I when given.
  static DynamicsParams isotropic(int d, double alpha, double epsilon,
                                  double sigma2_scale = 1.0,
                                  std::optional<double> sigma1_scale = {}) {
    DynamicsParams p;
    p.alpha = alpha;
    p.epsilon = epsilon;
    p.sigma2 = sigma2_scale * Matrix::Identity(d, d);
    if (sigma1_scale) p.sigma1 = *sigma1_scale * Matrix::Identity(d, d);
    return p;
  }

  int dim() const { return static_cast<int>(sigma2.rows()); }

  void validate(int d) const {
    detail::require(std::isfinite(alpha) && alpha >= 0.0,
                    "dynamics: alpha must be finite and >= 0");
    detail::require(epsilon >= 0.0 && epsilon < 1.0,
                    "dynamics: epsilon must lie in [0, 1)");
    detail::require(sigma2.rows() == d && sigma2.cols() == d,
                    "dynamics: sigma2 must be d x d");
    if (sigma1)
      detail::require(sigma1->rows() == d && sigma1->cols() == d,
                      "dynamics: sigma1 must be d x d");
  }
};

enum class Scheme { EulerMaruyama, RK4Deterministic, StochasticHeavyBall };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::EulerMaruyama: return "EulerMaruyama";
    case Scheme::RK4Deterministic: return "RK4Deterministic";
    case Scheme::StochasticHeavyBall: return "StochasticHeavyBall";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "EulerMaruyama") return Scheme::EulerMaruyama;
  if (s == "RK4Deterministic") return Scheme::RK4Deterministic;
  if (s == "StochasticHeavyBall") return Scheme::StochasticHeavyBall;
  throw InvalidArgument("unknown integration scheme '" + std::string(s) + "'");
}

struct IntegratorConfig {
  double step = 0.01;  // h in the rescaled clock; unused by StochasticHeavyBall
  std::uint64_t max_steps = 100'000'000;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::EulerMaruyama;
  std::uint64_t record_stride = 1;

  void validate() const {
    detail::require(step > 0.0 && std::isfinite(step), "integrator: step must be > 0");
    detail::require(max_steps >= 1, "integrator: max_steps must be >= 1");
    detail::require(record_stride >= 1, "integrator: record_stride must be >= 1");
  }
};

/// Default SDE step: resolves the fastest oscillation of a Hessian whose
/// largest eigenvalue is lambda_max.
inline double default_sde_step(double lambda_max) {
  return lambda_max > 0.0 ? std::min(0.01, 0.1 / std::sqrt(lambda_max)) : 0.01;
}

enum class Termination { StoppingCondition, MaxSteps };

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  Termination terminated_by = Termination::MaxSteps;
  std::uint64_t steps = 0;  // steps actually taken
};

// ---------------------------------------------------------------------------
// In-place kernels. `grad` is scratch space.

namespace detail {

inline void require_momentum(double epsilon, double alpha) {
  require(alpha * epsilon < 1.0,
          "heavy-ball: alpha * epsilon must be < 1 (momentum coefficient in [0, 1])");
}

// v <- (1 - alpha eps) v - eps (grad f(x) + gnoise);  x <- x + eps (v + xnoise)
template <Objective F>
void heavy_ball_kernel(const F& f, PhasePoint& s, double epsilon, double alpha,
                       Vector& grad, const Vector* gnoise, const Vector* xnoise) {
  f.gradient(s.x, grad);
  if (gnoise) grad += *gnoise;
  s.v = (1.0 - alpha * epsilon) * s.v - epsilon * grad;
  if (xnoise)
    s.x += epsilon * (s.v + *xnoise);
  else
    s.x += epsilon * s.v;
}

inline void fill_normal(Vector& out, Eigen::Index d, NormalSource auto& rng) {
  out.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = rng.normal();
}

struct NoiseScratch {
  Vector xi;
  Vector gnoise;
  Vector xnoise;
};

// One stochastic heavy-ball iteration; draws xi2 (gradient noise) then xi1.
template <Objective F, NormalSource R>
void stochastic_heavy_ball_kernel(const F& f, PhasePoint& s,
                                  const DynamicsParams& p, R& rng, Vector& grad,
                                  NoiseScratch& ns) {
  const auto d = s.x.size();
  fill_normal(ns.xi, d, rng);
  ns.gnoise.noalias() = p.sigma2 * ns.xi;
  const Vector* xn = nullptr;
  if (p.sigma1) {
    fill_normal(ns.xi, d, rng);
    ns.xnoise.noalias() = *p.sigma1 * ns.xi;
    xn = &ns.xnoise;
  }
  heavy_ball_kernel(f, s, p.epsilon, p.alpha, grad, &ns.gnoise, xn);
}

// Euler-Maruyama on the rescaled SDE; draws xi2 then xi1.
template <Objective F, NormalSource R>
void euler_maruyama_kernel(const F& f, PhasePoint& s, const DynamicsParams& p,
                           double h, R& rng, Vector& grad, NoiseScratch& ns) {
  const auto d = s.x.size();
  const double amp = std::sqrt(p.epsilon * h);
  fill_normal(ns.xi, d, rng);
  ns.gnoise.noalias() = p.sigma2 * ns.xi;
  const bool pos_noise = p.sigma1.has_value();
  if (pos_noise) {
    fill_normal(ns.xi, d, rng);
    ns.xnoise.noalias() = *p.sigma1 * ns.xi;
  }
  f.gradient(s.x, grad);
  s.x += h * s.v;
  if (pos_noise) s.x += amp * ns.xnoise;
  s.v += h * (-p.alpha * s.v - grad) + amp * ns.gnoise;
}

template <Objective F>
void rk4_kernel(const F& f, PhasePoint& s, double alpha, double h, Vector& grad) {
  auto field = [&](const Vector& x, const Vector& v, Vector& dx, Vector& dv) {
    f.gradient(x, grad);
    dx = v;
    dv = -alpha * v - grad;
  };
  Vector k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
  field(s.x, s.v, k1x, k1v);
  field(s.x + 0.5 * h * k1x, s.v + 0.5 * h * k1v, k2x, k2v);
  field(s.x + 0.5 * h * k2x, s.v + 0.5 * h * k2v, k3x, k3v);
  field(s.x + h * k3x, s.v + h * k3v, k4x, k4v);
  s.x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  s.v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single steps

/// Deterministic heavy ball: v' = (1 - alpha eps) v - eps grad f(x), then
/// x' = x + eps v'.
template <Objective F>
PhasePoint heavy_ball_step(const F& f, const PhasePoint& state, double epsilon,
                           double alpha) {
  detail::check_phase(f, state);
  detail::require_momentum(epsilon, alpha);
  PhasePoint s = state;
  Vector grad;
  detail::heavy_ball_kernel(f, s, epsilon, alpha, grad, nullptr, nullptr);
  return s;
}

/// Stochastic heavy ball:
///   v' = (1 - alpha eps) v - eps (grad f(x) + sigma2 xi2)
///   x' = x + eps (v' + sigma1 xi1)
/// xi2 is drawn before xi1.
template <Objective F, NormalSource R>
PhasePoint stochastic_heavy_ball_step(const F& f, const PhasePoint& state,
                                      const DynamicsParams& params, R& rng) {
  detail::check_phase(f, state);
  params.validate(f.dim());
  detail::require_momentum(params.epsilon, params.alpha);
  PhasePoint s = state;
  Vector grad;
  detail::NoiseScratch ns;
  detail::stochastic_heavy_ball_kernel(f, s, params, rng, grad, ns);
  return s;
}

/// X' = X + h V + sqrt(eps h) sigma1 xi1
/// V' = V + h (-alpha V - grad f(X)) + sqrt(eps h) sigma2 xi2
/// xi2 is drawn before xi1.
template <Objective F, NormalSource R>
PhasePoint sde_step_euler_maruyama(const F& f, const PhasePoint& state,
                                   const DynamicsParams& params, double h, R& rng) {
  detail::check_phase(f, state);
  params.validate(f.dim());
  detail::require(h > 0.0, "sde step: h must be positive");
  PhasePoint s = state;
  Vector grad;
  detail::NoiseScratch ns;
  detail::euler_maruyama_kernel(f, s, params, h, rng, grad, ns);
  return s;
}

/// Classical RK4 step of the deterministic dissipative flow.
template <Objective F>
PhasePoint rk4_step(const F& f, const PhasePoint& state, double alpha, double h) {
  detail::check_phase(f, state);
  detail::require(h > 0.0, "rk4 step: h must be positive");
  PhasePoint s = state;
  Vector grad;
  detail::rk4_kernel(f, s, alpha, h, grad);
  return s;
}

// ---------------------------------------------------------------------------
// Trajectories

/// Steps `initial` under config.scheme until `stop(t, state)` holds or
/// max_steps is reached. Samples every record_stride steps plus the final
/// state. StochasticHeavyBall runs on the iteration clock (t = k); the other
/// schemes on the rescaled clock (t = k h).
template <Objective F, class Stop>
  requires std::predicate<Stop&, double, const PhasePoint&>
Trajectory simulate(const F& f, const PhasePoint& initial,
                    const DynamicsParams& params, const IntegratorConfig& config,
                    Stop stop) {
  detail::check_phase(f, initial);
  params.validate(f.dim());
  config.validate();
  if (config.scheme == Scheme::StochasticHeavyBall)
    detail::require_momentum(params.epsilon, params.alpha);

  const double dt = config.scheme == Scheme::StochasticHeavyBall ? 1.0 : config.step;
  Rng rng(config.seed);
  Vector grad;
  detail::NoiseScratch ns;
  PhasePoint s = initial;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(s);
  if (stop(0.0, s)) {
    traj.terminated_by = Termination::StoppingCondition;
    return traj;
  }
  for (std::uint64_t n = 1; n <= config.max_steps; ++n) {
    switch (config.scheme) {
      case Scheme::EulerMaruyama:
        detail::euler_maruyama_kernel(f, s, params, config.step, rng, grad, ns);
        break;
      case Scheme::RK4Deterministic:
        detail::rk4_kernel(f, s, params.alpha, config.step, grad);
        break;
      case Scheme::StochasticHeavyBall:
        detail::stochastic_heavy_ball_kernel(f, s, params, rng, grad, ns);
        break;
    }
    const double t = static_cast<double>(n) * dt;
    const bool done = stop(t, s);
    if (done || n == config.max_steps || n % config.record_stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(s);
    }
    if (done) {
      traj.terminated_by = Termination::StoppingCondition;
      traj.steps = n;
      return traj;
    }
  }
  traj.terminated_by = Termination::MaxSteps;
  traj.steps = config.max_steps;
  return traj;
}

template <Objective F>
double dissipation_residual(const F& f, const FrictionParams& fr,
                            const Trajectory& traj) {
  return dissipation_residual(f, fr, std::span<const double>(traj.times),
                              std::span<const PhasePoint>(traj.states));
}

/// CSV with header t,x_0..x_{d-1},v_0..v_{d-1}; every `stride`-th sample.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 std::size_t stride = 1) {
  detail::require(stride >= 1, "trajectory csv: stride must be >= 1");
  const int d = traj.states.empty() ? 0 : traj.states.front().dim();
  os << "t";
  for (int i = 0; i < d; ++i) os << ",x_" << i;
  for (int i = 0; i < d; ++i) os << ",v_" << i;
  os << '\n';
  const auto old_prec = os.precision(17);
  for (std::size_t n = 0; n < traj.states.size(); n += stride) {
    const auto& s = traj.states[n];
    os << traj.times[n];
    for (int i = 0; i < d; ++i) os << ',' << s.x[i];
    for (int i = 0; i < d; ++i) os << ',' << s.v[i];
    os << '\n';
  }
  os.precision(old_prec);
}

// ---------------------------------------------------------------------------
// Exact solution of the scalar linear saddle
//
//     X'' + alpha X' + lambda1 X = sigma dW/dt,   lambda1 < 0,
//
// X(t) = e^{mu+ t} (C1 + sigma/dmu I+(t)) + e^{mu- t} (C2 - sigma/dmu I-(t)),
// I+-(t) = int_0^t e^{-mu+- s} dW(s), dmu = mu+ - mu-.

namespace detail {

// int_a^b e^{c s} ds
inline double exp_integral(double c, double a, double b) {
  if (c == 0.0) return b - a;
  return std::exp(c * a) * std::expm1(c * (b - a)) / c;
}

}  // namespace detail

/// One sample path of X on `t_grid` (non-decreasing, t >= 0) started from
/// (x0, v0) at t = 0. The Ito integrals advance by exact jointly Gaussian
/// increments, two normals per grid interval.
template <NormalSource R>
std::vector<double> linear_sde_exact_1d(double lambda1, double alpha, double sigma,
                                        std::span<const double> t_grid, R& rng,
                                        double x0 = 0.0, double v0 = 0.0) {
  detail::require(lambda1 < 0.0, "linear_sde_exact_1d: lambda1 must be negative");
  detail::require(alpha >= 0.0 && sigma >= 0.0,
                  "linear_sde_exact_1d: alpha and sigma must be non-negative");
  const auto [mp_c, mm_c] = mu_pair(lambda1, alpha);
  const double mp = mp_c.real();
  const double mm = mm_c.real();
  const double dmu = mp - mm;
  const double c1 = (v0 - mm * x0) / dmu;
  const double c2 = (mp * x0 - v0) / dmu;

  std::vector<double> out;
  out.reserve(t_grid.size());
  double ip = 0.0, im = 0.0, t_prev = 0.0;
  for (double t : t_grid) {
    detail::require(t >= t_prev, "linear_sde_exact_1d: t_grid must be non-decreasing from 0");
    if (t > t_prev) {
      const double vp = detail::exp_integral(-2.0 * mp, t_prev, t);
      const double vm = detail::exp_integral(-2.0 * mm, t_prev, t);
      const double cv = detail::exp_integral(-(mp + mm), t_prev, t);
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double sp = std::sqrt(vp), sm = std::sqrt(vm);
      const double rho = std::clamp(cv / (sp * sm), -1.0, 1.0);
      ip += sp * z1;
      im += sm * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
    }
    out.push_back(std::exp(mp * t) * (c1 + sigma * ip / dmu) +
                  std::exp(mm * t) * (c2 - sigma * im / dmu));
    t_prev = t;
  }
  return out;
}

}  // namespace sbhm

#endif  // SBHM_DYNAMICS_HPP
