#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "vesp/angles.hpp"
#include "vesp/errors.hpp"

namespace vesp {

// Yaw rates below this magnitude (rad/s) take the straight-line branch.
constexpr double kTurnRateEps = 1e-6;

// CTRV state: position (m), heading (rad, wrapped), speed (m/s),
// yaw rate (rad/s).
struct State5 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double w = 0.0;

  Eigen::Matrix<double, 5, 1> vec() const {
    Eigen::Matrix<double, 5, 1> s;
    s << x, y, theta, v, w;
    return s;
  }

  static State5 from_vec(const Eigen::Matrix<double, 5, 1>& s) {
    return State5{s(0), s(1), s(2), s(3), s(4)};
  }
};

// Longitudinal / yaw acceleration noise variances: (m/s^2)^2, (rad/s^2)^2.
struct ProcessNoiseSpec {
  double sigma_va = 0.01;
  double sigma_vw = 0.01;
};

// Per-step acceleration disturbance (a sampled v_a, v_w pair).
struct ProcessNoise {
  double va = 0.0;
  double vw = 0.0;
};

inline void check_finite(const State5& s, const char* where) {
  if (!(std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.theta) &&
        std::isfinite(s.v) && std::isfinite(s.w))) {
    throw NumericalError(std::string(where) + ": non-finite state");
  }
}

// Constant turn rate and velocity step over dt. Exact arc for |w| above
// kTurnRateEps, straight-line limit below.
inline State5 ctrv_step(const State5& s, double dt) {
  check_finite(s, "ctrv_step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("ctrv_step: dt must be > 0");
  State5 n = s;
  if (std::abs(s.w) > kTurnRateEps) {
    double th1 = s.theta + s.w * dt;
    double r = s.v / s.w;
    n.x = s.x + r * (std::sin(th1) - std::sin(s.theta));
    n.y = s.y + r * (-std::cos(th1) + std::cos(s.theta));
    n.theta = wrap_angle(th1);
  } else {
    n.x = s.x + s.v * std::cos(s.theta) * dt;
    n.y = s.y + s.v * std::sin(s.theta) * dt;
    n.theta = wrap_angle(s.theta + s.w * dt);
  }
  return n;
}

// ctrv_step plus the additive effect of constant accelerations (va, vw)
// acting over the step; the noise columns use the pre-step heading.
inline State5 ctrv_step_noisy(const State5& s, const ProcessNoise& nu, double dt) {
  if (!(std::isfinite(nu.va) && std::isfinite(nu.vw))) {
    throw NumericalError("ctrv_step_noisy: non-finite noise");
  }
  State5 n = ctrv_step(s, dt);
  double h = 0.5 * dt * dt;
  n.x += h * std::cos(s.theta) * nu.va;
  n.y += h * std::sin(s.theta) * nu.va;
  n.theta = wrap_angle(n.theta + h * nu.vw);
  n.v += dt * nu.va;
  n.w += dt * nu.vw;
  return n;
}

// Linear map G from (va, vw) to the state perturbation over one step.
inline Eigen::Matrix<double, 5, 2> noise_map(double theta, double dt) {
  double h = 0.5 * dt * dt;
  Eigen::Matrix<double, 5, 2> g = Eigen::Matrix<double, 5, 2>::Zero();
  g(0, 0) = h * std::cos(theta);
  g(1, 0) = h * std::sin(theta);
  g(2, 1) = h;
  g(3, 0) = dt;
  g(4, 1) = dt;
  return g;
}

// Process covariance Q = G diag(sigma_va, sigma_vw) G^T. Rank <= 2, PSD;
// its trace does not depend on theta.
inline Eigen::Matrix<double, 5, 5> process_cov(double theta, double dt,
                                               const ProcessNoiseSpec& spec) {
  if (spec.sigma_va < 0.0 || spec.sigma_vw < 0.0) {
    throw ConfigError("process_cov: noise variances must be >= 0");
  }
  Eigen::Matrix<double, 5, 2> g = noise_map(theta, dt);
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  c(0, 0) = spec.sigma_va;
  c(1, 1) = spec.sigma_vw;
  return g * c * g.transpose();
}

}  // namespace vesp
