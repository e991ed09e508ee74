#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vesp/angles.hpp"
#include "vesp/errors.hpp"
#include "vesp/motion.hpp"
#include "vesp/trajectory.hpp"

namespace vesp {

// Scaled unscented transform parameters. kappa defaults to 3 - n when NaN.
struct UtConfig {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = std::numeric_limits<double>::quiet_NaN();

  double kappa_for(int n) const {
    return std::isnan(kappa) ? 3.0 - static_cast<double>(n) : kappa;
  }

  double lambda_for(int n) const {
    if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("UtConfig: alpha must be in (0, 1]");
    return alpha * alpha * (static_cast<double>(n) + kappa_for(n)) - static_cast<double>(n);
  }
};

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// 2n+1 sigma points (one per column) with mean and covariance weights.
struct SigmaSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

namespace detail {

// Lower factor L with L L^T = sym(m). Retries with escalating diagonal
// jitter (1e-9 * trace/n, x10, three attempts) before giving up.
inline Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m, const char* where) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  if (s.cwiseAbs().maxCoeff() == 0.0) return Eigen::MatrixXd::Zero(n, n);
  double base = s.trace() / static_cast<double>(n);
  double jitter = 1e-9 * base;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd trial = s + jitter * Eigen::MatrixXd::Identity(n, n);
    llt.compute(trial);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 10.0;
  }
  throw NumericalError(std::string(where) + ": covariance factorization failed");
}

// Symmetrizes and, if needed, nudges a covariance back to PSD.
inline Eigen::MatrixXd repair_covariance(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return s;
  if (s.cwiseAbs().maxCoeff() == 0.0) return s;
  double jitter = 1e-9 * s.trace() / static_cast<double>(n);
  if (jitter > 0.0) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      Eigen::MatrixXd trial = s + jitter * Eigen::MatrixXd::Identity(n, n);
      llt.compute(trial);
      if (llt.info() == Eigen::Success) return trial;
      jitter *= 10.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

inline SigmaSet make_sigma_points(const GaussianState& g, const UtConfig& cfg) {
  const int n = static_cast<int>(g.mean.size());
  if (n == 0 || g.cov.rows() != n || g.cov.cols() != n) {
    throw ConfigError("make_sigma_points: dimension mismatch");
  }
  if (!g.mean.allFinite() || !g.cov.allFinite()) {
    throw NumericalError("make_sigma_points: non-finite belief");
  }
  const double lambda = cfg.lambda_for(n);
  const double scale = static_cast<double>(n) + lambda;
  if (!(scale > 0.0)) throw ConfigError("make_sigma_points: n + lambda must be > 0");

  Eigen::MatrixXd l = detail::sqrt_psd(scale * g.cov, "make_sigma_points");
  SigmaSet set;
  set.points.resize(n, 2 * n + 1);
  set.points.col(0) = g.mean;
  for (int i = 0; i < n; ++i) {
    set.points.col(1 + i) = g.mean + l.col(i);
    set.points.col(1 + n + i) = g.mean - l.col(i);
  }
  set.wm = Eigen::VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * scale));
  set.wc = set.wm;
  set.wm(0) = lambda / scale;
  set.wc(0) = lambda / scale + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
  return set;
}

// Mean and covariance of weighted points; rows listed in angle_dims are
// averaged circularly (atan2 of weighted sin/cos, evaluated relative to the
// first point for conditioning) and their residuals angle-wrapped.
inline GaussianState weighted_moments(const Eigen::MatrixXd& points,
                                      const Eigen::VectorXd& wm,
                                      const Eigen::VectorXd& wc,
                                      const std::vector<int>& angle_dims) {
  const Eigen::Index d = points.rows();
  const Eigen::Index m = points.cols();
  GaussianState out;
  out.mean = points * wm;
  for (int dim : angle_dims) {
    double ref = points(dim, 0);
    double s = 0.0, c = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double a = points(dim, i) - ref;
      s += wm(i) * std::sin(a);
      c += wm(i) * std::cos(a);
    }
    out.mean(dim) = wrap_angle(ref + std::atan2(s, c));
  }
  Eigen::MatrixXd resid(d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    resid.col(i) = points.col(i) - out.mean;
  }
  for (int dim : angle_dims) {
    for (Eigen::Index i = 0; i < m; ++i) {
      resid(dim, i) = angle_diff(points(dim, i), out.mean(dim));
    }
  }
  out.cov = resid * wc.asDiagonal() * resid.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

inline GaussianState unscented_transform(
    const SigmaSet& set, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const std::vector<int>& angle_dims = {}) {
  const Eigen::Index m = set.points.cols();
  Eigen::VectorXd first = f(set.points.col(0));
  Eigen::MatrixXd mapped(first.size(), m);
  mapped.col(0) = first;
  for (Eigen::Index i = 1; i < m; ++i) {
    mapped.col(i) = f(set.points.col(i));
  }
  return weighted_moments(mapped, set.wm, set.wc, angle_dims);
}

// One CTRV prediction step via the augmented state [x; va; vw], so process
// noise enters through the motion model rather than an additive Q.
inline GaussianState ukf_predict(const GaussianState& belief, const ProcessNoiseSpec& spec,
                                 double dt, const UtConfig& cfg = {}) {
  if (belief.mean.size() != 5) throw ConfigError("ukf_predict: state must be 5-dimensional");
  GaussianState aug;
  aug.mean = Eigen::VectorXd::Zero(7);
  aug.mean.head<5>() = belief.mean;
  aug.cov = Eigen::MatrixXd::Zero(7, 7);
  aug.cov.topLeftCorner<5, 5>() = belief.cov;
  aug.cov(5, 5) = spec.sigma_va;
  aug.cov(6, 6) = spec.sigma_vw;

  SigmaSet set = make_sigma_points(aug, cfg);
  Eigen::MatrixXd mapped(5, set.points.cols());
  for (Eigen::Index i = 0; i < set.points.cols(); ++i) {
    State5 s = State5::from_vec(set.points.col(i).head<5>());
    ProcessNoise nu{set.points(5, i), set.points(6, i)};
    mapped.col(i) = ctrv_step_noisy(s, nu, dt).vec();
  }
  GaussianState pred = weighted_moments(mapped, set.wm, set.wc, {2});
  pred.cov = detail::repair_covariance(pred.cov);
  return pred;
}

// Measurement update against an observed (x, y, theta) pose.
inline GaussianState ukf_update(const GaussianState& pred, const Measurement3& z,
                                const MeasurementSpec& meas, const UtConfig& cfg = {}) {
  if (pred.mean.size() != 5) throw ConfigError("ukf_update: state must be 5-dimensional");
  if (!(std::isfinite(z.x) && std::isfinite(z.y) && std::isfinite(z.theta))) {
    throw NumericalError("ukf_update: non-finite measurement");
  }
  SigmaSet set = make_sigma_points(pred, cfg);
  const Eigen::Index m = set.points.cols();
  Eigen::MatrixXd obs = set.points.topRows(3);
  GaussianState ym = weighted_moments(obs, set.wm, set.wc, {2});

  Eigen::Matrix3d py = ym.cov;
  py(0, 0) += meas.sigma_nx;
  py(1, 1) += meas.sigma_ny;
  py(2, 2) += meas.sigma_ntheta;

  Eigen::MatrixXd pxy = Eigen::MatrixXd::Zero(5, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd xr = set.points.col(i) - pred.mean;
    xr(2) = angle_diff(set.points(2, i), pred.mean(2));
    Eigen::Vector3d yr = obs.col(i) - ym.mean;
    yr(2) = angle_diff(obs(2, i), ym.mean(2));
    pxy += set.wc(i) * xr * yr.transpose();
  }

  Eigen::LLT<Eigen::Matrix3d> llt(py);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("ukf_update: innovation covariance not positive definite");
  }
  Eigen::MatrixXd k = llt.solve(pxy.transpose()).transpose();

  Eigen::Vector3d innov(z.x - ym.mean(0), z.y - ym.mean(1), angle_diff(z.theta, ym.mean(2)));
  GaussianState post;
  post.mean = pred.mean + k * innov;
  post.mean(2) = wrap_angle(post.mean(2));
  post.cov = detail::repair_covariance(pred.cov - k * py * k.transpose());
  return post;
}

// Initial belief about a vehicle first seen at measurement z: pose from the
// measurement, a nominal drive speed, zero yaw rate, broad covariance.
inline GaussianState default_init_belief(const Measurement3& z, double init_v = 8.0) {
  GaussianState g;
  g.mean = Eigen::VectorXd::Zero(5);
  g.mean << z.x, z.y, wrap_angle(z.theta), init_v, 0.0;
  g.cov = Eigen::VectorXd((Eigen::VectorXd(5) << 1.0, 1.0, 0.5, 16.0, 1.0).finished()).asDiagonal();
  return g;
}

// Runs predict/update over a measurement series; one posterior per sample.
// The first measurement is folded into the initial belief by an update only.
inline std::vector<GaussianState> filter_trajectory(
    const Series<Measurement3>& zs, const GaussianState& init, const ProcessNoiseSpec& process,
    const MeasurementSpec& meas, const UtConfig& cfg = {}) {
  if (zs.samples.empty()) throw DataError("filter_trajectory: empty measurement series");
  std::vector<GaussianState> out;
  out.reserve(zs.samples.size());
  GaussianState belief = init;
  for (std::size_t k = 0; k < zs.samples.size(); ++k) {
    try {
      if (k > 0) belief = ukf_predict(belief, process, zs.dt, cfg);
      belief = ukf_update(belief, zs.samples[k], meas, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError("filter_trajectory: sample " + std::to_string(k) + ": " + e.what());
    }
    out.push_back(belief);
  }
  return out;
}

inline std::vector<GaussianState> filter_trajectory(
    const Series<Measurement3>& zs, const ProcessNoiseSpec& process, const MeasurementSpec& meas,
    const UtConfig& cfg = {}, double init_v = 8.0) {
  if (zs.samples.empty()) throw DataError("filter_trajectory: empty measurement series");
  return filter_trajectory(zs, default_init_belief(zs.samples.front(), init_v), process, meas, cfg);
}

}  // namespace vesp
