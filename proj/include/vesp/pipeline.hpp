#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "vesp/changepoint.hpp"
#include "vesp/errors.hpp"
#include "vesp/policy.hpp"
#include "vesp/scenario.hpp"
#include "vesp/ukf.hpp"

namespace vesp {

struct PredictionConfig {
  double horizon = 2.0;
  bool use_filter = true;
  double init_v = 8.0;
  ProcessNoiseSpec process;
  MeasurementSpec measurement;
  UtConfig ut;
  ChampConfig champ;
  // When set, a Merge rollout clamps |w| to cruise-speed / ring_radius.
  std::optional<RoundaboutGeometry> geometry;
};

struct PredictionResult {
  PolicyKind current_policy = PolicyKind::LaneKeep;
  PolicyFit current_fit;
  GaussianState estimated_state;
  std::vector<State5> predicted;
  ViterbiPath path;
};

inline Series<Measurement3> pose_means(const std::vector<GaussianState>& beliefs, double dt,
                                       double t0 = 0.0) {
  Series<Measurement3> out;
  out.dt = dt;
  out.t0 = t0;
  out.samples.reserve(beliefs.size());
  for (const auto& b : beliefs) {
    out.samples.push_back(Measurement3{b.mean(0), b.mean(1), wrap_angle(b.mean(2))});
  }
  return out;
}

inline std::vector<State5> state_means(const std::vector<GaussianState>& beliefs) {
  std::vector<State5> out;
  out.reserve(beliefs.size());
  for (const auto& b : beliefs) out.push_back(State5::from_vec(b.mean));
  return out;
}

// Filter -> segment -> classify the live segment -> roll the policy forward.
// The rollout is seeded from the posterior mean so the estimated hidden v and
// w carry into the prediction; a Merge keeps the fitted ramp rate.
inline PredictionResult predict_trajectory(const Series<Measurement3>& zs,
                                           const PredictionConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw ConfigError("pipeline: horizon must be > 0");
  if (static_cast<int>(zs.samples.size()) < cfg.champ.prior.min_len) {
    throw DataError("pipeline: need at least min_len observations");
  }
  const int n_steps = static_cast<int>(std::lround(cfg.horizon / zs.dt));
  if (n_steps < 1) throw ConfigError("pipeline: horizon shorter than one step");

  PredictionResult result;
  auto beliefs = filter_trajectory(zs, cfg.process, cfg.measurement, cfg.ut, cfg.init_v);
  result.estimated_state = beliefs.back();

  const Series<Measurement3> segmentation_input =
      cfg.use_filter ? pose_means(beliefs, zs.dt, zs.t0) : zs;
  ChampDetector detector(zs.dt, cfg.champ);
  for (const Measurement3& z : segmentation_input.samples) detector.step(z);
  result.path = detector.backtrack();

  const SegmentRecord& live = result.path.segments.back();
  result.current_policy = live.kind;
  result.current_fit = live.fit;

  State5 anchor = State5::from_vec(result.estimated_state.mean);
  anchor.theta = wrap_angle(anchor.theta);
  PolicyParams rollout;
  rollout.kind = live.kind;
  rollout.v = anchor.v;
  rollout.w = anchor.w;
  rollout.w_dot = live.kind == PolicyKind::Merge ? live.fit.params.w_dot : 0.0;
  double w_cap = std::numeric_limits<double>::infinity();
  if (cfg.geometry && live.kind == PolicyKind::Merge) {
    w_cap = std::abs(anchor.v) / cfg.geometry->ring_radius;
  }
  result.predicted = forward_simulate(rollout, anchor, n_steps, zs.dt, w_cap);
  return result;
}

// Per-step Euclidean gap between the rollout and the truth slice starting
// one sample after `at`.
inline std::vector<double> evaluate_prediction(const PredictionResult& result,
                                               const LabeledTrajectory& truth, int at) {
  if (at < 0 || static_cast<std::size_t>(at) >= truth.states.size()) {
    throw DataError("evaluate_prediction: `at` outside truth range");
  }
  if (static_cast<std::size_t>(at) + result.predicted.size() >= truth.states.size()) {
    throw DataError("evaluate_prediction: horizon exceeds truth range");
  }
  std::vector<double> errors;
  errors.reserve(result.predicted.size());
  for (std::size_t k = 0; k < result.predicted.size(); ++k) {
    const State5& p = result.predicted[k];
    const State5& q = truth.states[static_cast<std::size_t>(at) + 1 + k];
    errors.push_back(std::hypot(p.x - q.x, p.y - q.y));
  }
  return errors;
}

}  // namespace vesp
