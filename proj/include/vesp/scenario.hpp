#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vesp/angles.hpp"
#include "vesp/errors.hpp"
#include "vesp/motion.hpp"
#include "vesp/rng.hpp"
#include "vesp/trajectory.hpp"

namespace vesp {

// Circular intersection with radial legs; vehicles circulate
// counterclockwise and enter/exit along lines tangent to the ring.
struct RoundaboutGeometry {
  double cx = 0.0;
  double cy = 0.0;
  double ring_radius = 32.0;
  std::vector<double> leg_angles = {0.0, M_PI / 2.0, M_PI, 3.0 * M_PI / 2.0};
  double leg_length = 88.0;
  double transition_length = 24.0;
};

struct Route {
  int entry_leg = 0;
  int exit_leg = 2;
  double cruise = 8.0;
  double dt = 0.1;
};

// Ground-truth trajectory with per-sample policy labels. changepoints[i] is
// the index of the last sample of segment i.
struct LabeledTrajectory {
  double dt = 0.1;
  double t0 = 0.0;
  std::vector<State5> states;
  std::vector<PolicyKind> labels;
  std::vector<int> changepoints;
};

namespace detail {

inline void validate_geometry(const RoundaboutGeometry& g) {
  if (!(g.ring_radius > 0.0)) throw ConfigError("geometry: ring_radius must be > 0");
  if (g.leg_angles.empty()) throw ConfigError("geometry: at least one leg required");
  if (!(g.leg_length > 0.0)) throw ConfigError("geometry: leg_length must be > 0");
  if (!(g.transition_length > 0.0) || g.transition_length >= g.leg_length) {
    throw ConfigError("geometry: need 0 < transition_length < leg_length");
  }
}

}  // namespace detail

// Composes straight approach, entry blend, ring arc, exit blend and
// straight exit at constant speed. Blends are counter-steer swings: the yaw
// rate jumps to -2 v/R and ramps linearly up to the ring rate entering, and
// jumps to +2 v/R and ramps down to -v/R leaving. The two swings cancel in
// heading, so the ring arc alone turns the vehicle between leg directions.
// The approach runs along the ring tangent line and ends exactly at the
// tangent point of the entry heading.
inline LabeledTrajectory build_route_path(const RoundaboutGeometry& geom, const Route& route) {
  detail::validate_geometry(geom);
  const int n_legs = static_cast<int>(geom.leg_angles.size());
  if (route.entry_leg < 0 || route.entry_leg >= n_legs || route.exit_leg < 0 ||
      route.exit_leg >= n_legs) {
    throw ConfigError("route: leg index out of range");
  }
  if (!(route.cruise > 0.0)) throw ConfigError("route: cruise must be > 0");
  if (!(route.dt > 0.0)) throw ConfigError("route: dt must be > 0");

  const double v = route.cruise;
  const double dt = route.dt;
  const double r = geom.ring_radius;
  const double w_ring = v / r;
  const double step_len = v * dt;

  const int n_t = std::max(1, static_cast<int>(std::lround(geom.transition_length / step_len)));
  const int n_a =
      std::max(1, static_cast<int>(std::lround((geom.leg_length - geom.transition_length) / step_len)));

  const double d_in = wrap_angle(geom.leg_angles[route.entry_leg] + M_PI);
  const double d_out = wrap_angle(geom.leg_angles[route.exit_leg]);
  const double psi_entry = wrap_angle(d_in - M_PI / 2.0);
  const double qx = geom.cx + r * std::cos(psi_entry);
  const double qy = geom.cy + r * std::sin(psi_entry);

  LabeledTrajectory traj;
  traj.dt = dt;
  State5 s;
  s.x = qx - static_cast<double>(n_a) * step_len * std::cos(d_in);
  s.y = qy - static_cast<double>(n_a) * step_len * std::sin(d_in);
  s.theta = d_in;
  s.v = v;
  s.w = 0.0;
  traj.states.push_back(s);
  traj.labels.push_back(PolicyKind::LaneKeep);

  auto advance = [&](int n, PolicyKind label, auto&& w_after) {
    for (int j = 1; j <= n; ++j) {
      s = ctrv_step(s, dt);
      s.w = w_after(j);
      traj.states.push_back(s);
      traj.labels.push_back(label);
    }
  };

  // Stored w is the rate applied on the step out of that sample, so phase
  // handoffs assign the next phase's initial rate to the boundary sample.
  const double slope = 3.0 * w_ring / static_cast<double>(std::max(1, n_t - 1));
  advance(n_a, PolicyKind::LaneKeep,
          [&](int j) { return j < n_a ? 0.0 : -2.0 * w_ring; });
  advance(n_t, PolicyKind::Merge, [&](int j) {
    return j < n_t ? -2.0 * w_ring + slope * static_cast<double>(j) : w_ring;
  });

  // Size the ring arc so the exit blend lands on the outbound leg heading.
  // The swings turn by -+ w_ring * dt * n_t / 2 and cancel, so the ring
  // covers the whole leg separation; a vanishing span means a full loop.
  const double exit_gain = 0.5 * w_ring * dt * static_cast<double>(n_t);
  double span = wrap_angle(d_out - exit_gain - s.theta);
  if (span < 0.0) span += kTwoPi;
  if (span < 0.1) span += kTwoPi;
  const int n_r = std::max(1, static_cast<int>(std::lround(span / (w_ring * dt))));

  advance(n_r, PolicyKind::LaneKeep,
          [&](int j) { return j < n_r ? w_ring : 2.0 * w_ring; });
  advance(n_t, PolicyKind::Merge, [&](int j) {
    return j < n_t ? 2.0 * w_ring - slope * static_cast<double>(j) : 0.0;
  });
  advance(n_a, PolicyKind::LaneKeep, [](int) { return 0.0; });

  traj.changepoints = {n_a, n_a + n_t, n_a + n_t + n_r, n_a + 2 * n_t + n_r};
  return traj;
}

// Re-rolls the trajectory through ctrv_step_noisy with i.i.d. Gaussian
// accelerations, keeping the deterministic yaw-rate profile as an offset.
// Labels and changepoints are preserved.
inline LabeledTrajectory inject_process_noise(const LabeledTrajectory& traj,
                                              const ProcessNoiseSpec& spec, std::uint64_t seed) {
  if (traj.states.empty()) throw DataError("inject_process_noise: empty trajectory");
  if (spec.sigma_va < 0.0 || spec.sigma_vw < 0.0) {
    throw ConfigError("inject_process_noise: variances must be >= 0");
  }
  Rng rng(seed);
  const double sd_va = std::sqrt(spec.sigma_va);
  const double sd_vw = std::sqrt(spec.sigma_vw);
  LabeledTrajectory out = traj;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    ProcessNoise nu{rng.gaussian(0.0, sd_va), rng.gaussian(0.0, sd_vw)};
    State5 next = ctrv_step_noisy(out.states[k], nu, traj.dt);
    next.v += traj.states[k + 1].v - traj.states[k].v;
    next.w += traj.states[k + 1].w - traj.states[k].w;
    if (next.v < 0.0) next.v = 0.0;
    out.states[k + 1] = next;
  }
  return out;
}

// Projects states to noisy pose observations.
inline Series<Measurement3> observe(const LabeledTrajectory& traj, const MeasurementSpec& meas,
                                    std::uint64_t seed) {
  if (traj.states.empty()) throw DataError("observe: empty trajectory");
  if (meas.sigma_nx < 0.0 || meas.sigma_ny < 0.0 || meas.sigma_ntheta < 0.0) {
    throw ConfigError("observe: variances must be >= 0");
  }
  Rng rng(seed);
  const double sx = std::sqrt(meas.sigma_nx);
  const double sy = std::sqrt(meas.sigma_ny);
  const double st = std::sqrt(meas.sigma_ntheta);
  Series<Measurement3> out;
  out.dt = traj.dt;
  out.samples.reserve(traj.states.size());
  for (const State5& s : traj.states) {
    Measurement3 z;
    z.x = s.x + rng.gaussian(0.0, sx);
    z.y = s.y + rng.gaussian(0.0, sy);
    z.theta = wrap_angle(s.theta + rng.gaussian(0.0, st));
    out.samples.push_back(z);
  }
  return out;
}

// Projection without noise, for clean-input experiments.
inline Series<Measurement3> project_poses(const LabeledTrajectory& traj) {
  Series<Measurement3> out;
  out.dt = traj.dt;
  out.samples.reserve(traj.states.size());
  for (const State5& s : traj.states) {
    out.samples.push_back(Measurement3{s.x, s.y, s.theta});
  }
  return out;
}

}  // namespace vesp
