#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "vesp/angles.hpp"
#include "vesp/errors.hpp"
#include "vesp/motion.hpp"
#include "vesp/trajectory.hpp"

namespace vesp {

// Parameters of a rolled-out policy. LaneKeep holds (v, w) constant; Merge
// holds v and ramps the yaw rate as w(t) = w + w_dot * t.
struct PolicyParams {
  PolicyKind kind = PolicyKind::LaneKeep;
  double v = 0.0;
  double w = 0.0;
  double w_dot = 0.0;
};

inline int param_count(PolicyKind k) { return k == PolicyKind::LaneKeep ? 2 : 3; }

// Scale (std dev, meters/radians) of the per-channel Gaussian used to score
// segment fits.
struct LikelihoodSpec {
  double sigma_lik = 0.45;
};

struct PolicyFit {
  PolicyParams params;
  double sse = 0.0;
  double log_lik = 0.0;
  double bic = 0.0;
  bool degenerate = false;
};

// Rolls the policy forward for n_steps of dt, starting one step after
// `start` (the start state itself is not emitted). w_cap bounds |w| during
// the rollout; the default leaves it unbounded.
inline std::vector<State5> forward_simulate(const PolicyParams& params, const State5& start,
                                            int n_steps, double dt,
                                            double w_cap = std::numeric_limits<double>::infinity()) {
  if (n_steps < 0) throw ConfigError("forward_simulate: n_steps must be >= 0");
  if (!(w_cap >= 0.0)) throw ConfigError("forward_simulate: w_cap must be >= 0");
  std::vector<State5> out;
  out.reserve(static_cast<std::size_t>(n_steps));
  State5 s = start;
  s.v = params.v;
  s.w = std::clamp(params.w, -w_cap, w_cap);
  for (int k = 0; k < n_steps; ++k) {
    s = ctrv_step(s, dt);
    if (params.kind == PolicyKind::Merge) {
      s.w = std::clamp(params.w + params.w_dot * static_cast<double>(k + 1) * dt, -w_cap, w_cap);
    }
    out.push_back(s);
  }
  return out;
}

namespace detail {

// Streaming sum-of-squares between a CTRV arc rollout and observations,
// anchored at the first observation's pose. Positions enter linearly in the
// speed, so the speed minimizing the position SSE is solved in closed form
// from the accumulated statistics. Heading increments use rotor
// recurrences; no trig per sample.
class ArcSse {
 public:
  ArcSse(const Measurement3& anchor, double dt, double w0, double w_dot)
      : px_(anchor.x),
        py_(anchor.y),
        dt_(dt),
        w_dot_(w_dot),
        wj_(w0),
        theta_acc_(wrap_angle(anchor.theta)) {
    cj_ = std::cos(theta_acc_);
    sj_ = std::sin(theta_acc_);
    dc_ = std::cos(w0 * dt);
    ds_ = std::sin(w0 * dt);
    pc_ = std::cos(w_dot * dt * dt);
    ps_ = std::sin(w_dot * dt * dt);
  }

  void extend(const Measurement3& o) {
    const double delta = wj_ * dt_;
    const double cn = cj_ * dc_ - sj_ * ds_;
    const double sn = sj_ * dc_ + cj_ * ds_;
    if (std::abs(wj_) > kTurnRateEps) {
      ux_ += (sn - sj_) / wj_;
      uy_ += (cj_ - cn) / wj_;
    } else {
      ux_ += dt_ * cj_;
      uy_ += dt_ * sj_;
    }
    theta_acc_ += delta;
    cj_ = cn;
    sj_ = sn;
    wj_ += w_dot_ * dt_;
    if (w_dot_ != 0.0) {
      const double ndc = dc_ * pc_ - ds_ * ps_;
      ds_ = ds_ * pc_ + dc_ * ps_;
      dc_ = ndc;
    }
    if ((++k_ & 127) == 0) renormalize();

    const double ex = o.x - px_;
    const double ey = o.y - py_;
    s_dd_ += ux_ * ux_ + uy_ * uy_;
    s_do_ += ex * ux_ + ey * uy_;
    s_oo_ += ex * ex + ey * ey;
    const double tr = angle_diff(theta_acc_, o.theta);
    sse_th_ += tr * tr;
  }

  double v_star() const { return s_dd_ > 1e-30 ? s_do_ / s_dd_ : 0.0; }

  double sse() const {
    const double pos = s_dd_ > 1e-30 ? s_oo_ - s_do_ * s_do_ / s_dd_ : s_oo_;
    return std::max(0.0, pos) + sse_th_;
  }

  long samples() const { return k_; }

 private:
  void renormalize() {
    const double n1 = 1.0 / std::hypot(cj_, sj_);
    cj_ *= n1;
    sj_ *= n1;
    const double n2 = 1.0 / std::hypot(dc_, ds_);
    dc_ *= n2;
    ds_ *= n2;
  }

  double px_, py_, dt_, w_dot_;
  double wj_;
  double theta_acc_;
  double cj_, sj_;
  double dc_, ds_;
  double pc_, ps_;
  double ux_ = 0.0, uy_ = 0.0;
  double s_dd_ = 0.0, s_do_ = 0.0, s_oo_ = 0.0, sse_th_ = 0.0;
  long k_ = 0;
};

inline ArcSse run_arc_sse(std::span<const Measurement3> seg, double dt, double w0, double w_dot) {
  ArcSse acc(seg[0], dt, w0, w_dot);
  for (std::size_t k = 1; k < seg.size(); ++k) acc.extend(seg[k]);
  return acc;
}

struct FdSeeds {
  double v = 0.0;
  double w_mean = 0.0;  // mean heading increment rate
  double w0 = 0.0;      // regression intercept of the increment rate
  double w_dot = 0.0;   // regression slope
  bool still = true;    // no sample moved away from the anchor
};

inline FdSeeds fd_seeds(std::span<const Measurement3> seg, double dt) {
  FdSeeds s;
  const std::size_t m = seg.size();
  double chord = 0.0;
  double sw = 0.0, st = 0.0, stt = 0.0, swt = 0.0;
  const double dn = static_cast<double>(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double dx = seg[k + 1].x - seg[k].x;
    const double dy = seg[k + 1].y - seg[k].y;
    chord += std::hypot(dx, dy);
    const double omega = angle_diff(seg[k + 1].theta, seg[k].theta) / dt;
    const double t = static_cast<double>(k) * dt;
    sw += omega;
    st += t;
    stt += t * t;
    swt += omega * t;
    if (std::hypot(seg[k + 1].x - seg[0].x, seg[k + 1].y - seg[0].y) > 1e-12 ||
        std::abs(angle_diff(seg[k + 1].theta, seg[0].theta)) > 1e-12) {
      s.still = false;
    }
  }
  s.v = chord / (dn * dt);
  s.w_mean = sw / dn;
  const double det = dn * stt - st * st;
  if (std::abs(det) > 1e-30) {
    s.w_dot = (dn * swt - st * sw) / det;
    s.w0 = (sw * stt - st * swt) / det;
  } else {
    s.w_dot = 0.0;
    s.w0 = s.w_mean;
  }
  return s;
}

// Golden-section minimum of f over [a, b] down to interval width tol.
template <class F>
inline double golden_min(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int guard = 0;
  while (b - a > tol && ++guard < 200) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

inline double lane_keep_w(std::span<const Measurement3> seg, double dt, const FdSeeds& seeds) {
  auto sse_at = [&](double w) { return run_arc_sse(seg, dt, w, 0.0).sse(); };
  const double span = std::max(0.06, 0.6 * std::abs(seeds.w_mean));
  double best_w = seeds.w_mean;
  double best = sse_at(best_w);
  for (int i = -3; i <= 3; ++i) {
    if (i == 0) continue;
    const double w = seeds.w_mean + span * static_cast<double>(i) / 3.0;
    const double s = sse_at(w);
    if (s < best) {
      best = s;
      best_w = w;
    }
  }
  const double h = span / 3.0;
  return golden_min(sse_at, best_w - h, best_w + h, 1e-9);
}

// Nelder-Mead over (w0, w_dot). The simplex is seeded with the lane-keep
// optimum at zero ramp so the ramped fit never scores below the flat one.
inline std::pair<double, double> merge_w(std::span<const Measurement3> seg, double dt,
                                         const FdSeeds& seeds, double lk_w) {
  auto sse_at = [&](double w0, double wd) { return run_arc_sse(seg, dt, w0, wd).sse(); };
  struct Vertex {
    double w0, wd, f;
  };
  auto mk = [&](double w0, double wd) { return Vertex{w0, wd, sse_at(w0, wd)}; };
  std::array<Vertex, 3> sx = {mk(seeds.w0, seeds.w_dot), mk(lk_w, 0.0),
                              mk(seeds.w0 + std::max(0.02, 0.3 * std::abs(seeds.w0)),
                                 seeds.w_dot + std::max(0.01, 0.3 * std::abs(seeds.w_dot)))};
  auto order = [&] {
    std::sort(sx.begin(), sx.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  order();
  for (int it = 0; it < 150; ++it) {
    if (sx[2].f - sx[0].f < 1e-12 * (1.0 + sx[0].f)) break;
    const double cw0 = 0.5 * (sx[0].w0 + sx[1].w0);
    const double cwd = 0.5 * (sx[0].wd + sx[1].wd);
    Vertex refl = mk(cw0 + (cw0 - sx[2].w0), cwd + (cwd - sx[2].wd));
    if (refl.f < sx[0].f) {
      Vertex ext = mk(cw0 + 2.0 * (cw0 - sx[2].w0), cwd + 2.0 * (cwd - sx[2].wd));
      sx[2] = ext.f < refl.f ? ext : refl;
    } else if (refl.f < sx[1].f) {
      sx[2] = refl;
    } else {
      Vertex con = mk(cw0 + 0.5 * (sx[2].w0 - cw0), cwd + 0.5 * (sx[2].wd - cwd));
      if (con.f < sx[2].f) {
        sx[2] = con;
      } else {
        for (int i = 1; i < 3; ++i) {
          sx[i] = mk(0.5 * (sx[i].w0 + sx[0].w0), 0.5 * (sx[i].wd + sx[0].wd));
        }
      }
    }
    order();
  }
  if (sx[0].f <= sse_at(lk_w, 0.0)) return {sx[0].w0, sx[0].wd};
  return {lk_w, 0.0};
}

}  // namespace detail

inline PolicyFit finalize_fit(PolicyKind kind, std::span<const Measurement3> seg, double dt,
                              double w0, double w_dot, const LikelihoodSpec& lik,
                              bool degenerate = false) {
  detail::ArcSse acc = detail::run_arc_sse(seg, dt, w0, w_dot);
  PolicyFit fit;
  fit.params.kind = kind;
  fit.params.v = degenerate ? 0.0 : acc.v_star();
  fit.params.w = w0;
  fit.params.w_dot = kind == PolicyKind::Merge ? w_dot : 0.0;
  fit.sse = acc.sse();
  fit.degenerate = degenerate;
  const double m = static_cast<double>(seg.size());
  const double s2 = lik.sigma_lik * lik.sigma_lik;
  fit.log_lik = -1.5 * m * std::log(2.0 * M_PI * s2) - fit.sse / (2.0 * s2);
  fit.bic = fit.log_lik - 0.5 * static_cast<double>(param_count(kind)) * std::log(m);
  return fit;
}

struct SegmentClassification {
  PolicyKind kind = PolicyKind::LaneKeep;
  PolicyFit lane_keep;
  PolicyFit merge;

  const PolicyFit& chosen() const { return kind == PolicyKind::Merge ? merge : lane_keep; }
};

// Maximum-likelihood fits of both policies to a pose segment. Rollouts are
// anchored at the segment's first pose; yaw-rate parameters come from a
// finite-difference seed plus derivative-free refinement, with the speed
// solved analytically at every probe. Ties go to LaneKeep.
inline SegmentClassification classify_segment(std::span<const Measurement3> seg, double dt,
                                              const LikelihoodSpec& lik = {}) {
  if (seg.size() < 2) throw DataError("classify_segment: need at least 2 samples");
  if (!(dt > 0.0)) throw ConfigError("classify_segment: dt must be > 0");
  SegmentClassification out;
  const detail::FdSeeds seeds = detail::fd_seeds(seg, dt);
  if (seeds.still) {
    out.lane_keep = finalize_fit(PolicyKind::LaneKeep, seg, dt, 0.0, 0.0, lik, true);
    out.merge = finalize_fit(PolicyKind::Merge, seg, dt, 0.0, 0.0, lik, true);
    out.kind = PolicyKind::LaneKeep;
    return out;
  }
  const double lk_w = detail::lane_keep_w(seg, dt, seeds);
  out.lane_keep = finalize_fit(PolicyKind::LaneKeep, seg, dt, lk_w, 0.0, lik);
  const auto [w0, wd] = detail::merge_w(seg, dt, seeds, lk_w);
  out.merge = finalize_fit(PolicyKind::Merge, seg, dt, w0, wd, lik);
  out.kind = out.merge.bic > out.lane_keep.bic ? PolicyKind::Merge : PolicyKind::LaneKeep;
  return out;
}

// Single-policy fit; see classify_segment for the search strategy.
inline PolicyFit fit_policy(std::span<const Measurement3> seg, double dt, PolicyKind kind,
                            const LikelihoodSpec& lik = {}) {
  if (seg.size() < 2) throw DataError("fit_policy: need at least 2 samples");
  if (!(dt > 0.0)) throw ConfigError("fit_policy: dt must be > 0");
  const detail::FdSeeds seeds = detail::fd_seeds(seg, dt);
  if (seeds.still) {
    return finalize_fit(kind, seg, dt, 0.0, 0.0, lik, true);
  }
  const double lk_w = detail::lane_keep_w(seg, dt, seeds);
  if (kind == PolicyKind::LaneKeep) {
    return finalize_fit(kind, seg, dt, lk_w, 0.0, lik);
  }
  const auto [w0, wd] = detail::merge_w(seg, dt, seeds, lk_w);
  return finalize_fit(kind, seg, dt, w0, wd, lik);
}

}  // namespace vesp
