#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vesp/errors.hpp"
#include "vesp/policy.hpp"
#include "vesp/trajectory.hpp"

namespace vesp {

// Truncated-Gaussian prior over segment lengths in samples; lengths below
// min_len carry no mass.
struct SegmentLengthPrior {
  double mu_len = 50.0;
  double sigma_len = 60.0;
  int min_len = 25;

  void validate() const {
    if (!(sigma_len > 0.0)) throw ConfigError("segment prior: sigma_len must be > 0");
    if (min_len < 2) throw ConfigError("segment prior: min_len must be >= 2");
  }
};

namespace detail {

// log(1 - Phi(z)), stable for large z where erfc underflows.
inline double log_norm_sf(double z) {
  if (z < 25.0) return std::log(0.5 * std::erfc(z * M_SQRT1_2));
  const double zi = 1.0 / (z * z);
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * M_PI) +
         std::log1p(-zi + 3.0 * zi * zi);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

}  // namespace detail

inline double seg_len_log_pdf(const SegmentLengthPrior& p, double len) {
  if (len < p.min_len) return -std::numeric_limits<double>::infinity();
  const double z = (len - p.mu_len) / p.sigma_len;
  const double za = (static_cast<double>(p.min_len) - p.mu_len) / p.sigma_len;
  return -0.5 * z * z - 0.5 * std::log(2.0 * M_PI) - std::log(p.sigma_len) -
         detail::log_norm_sf(za);
}

inline double seg_len_pdf(const SegmentLengthPrior& p, double len) {
  return std::exp(seg_len_log_pdf(p, len));
}

inline double seg_len_cdf(const SegmentLengthPrior& p, double len) {
  if (len < p.min_len) return 0.0;
  const double z = (len - p.mu_len) / p.sigma_len;
  const double za = (static_cast<double>(p.min_len) - p.mu_len) / p.sigma_len;
  return (detail::norm_cdf(z) - detail::norm_cdf(za)) / (0.5 * std::erfc(za * M_SQRT1_2));
}

// log(1 - CDF): mass of segments longer than len.
inline double seg_len_log_survival(const SegmentLengthPrior& p, double len) {
  if (len < p.min_len) return 0.0;
  const double z = (len - p.mu_len) / p.sigma_len;
  const double za = (static_cast<double>(p.min_len) - p.mu_len) / p.sigma_len;
  return detail::log_norm_sf(z) - detail::log_norm_sf(za);
}

// Marginal evidence of one policy family on a segment: peak log-likelihood
// with the usual half-log-m penalty per fitted parameter.
inline double segment_evidence(std::span<const Measurement3> seg, double dt, PolicyKind kind,
                               const LikelihoodSpec& lik = {}) {
  return fit_policy(seg, dt, kind, lik).bic;
}

struct ChampConfig {
  SegmentLengthPrior prior{};
  LikelihoodSpec likelihood{};
  int exact_refit_len = 80;    // refit candidates every sample up to this length
  int prune_after = 1000;      // candidate pruning engages beyond this many samples
  double prune_margin = 40.0;  // drop candidates this many nats behind the best
  int prune_cap = 512;
};

struct SegmentRecord {
  int first = 0;
  int last = 0;
  PolicyKind kind = PolicyKind::LaneKeep;
  PolicyFit fit;
};

struct ViterbiPath {
  std::vector<int> changepoints;  // index of the last sample of each closed segment
  std::vector<SegmentRecord> segments;
  double log_score = 0.0;
};

// Per-sample policy labels implied by a segmentation.
inline std::vector<PolicyKind> expand_labels(const ViterbiPath& path, int n) {
  std::vector<PolicyKind> out(static_cast<std::size_t>(std::max(0, n)), PolicyKind::LaneKeep);
  for (const auto& seg : path.segments) {
    for (int k = std::max(0, seg.first); k <= seg.last && k < n; ++k) {
      out[static_cast<std::size_t>(k)] = seg.kind;
    }
  }
  return out;
}

// Online MAP segmentation of a pose stream into policy episodes. Every open
// segment hypothesis keeps both policy fits; cheap incremental rollout sums
// carry the fits between scheduled re-optimizations, with the speed re-solved
// in closed form each sample. The lattice stores, per sample count, the best
// score over segmentations whose last segment closes there.
class ChampDetector {
 public:
  explicit ChampDetector(double dt, ChampConfig cfg = {}) : dt_(dt), cfg_(cfg) {
    if (!(dt > 0.0)) throw ConfigError("changepoint: dt must be > 0");
    cfg_.prior.validate();
    if (cfg_.prune_cap < 1) throw ConfigError("changepoint: prune_cap must be >= 1");
    map_log_.push_back(0.0);
    back_.push_back(BackPtr{});
    Candidate root;
    root.start = 0;
    candidates_.push_back(std::move(root));
  }

  int consumed() const { return static_cast<int>(obs_.size()); }
  const std::vector<double>& map_log() const { return map_log_; }

  void step(const Measurement3& z) {
    obs_.push_back(z);
    const int t = static_cast<int>(obs_.size());
    double best = -kInf;
    BackPtr bp{};
    for (auto& c : candidates_) {
      const int m = t - c.start;
      if (m < cfg_.prior.min_len) continue;
      const std::span<const Measurement3> seg(obs_.data() + c.start,
                                              static_cast<std::size_t>(m));
      const bool exact = m <= cfg_.exact_refit_len;
      if (exact || !c.acc[0] || m - c.last_refit_m >= refit_interval(m)) {
        const SegmentClassification cls = classify_segment(seg, dt_, cfg_.likelihood);
        c.bic[0] = cls.lane_keep.bic;
        c.bic[1] = cls.merge.bic;
        c.params[0] = cls.lane_keep.params;
        c.params[1] = cls.merge.params;
        c.last_refit_m = m;
        if (exact) {
          c.acc[0].reset();
          c.acc[1].reset();
        } else {
          c.acc[0].emplace(detail::run_arc_sse(seg, dt_, c.params[0].w, 0.0));
          c.acc[1].emplace(detail::run_arc_sse(seg, dt_, c.params[1].w, c.params[1].w_dot));
        }
      } else {
        c.acc[0]->extend(z);
        c.acc[1]->extend(z);
        c.bic[0] = bic_from_sse(c.acc[0]->sse(), m, PolicyKind::LaneKeep);
        c.bic[1] = bic_from_sse(c.acc[1]->sse(), m, PolicyKind::Merge);
      }
      const double base = seg_len_log_pdf(cfg_.prior, m) + kLogHalf + map_log_[c.start];
      c.score = base + std::max(c.bic[0], c.bic[1]);
      for (int p = 0; p < 2; ++p) {
        if (base + c.bic[p] > best) {
          best = base + c.bic[p];
          bp = BackPtr{c.start, static_cast<PolicyKind>(p)};
        }
      }
    }
    map_log_.push_back(best);
    back_.push_back(bp);
    if (t > cfg_.prune_after) prune(t);
    if (std::isfinite(best)) {
      Candidate fresh;
      fresh.start = t;
      candidates_.push_back(std::move(fresh));
    }
  }

  // MAP segmentation of everything consumed so far. The still-open last
  // segment is scored with the length prior's survival mass and must itself
  // reach min_len.
  ViterbiPath backtrack() const {
    const int n = consumed();
    if (n < cfg_.prior.min_len) throw DataError("changepoint: fewer samples than min_len");
    double best = -kInf;
    int best_start = -1;
    PolicyKind best_kind = PolicyKind::LaneKeep;
    for (const auto& c : candidates_) {
      const int m = n - c.start;
      if (m < cfg_.prior.min_len) continue;
      const double base =
          seg_len_log_survival(cfg_.prior, m - 1) + kLogHalf + map_log_[c.start];
      for (int p = 0; p < 2; ++p) {
        if (base + c.bic[p] > best) {
          best = base + c.bic[p];
          best_start = c.start;
          best_kind = static_cast<PolicyKind>(p);
        }
      }
    }
    if (best_start < 0 || !std::isfinite(best)) {
      throw NumericalError("changepoint: no admissible segmentation");
    }

    std::vector<std::pair<int, PolicyKind>> starts{{best_start, best_kind}};
    for (int cur = best_start; cur > 0; cur = back_[cur].start) {
      starts.emplace_back(back_[cur].start, back_[cur].kind);
    }
    std::reverse(starts.begin(), starts.end());

    ViterbiPath path;
    path.log_score = best;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      SegmentRecord rec;
      rec.first = starts[i].first;
      rec.last = i + 1 < starts.size() ? starts[i + 1].first - 1 : n - 1;
      rec.kind = starts[i].second;
      const std::span<const Measurement3> seg(obs_.data() + rec.first,
                                              static_cast<std::size_t>(rec.last - rec.first + 1));
      rec.fit = fit_policy(seg, dt_, rec.kind, cfg_.likelihood);
      if (i + 1 < starts.size()) path.changepoints.push_back(rec.last);
      path.segments.push_back(std::move(rec));
    }
    return path;
  }

 private:
  struct BackPtr {
    int start = -1;
    PolicyKind kind = PolicyKind::LaneKeep;
  };

  struct Candidate {
    int start = 0;
    int last_refit_m = 0;
    double score = -std::numeric_limits<double>::infinity();
    double bic[2] = {-std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
    PolicyParams params[2];
    std::optional<detail::ArcSse> acc[2];
  };

  int refit_interval(int m) const { return std::max(4, std::min(64, m / 8)); }

  double bic_from_sse(double sse, int mi, PolicyKind kind) const {
    const double m = static_cast<double>(mi);
    const double s2 = cfg_.likelihood.sigma_lik * cfg_.likelihood.sigma_lik;
    const double ll = -1.5 * m * std::log(2.0 * M_PI * s2) - sse / (2.0 * s2);
    return ll - 0.5 * static_cast<double>(param_count(kind)) * std::log(m);
  }

  void prune(int t) {
    double top = -kInf;
    for (const auto& c : candidates_) {
      if (t - c.start >= cfg_.prior.min_len) top = std::max(top, c.score);
    }
    const double floor = top - cfg_.prune_margin;
    std::erase_if(candidates_, [&](const Candidate& c) {
      return t - c.start >= cfg_.prior.min_len && c.score < floor;
    });
    const auto scored = [&](const Candidate& c) { return t - c.start >= cfg_.prior.min_len; };
    const long n_scored = std::count_if(candidates_.begin(), candidates_.end(), scored);
    if (n_scored > cfg_.prune_cap) {
      std::vector<double> scores;
      scores.reserve(static_cast<std::size_t>(n_scored));
      for (const auto& c : candidates_) {
        if (scored(c)) scores.push_back(c.score);
      }
      std::nth_element(scores.begin(), scores.begin() + (cfg_.prune_cap - 1), scores.end(),
                       std::greater<>());
      const double cut = scores[static_cast<std::size_t>(cfg_.prune_cap - 1)];
      long kept = 0;
      std::erase_if(candidates_, [&](const Candidate& c) {
        if (!scored(c)) return false;
        if (c.score > cut) {
          ++kept;
          return false;
        }
        if (c.score == cut && kept < cfg_.prune_cap) {
          ++kept;
          return false;
        }
        return true;
      });
    }
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static inline const double kLogHalf = std::log(0.5);

  double dt_;
  ChampConfig cfg_;
  std::vector<Measurement3> obs_;
  std::vector<double> map_log_;
  std::vector<BackPtr> back_;
  std::vector<Candidate> candidates_;
};

inline ViterbiPath detect_changepoints(std::span<const Measurement3> zs, double dt,
                                       const ChampConfig& cfg = {}) {
  ChampDetector det(dt, cfg);
  for (const auto& z : zs) det.step(z);
  return det.backtrack();
}

}  // namespace vesp
