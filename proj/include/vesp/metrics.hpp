#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vesp/errors.hpp"
#include "vesp/motion.hpp"
#include "vesp/scenario.hpp"

namespace vesp {

// Position-error summary between an estimated and a reference trajectory.
// Lateral error is taken along global y, longitudinal along global x.
struct MetricsReport {
  double avg_lat_err = 0.0;
  double max_lat_err = 0.0;
  double avg_lon_err = 0.0;
  double max_lon_err = 0.0;
  double avg_euclid = 0.0;
  double max_euclid = 0.0;
  int burn_in = 0;
};

inline MetricsReport compute_metrics(const std::vector<State5>& truth,
                                     const std::vector<State5>& estimate, int burn_in) {
  if (truth.size() != estimate.size()) {
    throw DataError("compute_metrics: truth and estimate lengths differ");
  }
  if (burn_in < 0 || static_cast<std::size_t>(burn_in) >= truth.size()) {
    throw ConfigError("compute_metrics: burn_in must be in [0, length)");
  }
  MetricsReport rep;
  rep.burn_in = burn_in;
  int n = 0;
  for (std::size_t k = static_cast<std::size_t>(burn_in); k < truth.size(); ++k) {
    const double lon = std::abs(estimate[k].x - truth[k].x);
    const double lat = std::abs(estimate[k].y - truth[k].y);
    const double euc = std::hypot(lon, lat);
    rep.avg_lat_err += lat;
    rep.avg_lon_err += lon;
    rep.avg_euclid += euc;
    rep.max_lat_err = std::max(rep.max_lat_err, lat);
    rep.max_lon_err = std::max(rep.max_lon_err, lon);
    rep.max_euclid = std::max(rep.max_euclid, euc);
    ++n;
  }
  rep.avg_lat_err /= n;
  rep.avg_lon_err /= n;
  rep.avg_euclid /= n;
  return rep;
}

inline MetricsReport compute_metrics(const LabeledTrajectory& truth,
                                     const std::vector<State5>& estimate, int burn_in) {
  return compute_metrics(truth.states, estimate, burn_in);
}

// Two-row table: one row per averaging window (full series and post burn-in).
inline std::string format_metrics_table(const MetricsReport& full, const MetricsReport& tail) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %9s %9s %9s\n", "window", "avg_lat",
                "max_lat", "avg_lon", "max_lon", "avg_euc", "max_euc");
  out += buf;
  const MetricsReport* reps[] = {&full, &tail};
  for (const MetricsReport* r : reps) {
    char label[32];
    std::snprintf(label, sizeof label, "from_%d", r->burn_in);
    std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f\n", label,
                  r->avg_lat_err, r->max_lat_err, r->avg_lon_err, r->max_lon_err, r->avg_euclid,
                  r->max_euclid);
    out += buf;
  }
  return out;
}

inline std::string format_metrics_kv(const MetricsReport& rep, const std::string& prefix) {
  char buf[128];
  std::string out;
  const struct {
    const char* key;
    double value;
  } rows[] = {{"avg_lat_err", rep.avg_lat_err}, {"max_lat_err", rep.max_lat_err},
              {"avg_lon_err", rep.avg_lon_err}, {"max_lon_err", rep.max_lon_err},
              {"avg_euclid", rep.avg_euclid},   {"max_euclid", rep.max_euclid}};
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s%s=%.17g\n", prefix.c_str(), row.key, row.value);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%sburn_in=%d\n", prefix.c_str(), rep.burn_in);
  out += buf;
  return out;
}

}  // namespace vesp
