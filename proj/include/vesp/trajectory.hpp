#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vesp/errors.hpp"

namespace vesp {

// Driving policies a segment can follow.
enum class PolicyKind { LaneKeep = 0, Merge = 1 };

inline const char* to_string(PolicyKind k) {
  return k == PolicyKind::LaneKeep ? "lane_keep" : "merge";
}

inline PolicyKind policy_from_string(const std::string& s) {
  if (s == "lane_keep") return PolicyKind::LaneKeep;
  if (s == "merge") return PolicyKind::Merge;
  throw DataError("unknown policy label: " + s);
}

// A pose observation: noisy (x, y, theta) at one sample instant.
struct Measurement3 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Measurement noise variances for (x, y, theta): m^2, m^2, rad^2.
struct MeasurementSpec {
  double sigma_nx = 0.25;
  double sigma_ny = 0.25;
  double sigma_ntheta = 0.25;
};

// Uniformly sampled time series; t_k = t0 + k * dt.
template <class T>
struct Series {
  double dt = 0.1;
  double t0 = 0.0;
  std::vector<T> samples;

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

}  // namespace vesp
