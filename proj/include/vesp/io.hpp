#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vesp/changepoint.hpp"
#include "vesp/errors.hpp"
#include "vesp/scenario.hpp"
#include "vesp/trajectory.hpp"
#include "vesp/ukf.hpp"

namespace vesp {

// State estimate series with per-sample diagonal covariance, as produced by
// the filter and stored in estimate CSVs.
struct EstimateSeries {
  double dt = 0.1;
  double t0 = 0.0;
  std::vector<State5> states;
  std::vector<std::array<double, 5>> variances;
};

namespace detail {

inline std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path);
  return in;
}

inline void write_comments(std::ofstream& out,
                           const std::vector<std::pair<std::string, std::string>>& comments) {
  for (const auto& [key, value] : comments) out << "# " << key << "=" << value << "\n";
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_field(const std::string& field, long row, const char* column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": cannot parse '" + field + "' as a number");
  }
  return value;
}

// Skips leading '#' comment lines, checks the header, and returns data rows.
inline std::vector<std::string> read_csv_rows(std::ifstream& in, const std::string& path,
                                              const std::string& expected_header,
                                              long* header_row_out) {
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') continue;
    if (line != expected_header) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected header '" +
                      expected_header + "', got '" + line + "'");
    }
    break;
  }
  if (line != expected_header) throw DataError(path + ": missing header row");
  *header_row_out = row;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return rows;
}

// Enforces a strictly increasing, uniformly spaced time column.
inline void validate_time_axis(const std::vector<double>& ts, const std::string& path,
                               double* t0, double* dt) {
  *t0 = ts.front();
  if (ts.size() < 2) {
    *dt = 0.1;
    return;
  }
  *dt = ts[1] - ts[0];
  if (!(*dt > 0.0)) throw DataError(path + ": time column not strictly increasing");
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double gap = ts[k] - ts[k - 1];
    if (!(gap > 0.0)) throw DataError(path + ": time column not strictly increasing");
    if (std::abs(gap - *dt) > 1e-9) {
      throw DataError(path + ": non-uniform time step near sample " + std::to_string(k));
    }
  }
}

}  // namespace detail

inline void write_truth_csv(const std::string& path, const LabeledTrajectory& traj,
                            const std::vector<std::pair<std::string, std::string>>& comments = {}) {
  auto out = detail::open_out(path);
  detail::write_comments(out, comments);
  out << "t,x,y,theta,v,w,label\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const State5& s = traj.states[k];
    out << detail::format_g17(traj.t0 + static_cast<double>(k) * traj.dt) << ','
        << detail::format_g17(s.x) << ',' << detail::format_g17(s.y) << ','
        << detail::format_g17(s.theta) << ',' << detail::format_g17(s.v) << ','
        << detail::format_g17(s.w) << ',' << to_string(traj.labels[k]) << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

inline LabeledTrajectory read_truth_csv(const std::string& path) {
  auto in = detail::open_in(path);
  long header_row = 0;
  auto rows = detail::read_csv_rows(in, path, "t,x,y,theta,v,w,label", &header_row);
  LabeledTrajectory traj;
  std::vector<double> ts;
  long row = header_row;
  for (const auto& line : rows) {
    ++row;
    auto fields = detail::split_csv(line);
    if (fields.size() != 7) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    }
    ts.push_back(detail::parse_field(fields[0], row, "t"));
    State5 s;
    s.x = detail::parse_field(fields[1], row, "x");
    s.y = detail::parse_field(fields[2], row, "y");
    s.theta = detail::parse_field(fields[3], row, "theta");
    s.v = detail::parse_field(fields[4], row, "v");
    s.w = detail::parse_field(fields[5], row, "w");
    traj.states.push_back(s);
    traj.labels.push_back(policy_from_string(fields[6]));
  }
  detail::validate_time_axis(ts, path, &traj.t0, &traj.dt);
  for (std::size_t k = 0; k + 1 < traj.labels.size(); ++k) {
    if (traj.labels[k] != traj.labels[k + 1]) traj.changepoints.push_back(static_cast<int>(k));
  }
  return traj;
}

inline void write_measurement_csv(
    const std::string& path, const Series<Measurement3>& zs,
    const std::vector<std::pair<std::string, std::string>>& comments = {}) {
  auto out = detail::open_out(path);
  detail::write_comments(out, comments);
  out << "t,x,y,theta\n";
  for (std::size_t k = 0; k < zs.samples.size(); ++k) {
    const Measurement3& z = zs.samples[k];
    out << detail::format_g17(zs.time_at(k)) << ',' << detail::format_g17(z.x) << ','
        << detail::format_g17(z.y) << ',' << detail::format_g17(z.theta) << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

inline Series<Measurement3> read_measurement_csv(const std::string& path) {
  auto in = detail::open_in(path);
  long header_row = 0;
  auto rows = detail::read_csv_rows(in, path, "t,x,y,theta", &header_row);
  Series<Measurement3> zs;
  std::vector<double> ts;
  long row = header_row;
  for (const auto& line : rows) {
    ++row;
    auto fields = detail::split_csv(line);
    if (fields.size() != 4) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    ts.push_back(detail::parse_field(fields[0], row, "t"));
    Measurement3 z;
    z.x = detail::parse_field(fields[1], row, "x");
    z.y = detail::parse_field(fields[2], row, "y");
    z.theta = detail::parse_field(fields[3], row, "theta");
    zs.samples.push_back(z);
  }
  detail::validate_time_axis(ts, path, &zs.t0, &zs.dt);
  return zs;
}

inline void write_estimate_csv(
    const std::string& path, const EstimateSeries& est,
    const std::vector<std::pair<std::string, std::string>>& comments = {}) {
  auto out = detail::open_out(path);
  detail::write_comments(out, comments);
  out << "t,x,y,theta,v,w,var_x,var_y,var_theta,var_v,var_w\n";
  for (std::size_t k = 0; k < est.states.size(); ++k) {
    const State5& s = est.states[k];
    const auto& var = est.variances[k];
    out << detail::format_g17(est.t0 + static_cast<double>(k) * est.dt) << ','
        << detail::format_g17(s.x) << ',' << detail::format_g17(s.y) << ','
        << detail::format_g17(s.theta) << ',' << detail::format_g17(s.v) << ','
        << detail::format_g17(s.w);
    for (double v : var) out << ',' << detail::format_g17(v);
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

inline EstimateSeries read_estimate_csv(const std::string& path) {
  auto in = detail::open_in(path);
  long header_row = 0;
  auto rows =
      detail::read_csv_rows(in, path, "t,x,y,theta,v,w,var_x,var_y,var_theta,var_v,var_w",
                            &header_row);
  EstimateSeries est;
  std::vector<double> ts;
  long row = header_row;
  static const char* kVarNames[] = {"var_x", "var_y", "var_theta", "var_v", "var_w"};
  for (const auto& line : rows) {
    ++row;
    auto fields = detail::split_csv(line);
    if (fields.size() != 11) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected 11 fields, got " +
                      std::to_string(fields.size()));
    }
    ts.push_back(detail::parse_field(fields[0], row, "t"));
    State5 s;
    s.x = detail::parse_field(fields[1], row, "x");
    s.y = detail::parse_field(fields[2], row, "y");
    s.theta = detail::parse_field(fields[3], row, "theta");
    s.v = detail::parse_field(fields[4], row, "v");
    s.w = detail::parse_field(fields[5], row, "w");
    est.states.push_back(s);
    std::array<double, 5> var{};
    for (int i = 0; i < 5; ++i) var[i] = detail::parse_field(fields[6 + i], row, kVarNames[i]);
    est.variances.push_back(var);
  }
  detail::validate_time_axis(ts, path, &est.t0, &est.dt);
  return est;
}

inline EstimateSeries estimate_from_beliefs(const std::vector<GaussianState>& beliefs, double dt,
                                            double t0 = 0.0) {
  EstimateSeries est;
  est.dt = dt;
  est.t0 = t0;
  est.states.reserve(beliefs.size());
  est.variances.reserve(beliefs.size());
  for (const auto& b : beliefs) {
    est.states.push_back(State5::from_vec(b.mean));
    std::array<double, 5> var{};
    for (int i = 0; i < 5; ++i) var[i] = b.cov(i, i);
    est.variances.push_back(var);
  }
  return est;
}

// One JSON object per line: {"tau": ..., "policy": ..., "bic": ..., "params": {...}}.
// tau is the index of the segment's last sample.
inline void write_segments_jsonl(const std::string& path, const ViterbiPath& result) {
  auto out = detail::open_out(path);
  for (const auto& seg : result.segments) {
    nlohmann::json params = {{"v", seg.fit.params.v}, {"w", seg.fit.params.w}};
    if (seg.kind == PolicyKind::Merge) params["w_dot"] = seg.fit.params.w_dot;
    nlohmann::json obj = {{"tau", seg.last},
                          {"policy", to_string(seg.kind)},
                          {"bic", seg.fit.bic},
                          {"params", params}};
    out << obj.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace vesp
