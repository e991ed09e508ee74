#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "vesp/changepoint.hpp"
#include "vesp/errors.hpp"
#include "vesp/motion.hpp"
#include "vesp/scenario.hpp"
#include "vesp/trajectory.hpp"
#include "vesp/ukf.hpp"

namespace vesp {

// Every tunable default in one bundle, overridable from flat key=value text.
struct SystemConfig {
  ProcessNoiseSpec process;
  MeasurementSpec measurement;
  UtConfig ut;
  double init_v = 8.0;
  ChampConfig champ;
  RoundaboutGeometry geometry;
  Route route;
  double horizon = 2.0;
  bool use_filter = true;
  int burn_in = 20;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline double config_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
  }
  return out;
}

inline int config_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
  }
  return out;
}

inline bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a boolean");
}

}  // namespace detail

inline void apply_config_entry(SystemConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::config_bool;
  using detail::config_double;
  using detail::config_int;
  if (key == "process.sigma_va") cfg.process.sigma_va = config_double(key, value);
  else if (key == "process.sigma_vw") cfg.process.sigma_vw = config_double(key, value);
  else if (key == "measurement.sigma_nx") cfg.measurement.sigma_nx = config_double(key, value);
  else if (key == "measurement.sigma_ny") cfg.measurement.sigma_ny = config_double(key, value);
  else if (key == "measurement.sigma_ntheta")
    cfg.measurement.sigma_ntheta = config_double(key, value);
  else if (key == "ut.alpha") cfg.ut.alpha = config_double(key, value);
  else if (key == "ut.beta") cfg.ut.beta = config_double(key, value);
  else if (key == "ut.kappa") cfg.ut.kappa = config_double(key, value);
  else if (key == "filter.init_v") cfg.init_v = config_double(key, value);
  else if (key == "prior.mu_len") cfg.champ.prior.mu_len = config_double(key, value);
  else if (key == "prior.sigma_len") cfg.champ.prior.sigma_len = config_double(key, value);
  else if (key == "prior.min_len") cfg.champ.prior.min_len = config_int(key, value);
  else if (key == "likelihood.sigma_lik")
    cfg.champ.likelihood.sigma_lik = config_double(key, value);
  else if (key == "champ.exact_refit_len") cfg.champ.exact_refit_len = config_int(key, value);
  else if (key == "champ.prune_after") cfg.champ.prune_after = config_int(key, value);
  else if (key == "champ.prune_margin") cfg.champ.prune_margin = config_double(key, value);
  else if (key == "champ.prune_cap") cfg.champ.prune_cap = config_int(key, value);
  else if (key == "geometry.cx") cfg.geometry.cx = config_double(key, value);
  else if (key == "geometry.cy") cfg.geometry.cy = config_double(key, value);
  else if (key == "geometry.ring_radius") cfg.geometry.ring_radius = config_double(key, value);
  else if (key == "geometry.leg_length") cfg.geometry.leg_length = config_double(key, value);
  else if (key == "geometry.transition_length")
    cfg.geometry.transition_length = config_double(key, value);
  else if (key == "route.entry_leg") cfg.route.entry_leg = config_int(key, value);
  else if (key == "route.exit_leg") cfg.route.exit_leg = config_int(key, value);
  else if (key == "route.cruise") cfg.route.cruise = config_double(key, value);
  else if (key == "route.dt") cfg.route.dt = config_double(key, value);
  else if (key == "pipeline.horizon") cfg.horizon = config_double(key, value);
  else if (key == "pipeline.use_filter") cfg.use_filter = config_bool(key, value);
  else if (key == "metrics.burn_in") cfg.burn_in = config_int(key, value);
  else throw ConfigError("unknown config key: " + key);
}

inline SystemConfig parse_config(std::istream& in, SystemConfig cfg = {}) {
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(row) + ": expected key=value, got '" +
                        line + "'");
    }
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline SystemConfig parse_config_text(const std::string& text, SystemConfig cfg = {}) {
  std::istringstream in(text);
  return parse_config(in, cfg);
}

inline SystemConfig load_config(const std::string& path, SystemConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, cfg);
}

}  // namespace vesp
