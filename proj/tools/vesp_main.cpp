// Command-line front end: generate synthetic roundabout data, filter it,
// segment it into policy episodes, predict ahead, and score benchmarks.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "vesp/vesp.hpp"

namespace {

using namespace vesp;

struct CommonOpts {
  std::string config_path;
  std::string route_text;
  std::string plot_dir;
};

SystemConfig resolve_config(const CommonOpts& opts) {
  SystemConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
  if (!opts.route_text.empty()) {
    const auto colon = opts.route_text.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("--route expects ENTRY:EXIT, got '" + opts.route_text + "'");
    }
    cfg.route.entry_leg =
        detail::config_int("route.entry_leg", opts.route_text.substr(0, colon));
    cfg.route.exit_leg =
        detail::config_int("route.exit_leg", opts.route_text.substr(colon + 1));
  }
  return cfg;
}

PredictionConfig prediction_config(const SystemConfig& cfg) {
  PredictionConfig pcfg;
  pcfg.horizon = cfg.horizon;
  pcfg.use_filter = cfg.use_filter;
  pcfg.init_v = cfg.init_v;
  pcfg.process = cfg.process;
  pcfg.measurement = cfg.measurement;
  pcfg.ut = cfg.ut;
  pcfg.champ = cfg.champ;
  pcfg.geometry = cfg.geometry;
  return pcfg;
}

std::ofstream open_plot_file(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return detail::open_out((std::filesystem::path(dir) / name).string());
}

void emit_path_csv(std::ofstream out, const Series<Measurement3>& poses) {
  out << "t,x,y,theta\n";
  for (std::size_t k = 0; k < poses.samples.size(); ++k) {
    const auto& z = poses.samples[k];
    out << detail::format_g17(poses.time_at(k)) << ',' << detail::format_g17(z.x) << ','
        << detail::format_g17(z.y) << ',' << detail::format_g17(z.theta) << "\n";
  }
}

int run_generate(const CommonOpts& opts, std::uint64_t seed, const std::string& truth_path,
                 const std::string& meas_path) {
  const SystemConfig cfg = resolve_config(opts);
  const LabeledTrajectory clean = build_route_path(cfg.geometry, cfg.route);
  const LabeledTrajectory truth = inject_process_noise(clean, cfg.process, offset_seed(seed, 0));
  const Series<Measurement3> zs = observe(truth, cfg.measurement, offset_seed(seed, 1));

  const std::string route_tag =
      std::to_string(cfg.route.entry_leg) + ":" + std::to_string(cfg.route.exit_leg);
  const std::string seed_tag = std::to_string(seed);
  write_truth_csv(truth_path, truth, {{"route", route_tag}, {"seed", seed_tag}});
  write_measurement_csv(meas_path, zs, {{"route", route_tag}, {"seed", seed_tag}});

  if (!opts.plot_dir.empty()) {
    emit_path_csv(open_plot_file(opts.plot_dir, "clean_path.csv"), project_poses(clean));
    emit_path_csv(open_plot_file(opts.plot_dir, "true_path.csv"), project_poses(truth));
    emit_path_csv(open_plot_file(opts.plot_dir, "observed_path.csv"), zs);
  }
  std::cout << "wrote " << truth_path << " and " << meas_path << " (" << truth.states.size()
            << " samples, route " << route_tag << ")\n";
  return 0;
}

int run_filter(const CommonOpts& opts, const std::string& input, const std::string& output) {
  const SystemConfig cfg = resolve_config(opts);
  const Series<Measurement3> zs = read_measurement_csv(input);
  const auto beliefs = filter_trajectory(zs, cfg.process, cfg.measurement, cfg.ut, cfg.init_v);
  const EstimateSeries est = estimate_from_beliefs(beliefs, zs.dt, zs.t0);
  write_estimate_csv(output, est);

  if (!opts.plot_dir.empty()) {
    emit_path_csv(open_plot_file(opts.plot_dir, "filtered_path.csv"),
                  pose_means(beliefs, zs.dt, zs.t0));
    auto out = open_plot_file(opts.plot_dir, "speed_yaw.csv");
    out << "t,v,w\n";
    for (std::size_t k = 0; k < est.states.size(); ++k) {
      out << detail::format_g17(est.t0 + static_cast<double>(k) * est.dt) << ','
          << detail::format_g17(est.states[k].v) << ',' << detail::format_g17(est.states[k].w)
          << "\n";
    }
  }
  std::cout << "wrote " << output << " (" << est.states.size() << " estimates)\n";
  return 0;
}

int run_segment(const CommonOpts& opts, const std::string& input, const std::string& output) {
  const SystemConfig cfg = resolve_config(opts);
  const Series<Measurement3> zs = read_measurement_csv(input);

  Series<Measurement3> seg_input = zs;
  if (cfg.use_filter) {
    const auto beliefs = filter_trajectory(zs, cfg.process, cfg.measurement, cfg.ut, cfg.init_v);
    seg_input = pose_means(beliefs, zs.dt, zs.t0);
  }
  const ViterbiPath path = detect_changepoints(seg_input.samples, zs.dt, cfg.champ);
  write_segments_jsonl(output, path);

  if (!opts.plot_dir.empty()) {
    const auto labels = expand_labels(path, static_cast<int>(zs.samples.size()));
    auto out = open_plot_file(opts.plot_dir, "labeled_path.csv");
    out << "t,x,y,label\n";
    for (std::size_t k = 0; k < zs.samples.size(); ++k) {
      out << detail::format_g17(zs.time_at(k)) << ',' << detail::format_g17(zs.samples[k].x)
          << ',' << detail::format_g17(zs.samples[k].y) << ',' << to_string(labels[k]) << "\n";
    }
  }
  std::cout << "wrote " << output << " (" << path.segments.size() << " segments,"
            << " changepoints:";
  for (int tau : path.changepoints) std::cout << ' ' << tau;
  std::cout << ")\n";
  return 0;
}

int run_predict(const CommonOpts& opts, const std::string& input, const std::string& output) {
  const SystemConfig cfg = resolve_config(opts);
  const Series<Measurement3> zs = read_measurement_csv(input);
  const PredictionResult result = predict_trajectory(zs, prediction_config(cfg));

  auto out = detail::open_out(output);
  out << "t,x,y,theta,v,w\n";
  const double t_anchor = zs.time_at(zs.samples.size() - 1);
  for (std::size_t k = 0; k < result.predicted.size(); ++k) {
    const State5& s = result.predicted[k];
    out << detail::format_g17(t_anchor + static_cast<double>(k + 1) * zs.dt) << ','
        << detail::format_g17(s.x) << ',' << detail::format_g17(s.y) << ','
        << detail::format_g17(s.theta) << ',' << detail::format_g17(s.v) << ','
        << detail::format_g17(s.w) << "\n";
  }
  if (!out) throw DataError("write failed: " + output);

  std::cout << "current policy: " << to_string(result.current_policy) << "\n"
            << "estimated v " << result.estimated_state.mean(3) << ", w "
            << result.estimated_state.mean(4) << "\n"
            << "wrote " << output << " (" << result.predicted.size() << " steps)\n";
  return 0;
}

// Seed-offset trial: regenerate the configured route with fresh noise, run
// the filter, and score it against the realized (noisy) truth.
void run_trial(const SystemConfig& cfg, std::uint64_t seed, int trial, MetricsReport* full,
               MetricsReport* tail) {
  const LabeledTrajectory clean = build_route_path(cfg.geometry, cfg.route);
  const LabeledTrajectory truth = inject_process_noise(
      clean, cfg.process, offset_seed(seed, 2 * static_cast<std::uint64_t>(trial)));
  const Series<Measurement3> zs = observe(
      truth, cfg.measurement, offset_seed(seed, 2 * static_cast<std::uint64_t>(trial) + 1));
  const auto beliefs = filter_trajectory(zs, cfg.process, cfg.measurement, cfg.ut, cfg.init_v);
  const auto estimate = state_means(beliefs);
  *full = compute_metrics(truth, estimate, 0);
  *tail = compute_metrics(truth, estimate, cfg.burn_in);
}

MetricsReport aggregate(const std::vector<MetricsReport>& reps) {
  MetricsReport agg;
  agg.burn_in = reps.front().burn_in;
  for (const auto& r : reps) {
    agg.avg_lat_err += r.avg_lat_err;
    agg.avg_lon_err += r.avg_lon_err;
    agg.avg_euclid += r.avg_euclid;
    agg.max_lat_err = std::max(agg.max_lat_err, r.max_lat_err);
    agg.max_lon_err = std::max(agg.max_lon_err, r.max_lon_err);
    agg.max_euclid = std::max(agg.max_euclid, r.max_euclid);
  }
  const double n = static_cast<double>(reps.size());
  agg.avg_lat_err /= n;
  agg.avg_lon_err /= n;
  agg.avg_euclid /= n;
  return agg;
}

int run_evaluate(const CommonOpts& opts, std::uint64_t seed, int trials, int jobs,
                 const std::string& metrics_path) {
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  const SystemConfig cfg = resolve_config(opts);

  std::vector<MetricsReport> fulls(static_cast<std::size_t>(trials));
  std::vector<MetricsReport> tails(static_cast<std::size_t>(trials));

  // Trials are independent and indexed, so any scheduling yields the same
  // aggregate.
  std::vector<std::thread> workers;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
      run_trial(cfg, seed, t, &fulls[static_cast<std::size_t>(t)],
                &tails[static_cast<std::size_t>(t)]);
    }
  };
  const int n_workers = std::min(jobs, trials);
  workers.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) workers.emplace_back(worker);
  for (auto& w : workers) w.join();

  const MetricsReport full = aggregate(fulls);
  const MetricsReport tail = aggregate(tails);
  std::cout << format_metrics_table(full, tail);

  auto out = detail::open_out(metrics_path);
  out << "trials=" << trials << "\n" << "seed=" << seed << "\n";
  out << format_metrics_kv(full, "full.");
  out << format_metrics_kv(tail, "post_burn_in.");
  if (!out) throw DataError("write failed: " + metrics_path);
  std::cout << "wrote " << metrics_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicle state estimation, policy segmentation and prediction"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::uint64_t seed = 0;
  int trials = 3;
  int jobs = 1;
  std::string truth_path = "truth.csv";
  std::string meas_path = "measurements.csv";
  std::string input_path;
  std::string estimate_path = "estimate.csv";
  std::string segments_path = "segments.jsonl";
  std::string predicted_path = "predicted.csv";
  std::string metrics_path = "metrics.txt";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "key=value config file");
    sub->add_option("--emit-plot-data", opts.plot_dir, "directory for per-figure CSV dumps");
  };

  CLI::App* generate = app.add_subcommand("generate", "synthesize a noisy roundabout crossing");
  add_common(generate);
  generate->add_option("--route", opts.route_text, "entry:exit leg pair, e.g. 0:2");
  generate->add_option("--seed", seed, "noise seed")->required();
  generate->add_option("--out-truth", truth_path, "truth CSV path");
  generate->add_option("--out-measurements", meas_path, "measurement CSV path");

  CLI::App* filter = app.add_subcommand("filter", "reconstruct hidden state from poses");
  add_common(filter);
  filter->add_option("--input", input_path, "measurement CSV")->required();
  filter->add_option("--output", estimate_path, "estimate CSV path");

  CLI::App* segment = app.add_subcommand("segment", "detect policy changepoints");
  add_common(segment);
  segment->add_option("--input", input_path, "measurement CSV")->required();
  segment->add_option("--output", segments_path, "segment JSONL path");

  CLI::App* predict = app.add_subcommand("predict", "roll the detected policy forward");
  add_common(predict);
  predict->add_option("--input", input_path, "measurement CSV")->required();
  predict->add_option("--output", predicted_path, "predicted CSV path");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score filtering on seeded benchmarks");
  add_common(evaluate);
  evaluate->add_option("--route", opts.route_text, "entry:exit leg pair, e.g. 0:2");
  evaluate->add_option("--seed", seed, "benchmark seed")->required();
  evaluate->add_option("--trials", trials, "number of independent trials");
  evaluate->add_option("--jobs", jobs, "worker threads");
  evaluate->add_option("--out-metrics", metrics_path, "key=value metrics path");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return run_generate(opts, seed, truth_path, meas_path);
    if (filter->parsed()) return run_filter(opts, input_path, estimate_path);
    if (segment->parsed()) return run_segment(opts, input_path, segments_path);
    if (predict->parsed()) return run_predict(opts, input_path, predicted_path);
    if (evaluate->parsed()) return run_evaluate(opts, seed, trials, jobs, metrics_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const vesp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run '" << argv[0] << " --help' for usage\n";
    return 1;
  } catch (const vesp::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vesp::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
