// nestcal: blind gain/phase calibration of two-level nested arrays.
//
//   nestcal sweep-t   [--config f] [--trials n] [--seed s] [--mode m] [--out dir] [--format csv|plot]
//   nestcal sweep-snr ...
//   nestcal doa       ... [--axis t|snr]
//   nestcal bench     ... [--repetitions n]
//   nestcal calibrate --input snapshots.bin [--method ls|ml_owls] ...
//   nestcal synth     --output snapshots.bin [--t n] [--snr db] ...
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nestcal/covariance.hpp"
#include "nestcal/error.hpp"
#include "nestcal/estimator.hpp"
#include "nestcal/harness.hpp"
#include "nestcal/snapshot_io.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> third_ref_sensor;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials per grid point");
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--mode", o.mode, "system mode")
      ->check(CLI::IsMember({"proposed", "conventional", "third-ref"}));
  cmd->add_option("--third-ref-sensor", o.third_ref_sensor, "0-based sensor for third-ref mode");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "plot"}));
}

nestcal::ExperimentConfig resolve(const CommonOptions& o, nestcal::ExperimentConfig base) {
  nestcal::ExperimentConfig c = o.config_path.empty() ? base : nestcal::load_config(o.config_path);
  if (o.config_path.empty()) c.axis = base.axis;
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.mode || o.third_ref_sensor) {
    c.mode = nestcal::parse_design_mode(o.mode.value_or(nestcal::to_string(c.mode)), c.n1,
                                        o.third_ref_sensor.value_or(c.mode.third_ref_sensor));
  }
  return c;
}

void print_summary(const nestcal::ExperimentResult& result) {
  std::cout << nestcal::to_csv(result);
}

int write(const nestcal::ExperimentResult& result, const CommonOptions& o,
          const nestcal::ExperimentConfig& c, const std::string& stem) {
  print_summary(result);
  const auto format = o.format == "plot" ? nestcal::OutputFormat::Plot : nestcal::OutputFormat::Csv;
  const auto path = nestcal::emit_results(result, format, c.out_dir, stem);
  std::cerr << "wrote " << path.string() << '\n';
  return 0;
}

void warn_failures(const nestcal::ExperimentResult& result) {
  for (const auto& p : result.records) {
    for (const auto& m : p.methods) {
      if (m.failures > 0) {
        std::cerr << "warning: " << m.failures << " failed trials for " << m.method << " at "
                  << nestcal::to_string(result.axis) << " = " << p.axis_value << '\n';
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind gain/phase calibration for two-level nested arrays"};
  app.require_subcommand(1);

  CommonOptions sweep_t_opts, sweep_snr_opts, doa_opts, bench_opts, cal_opts, synth_opts;
  auto* sweep_t = app.add_subcommand("sweep-t", "MSE vs number of snapshots at fixed SNR");
  add_common(sweep_t, sweep_t_opts);
  auto* sweep_snr = app.add_subcommand("sweep-snr", "MSE vs SNR at fixed number of snapshots");
  add_common(sweep_snr, sweep_snr_opts);

  auto* doa = app.add_subcommand("doa", "post-calibration SS-MUSIC DOA RMSE sweep");
  add_common(doa, doa_opts);
  std::string doa_axis = "snr";
  doa->add_option("--axis", doa_axis, "sweep axis")->check(CLI::IsMember({"t", "snr"}));

  auto* bench = app.add_subcommand("bench", "time assemble + ML-OWLS solve");
  add_common(bench, bench_opts);
  int repetitions = 100;
  bench->add_option("--repetitions", repetitions, "timed repetitions");

  auto* cal = app.add_subcommand("calibrate", "calibrate from a snapshot file");
  add_common(cal, cal_opts);
  std::string input;
  std::string method = "ml_owls";
  cal->add_option("--input", input, "snapshot file")->required();
  cal->add_option("--method", method, "estimator")->check(CLI::IsMember({"ls", "ml_owls"}));

  auto* synth = app.add_subcommand("synth", "write synthetic snapshots to a file");
  add_common(synth, synth_opts);
  std::string output;
  Eigen::Index samples = 2000;
  double snr_db = 10.0;
  synth->add_option("--output", output, "snapshot file")->required();
  synth->add_option("--t", samples, "number of snapshots");
  synth->add_option("--snr", snr_db, "SNR in dB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  nestcal::ExperimentConfig config;
  try {
    if (sweep_t->parsed()) {
      auto base = nestcal::default_config();
      base.axis = nestcal::SweepAxis::SampleCount;
      config = resolve(sweep_t_opts, base);
      config.axis = nestcal::SweepAxis::SampleCount;
      config.validate();
    } else if (sweep_snr->parsed()) {
      auto base = nestcal::default_config();
      config = resolve(sweep_snr_opts, base);
      config.axis = nestcal::SweepAxis::Snr;
      config.validate();
    } else if (doa->parsed()) {
      config = resolve(doa_opts, nestcal::default_doa_config());
      config.axis = doa_axis == "t" ? nestcal::SweepAxis::SampleCount : nestcal::SweepAxis::Snr;
      config.validate();
    } else if (bench->parsed()) {
      config = resolve(bench_opts, nestcal::default_config());
      config.validate();
    } else if (cal->parsed()) {
      config = resolve(cal_opts, nestcal::default_config());
      config.geometry();
    } else {
      config = resolve(synth_opts, nestcal::default_config());
      config.validate();
    }
  } catch (const nestcal::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    if (sweep_t->parsed()) {
      const auto result = nestcal::run_calibration_sweep(config);
      warn_failures(result);
      return write(result, sweep_t_opts, config, "sweep_t");
    }
    if (sweep_snr->parsed()) {
      const auto result = nestcal::run_calibration_sweep(config);
      warn_failures(result);
      return write(result, sweep_snr_opts, config, "sweep_snr");
    }
    if (doa->parsed()) {
      const auto result = nestcal::run_doa_sweep(config);
      warn_failures(result);
      return write(result, doa_opts, config, doa_axis == "t" ? "doa_t" : "doa_snr");
    }
    if (bench->parsed()) {
      const auto timing = nestcal::benchmark_solver(config, repetitions);
      std::cout << "repetitions," << timing.repetitions << "\nmedian_ms," << timing.median_ms
                << "\nmean_ms," << timing.mean_ms << '\n';
      return 0;
    }
    if (synth->parsed()) {
      const auto geom = config.geometry();
      const nestcal::SourceScene scene{
          config.source_angles_deg,
          std::vector<double>(config.source_angles_deg.size(), config.source_power),
          nestcal::snr_to_noise_power(snr_db, config.source_power)};
      nestcal::write_snapshots(output, nestcal::synthesize(geom, scene, config.truth, samples, config.seed));
      std::cerr << "wrote " << output << '\n';
      return 0;
    }

    // calibrate
    const auto geom = config.geometry();
    const auto snapshots = nestcal::read_snapshots(input);
    if (snapshots.sensor_count() != geom.size()) {
      std::cerr << "config error: file has " << snapshots.sensor_count()
                << " sensors, geometry has " << geom.size() << '\n';
      return exit_config;
    }
    const auto cov = nestcal::sample_covariance(snapshots);
    const auto est = nestcal::calibrate(cov, geom, config.mode,
                                        method == "ls" ? nestcal::Method::Ls : nestcal::Method::MlOwls,
                                        config.weights);
    nlohmann::json j;
    j["method"] = nestcal::to_string(est.method);
    j["mode"] = nestcal::to_string(config.mode);
    j["sample_count"] = snapshots.sample_count();
    j["gains"] = std::vector<double>(est.gains.data(), est.gains.data() + est.gains.size());
    std::vector<double> phases_deg;
    for (Eigen::Index k = 0; k < est.phases.size(); ++k) phases_deg.push_back(nestcal::rad_to_deg(est.phases(k)));
    j["phases_deg"] = phases_deg;
    j["diagnostics"] = {{"residual_norm", est.diagnostics.residual_norm},
                        {"design_rank", est.diagnostics.design_rank},
                        {"weight_condition", est.diagnostics.weight_condition},
                        {"wrap_warnings", est.diagnostics.wrap_warnings}};
    if (est.diagnostics.wrap_warnings > 0) {
      std::cerr << "warning: " << est.diagnostics.wrap_warnings
                << " phase measurements sit near the branch cut; calibration quality may suffer\n";
    }
    std::cout << j.dump(2) << '\n';
    if (cal_opts.out_dir) {
      std::filesystem::create_directories(config.out_dir);
      std::ofstream(config.out_dir / "calibration.json") << j.dump(2) << '\n';
    }
    return 0;
  } catch (const nestcal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == nestcal::ErrorKind::ConfigInvalid ? exit_config : exit_runtime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}
