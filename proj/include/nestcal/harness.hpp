#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nestcal/estimator.hpp"
#include "nestcal/geometry.hpp"
#include "nestcal/logsys.hpp"
#include "nestcal/synth.hpp"

namespace nestcal {

enum class SweepAxis { SampleCount, Snr };

std::string to_string(SweepAxis axis);

struct ExperimentConfig {
  int n1 = 4;
  int n2 = 4;
  int spacing_factor = 4;
  double unit_spacing = 0.5;
  double wavelength = 1.0;

  CalibrationParams truth;
  std::vector<double> source_angles_deg;
  double source_power = 1.0;

  SweepAxis axis = SweepAxis::SampleCount;
  std::vector<double> t_grid;
  std::vector<double> snr_grid_db;
  Eigen::Index fixed_t = 2000;
  double fixed_snr_db = 10.0;

  int trials = 1000;
  std::uint64_t seed = 1;
  DesignMode mode = DesignMode::proposed();
  /// 0 = hardware concurrency.
  int threads = 0;
  WeightOptions weights;

  std::filesystem::path out_dir = "results";

  ArrayGeometry geometry() const;
  const std::vector<double>& grid() const { return axis == SweepAxis::SampleCount ? t_grid : snr_grid_db; }
  /// Throws ConfigInvalid on any violated invariant.
  void validate() const;
};

/// The reference experiment: N1 = N2 = L = 4, d = lambda/2, 15 unit-power
/// sources on [20, 70] degrees, fixed gains and phases with sensor 0 and the
/// phases of sensors 0, 1 as references.
ExperimentConfig default_config();

/// Three sources at 33, 45, 57 degrees on the default array.
ExperimentConfig default_doa_config();

struct MethodRecord {
  std::string method;  // "ls", "ml_owls", or "uncalibrated"
  double mse_gain = 0.0;
  double mse_phase_rad2 = 0.0;
  std::optional<double> doa_rmse_deg;
  double mean_solve_ms = 0.0;
  int failures = 0;
};

struct PointRecord {
  double axis_value = 0.0;
  std::vector<MethodRecord> methods;

  const MethodRecord& method(const std::string& name) const;
};

struct ExperimentResult {
  SweepAxis axis = SweepAxis::SampleCount;
  std::vector<PointRecord> records;
};

/// Per-trial seed derived from (master, point, trial); streams are disjoint.
std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial);

/// synthesize -> sample covariance -> assemble -> LS and ML-OWLS, averaged
/// over trials at each grid point.
ExperimentResult run_calibration_sweep(const ExperimentConfig& config);

/// As run_calibration_sweep, then SS-MUSIC on the covariance corrected by
/// each estimate, plus an uncalibrated baseline on the raw sample covariance.
ExperimentResult run_doa_sweep(const ExperimentConfig& config);

struct TimingRecord {
  double median_ms = 0.0;
  double mean_ms = 0.0;
  int repetitions = 0;
};

/// Wall time of assemble + ML-OWLS at the config's fixed T and SNR, one
/// synthesized covariance reused across repetitions.
TimingRecord benchmark_solver(const ExperimentConfig& config, int repetitions = 100);

enum class OutputFormat { Csv, Plot };

std::string to_csv(const ExperimentResult& result, bool include_timing = true);
std::string to_svg(const ExperimentResult& result, const std::string& title);

/// Writes `<stem>.csv` or `<stem>.svg` under dir; returns the file path.
std::filesystem::path emit_results(const ExperimentResult& result, OutputFormat format,
                                   const std::filesystem::path& dir, const std::string& stem);

/// "proposed", "conventional", or "third-ref". A negative sensor for
/// third-ref selects the first free second-level sensor, N1 + 1.
DesignMode parse_design_mode(const std::string& name, int n1, int third_ref_sensor = -1);

/// JSON config file. Missing keys keep default_config() values.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace nestcal
