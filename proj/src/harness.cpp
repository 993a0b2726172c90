#include "nestcal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "nestcal/covariance.hpp"
#include "nestcal/doa.hpp"
#include "nestcal/error.hpp"

namespace nestcal {

std::string to_string(SweepAxis axis) { return axis == SweepAxis::SampleCount ? "T" : "snr_db"; }

const MethodRecord& PointRecord::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "no record for method " + name);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(trial) >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(k) for k in [0, count) on `threads` workers. Each k writes only
// its own output slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

struct MethodOutcome {
  bool ok = false;
  double mse_gain = 0.0;
  double mse_phase = 0.0;
  double doa_rmse = 0.0;
  double solve_ms = 0.0;
  std::string error;
};

// Slot order in TrialOutcome::methods.
enum Slot : std::size_t { SlotLs = 0, SlotMlOwls = 1, SlotUncalibrated = 2 };

struct TrialOutcome {
  std::array<MethodOutcome, 3> methods;
};

struct PointSetting {
  Eigen::Index t;
  double snr_db;
};

PointSetting point_setting(const ExperimentConfig& config, double axis_value) {
  if (config.axis == SweepAxis::SampleCount) {
    return {static_cast<Eigen::Index>(axis_value), config.fixed_snr_db};
  }
  return {config.fixed_t, axis_value};
}

SourceScene make_scene(const ExperimentConfig& config, double snr_db) {
  return SourceScene{config.source_angles_deg,
                     std::vector<double>(config.source_angles_deg.size(), config.source_power),
                     snr_to_noise_power(snr_db, config.source_power)};
}

TrialOutcome run_trial(const ExperimentConfig& config, const ArrayGeometry& geom,
                       const SourceScene& scene, Eigen::Index t, std::uint64_t seed, bool with_doa) {
  TrialOutcome out;
  const auto snapshots = synthesize(geom, scene, config.truth, t, seed);
  const auto cov = sample_covariance(snapshots);
  const int sources = scene.source_count();

  auto finish = [&](MethodOutcome& m, const CalibrationEstimate& est) {
    m.mse_gain = gain_mse(est.gains, config.truth.gains);
    m.mse_phase = phase_mse(est.phases, config.truth.phases);
    if (with_doa) {
      const auto doa = ss_music(apply_calibration(cov, est), geom, sources);
      m.doa_rmse = doa_rmse(doa, scene.angles_deg);
    }
    m.ok = true;
  };

  std::optional<LogLinearSystem> system;
  double assemble_ms = 0.0;
  try {
    const auto start = Clock::now();
    system.emplace(assemble_system(cov, geom, config.mode));
    assemble_ms = elapsed_ms(start);
  } catch (const Error& e) {
    out.methods[SlotLs].error = out.methods[SlotMlOwls].error = e.what();
  }

  if (system) {
    try {
      const auto start = Clock::now();
      const auto est = solve_ls(*system);
      out.methods[SlotLs].solve_ms = assemble_ms + elapsed_ms(start);
      finish(out.methods[SlotLs], est);
    } catch (const Error& e) {
      out.methods[SlotLs] = MethodOutcome{};
      out.methods[SlotLs].error = e.what();
    }
    try {
      const auto start = Clock::now();
      const auto est = solve_ml_owls(*system, build_noise_model(*system, cov, config.weights));
      out.methods[SlotMlOwls].solve_ms = assemble_ms + elapsed_ms(start);
      finish(out.methods[SlotMlOwls], est);
    } catch (const Error& e) {
      out.methods[SlotMlOwls] = MethodOutcome{};
      out.methods[SlotMlOwls].error = e.what();
    }
  }

  if (with_doa) {
    try {
      CalibrationEstimate identity;
      identity.gains = Eigen::VectorXd::Ones(geom.size());
      identity.phases = Eigen::VectorXd::Zero(geom.size());
      finish(out.methods[SlotUncalibrated], identity);
    } catch (const Error& e) {
      out.methods[SlotUncalibrated] = MethodOutcome{};
      out.methods[SlotUncalibrated].error = e.what();
    }
  }
  return out;
}

MethodRecord reduce(const std::string& name, const std::vector<TrialOutcome>& trials, Slot slot,
                    bool with_doa) {
  MethodRecord rec;
  rec.method = name;
  double g = 0.0, p = 0.0, d = 0.0, ms = 0.0;
  int ok = 0;
  for (const auto& trial : trials) {
    const auto& m = trial.methods[slot];
    if (!m.ok) {
      ++rec.failures;
      continue;
    }
    ++ok;
    g += m.mse_gain;
    p += m.mse_phase;
    d += m.doa_rmse;
    ms += m.solve_ms;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.mse_gain = ok ? g / ok : nan;
  rec.mse_phase_rad2 = ok ? p / ok : nan;
  if (with_doa) rec.doa_rmse_deg = ok ? d / ok : nan;
  rec.mean_solve_ms = ok ? ms / ok : nan;
  return rec;
}

ExperimentResult run_sweep(const ExperimentConfig& config, bool with_doa) {
  config.validate();
  const ArrayGeometry geom = config.geometry();
  if (with_doa) {
    const auto subarray = difference_coarray(geom).max_contiguous_lag() + 1;
    if (static_cast<int>(config.source_angles_deg.size()) >= subarray) {
      throw Error(ErrorKind::TooManySources,
                  std::to_string(config.source_angles_deg.size()) +
                      " sources need a smoothed subarray larger than " + std::to_string(subarray));
    }
  }
  const int threads = resolve_threads(config.threads);

  ExperimentResult result;
  result.axis = config.axis;
  const auto& grid = config.grid();
  for (std::size_t point = 0; point < grid.size(); ++point) {
    const PointSetting setting = point_setting(config, grid[point]);
    const SourceScene scene = make_scene(config, setting.snr_db);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
    parallel_for(outcomes.size(), threads, [&](std::size_t k) {
      outcomes[k] = run_trial(config, geom, scene, setting.t, trial_seed(config.seed, point, k),
                              with_doa);
    });

    PointRecord rec;
    rec.axis_value = grid[point];
    rec.methods.push_back(reduce("ls", outcomes, SlotLs, with_doa));
    rec.methods.push_back(reduce("ml_owls", outcomes, SlotMlOwls, with_doa));
    if (with_doa) rec.methods.push_back(reduce("uncalibrated", outcomes, SlotUncalibrated, true));

    if (rec.methods[SlotLs].failures == config.trials &&
        rec.methods[SlotMlOwls].failures == config.trials) {
      const auto& first = outcomes.front().methods[SlotMlOwls].error;
      throw Error(ErrorKind::AllTrialsFailed,
                  "every trial failed at " + to_string(config.axis) + " = " +
                      std::to_string(grid[point]) + " (first error: " + first + ")");
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace

ExperimentResult run_calibration_sweep(const ExperimentConfig& config) {
  return run_sweep(config, false);
}

ExperimentResult run_doa_sweep(const ExperimentConfig& config) { return run_sweep(config, true); }

TimingRecord benchmark_solver(const ExperimentConfig& config, int repetitions) {
  if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "repetitions must be >= 1");
  config.validate();
  const ArrayGeometry geom = config.geometry();
  const SourceScene scene = make_scene(config, config.fixed_snr_db);
  const auto cov =
      sample_covariance(synthesize(geom, scene, config.truth, config.fixed_t, config.seed));

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  double sink = 0.0;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    const auto system = assemble_system(cov, geom, config.mode);
    const auto est = solve_ml_owls(system, build_noise_model(system, cov, config.weights));
    times.push_back(elapsed_ms(start));
    sink += est.gains(1);
  }
  if (!std::isfinite(sink)) throw Error(ErrorKind::InvalidArgument, "non-finite estimate");

  TimingRecord rec;
  rec.repetitions = repetitions;
  for (double t : times) rec.mean_ms += t;
  rec.mean_ms /= repetitions;
  std::sort(times.begin(), times.end());
  const auto mid = times.size() / 2;
  rec.median_ms = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
  return rec;
}

}  // namespace nestcal
