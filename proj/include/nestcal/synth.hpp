#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nestcal/geometry.hpp"

namespace nestcal {

/// Per-sensor gain (positive) and phase (radians) offsets.
struct CalibrationParams {
  Eigen::VectorXd gains;
  Eigen::VectorXd phases;

  static CalibrationParams identity(int n);

  int size() const noexcept { return static_cast<int>(gains.size()); }

  /// Throws InvalidArgument unless gains > 0, phases in [-pi, pi), and both
  /// vectors have length n.
  void validate(int n) const;

  /// psi_1 = 1 and phi_1 = phi_2 = 0.
  bool satisfies_references() const noexcept;
};

/// Uncorrelated far-field sources plus white sensor noise.
struct SourceScene {
  std::vector<double> angles_deg;
  std::vector<double> powers;
  double noise_power = 1.0;

  int source_count() const noexcept { return static_cast<int>(angles_deg.size()); }
  void validate() const;
};

/// M equally spaced angles on [lo, hi], endpoints included.
std::vector<double> uniform_angles(int m, double lo_deg, double hi_deg);

struct SnapshotMatrix {
  Eigen::MatrixXcd data;  // N x T

  Eigen::Index sensor_count() const noexcept { return data.rows(); }
  Eigen::Index sample_count() const noexcept { return data.cols(); }
};

/// Draws T snapshots r(t) = Psi Phi (A s(t) + v(t)) with circular complex
/// normal sources and noise. Deterministic in `seed`.
SnapshotMatrix synthesize(const ArrayGeometry& geom, const SourceScene& scene,
                          const CalibrationParams& calib, Eigen::Index t, std::uint64_t seed);

/// source_power / 10^(snr_db / 10).
double snr_to_noise_power(double snr_db, double source_power);

}  // namespace nestcal
