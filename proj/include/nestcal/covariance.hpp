#pragma once

#include <Eigen/Dense>

#include "nestcal/geometry.hpp"
#include "nestcal/synth.hpp"

namespace nestcal {

/// Hermitian N x N covariance. sample_count == 0 marks an exact model
/// covariance rather than an estimate.
struct CovarianceEstimate {
  Eigen::MatrixXcd matrix;
  Eigen::Index sample_count = 0;

  bool is_exact() const noexcept { return sample_count == 0; }
  Eigen::Index size() const noexcept { return matrix.rows(); }
};

CovarianceEstimate sample_covariance(const SnapshotMatrix& snapshots);

/// A R_s A^H + sigma_v^2 I, the covariance without gain/phase offsets.
Eigen::MatrixXcd nominal_covariance(const ArrayGeometry& geom, const SourceScene& scene);

/// Psi Phi C Phi^* Psi.
CovarianceEstimate model_covariance(const ArrayGeometry& geom, const SourceScene& scene,
                                    const CalibrationParams& calib);

/// Max |C_ij - mean of its diagonal| over the two Toeplitz blocks of a nested
/// array covariance (first (n1+1) x (n1+1) block and last n2 x n2 block).
double toeplitz_block_deviation(const Eigen::MatrixXcd& cov, const ArrayGeometry& geom);

}  // namespace nestcal
