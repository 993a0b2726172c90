#pragma once

#include <string>

#include <Eigen/Dense>

#include "nestcal/covariance.hpp"
#include "nestcal/logsys.hpp"
#include "nestcal/synth.hpp"
#include "nestcal/weights.hpp"

namespace nestcal {

enum class Method { Ls, MlOwls };

std::string to_string(Method method);

struct SolverDiagnostics {
  double residual_norm = 0.0;   // weighted residual for ML-OWLS
  Eigen::Index design_rank = 0;
  double weight_condition = 1.0;  // 1-norm estimate; 1 for ordinary LS
  int wrap_warnings = 0;
};

struct CalibrationEstimate {
  Eigen::VectorXd gains;   // gains(0) == 1
  Eigen::VectorXd phases;  // radians, phases(0) == phases(1) == 0
  Eigen::VectorXd theta;
  Method method = Method::Ls;
  SolverDiagnostics diagnostics;

  CalibrationParams params() const { return {gains, phases}; }
};

/// Ordinary least squares on the log-linear system (column-pivoted QR).
CalibrationEstimate solve_ls(const LogLinearSystem& system);

/// (H' L^-1 H)^-1 H' L^-1 (y - eta) via Cholesky whitening and QR.
CalibrationEstimate solve_ml_owls(const LogLinearSystem& system, const NoiseModel& noise);

/// Psi^-1 Phi^* R Phi Psi^-1: the estimate of the offset-free covariance.
CovarianceEstimate apply_calibration(const CovarianceEstimate& cov, const CalibrationEstimate& est);

/// (1/(N-1)) sum_{n>=1} (gain_n - truth_n)^2.
double gain_mse(const Eigen::VectorXd& gains, const Eigen::VectorXd& truth);
/// (1/(N-2)) sum_{n>=2} (phase_n - truth_n)^2, radians^2.
double phase_mse(const Eigen::VectorXd& phases, const Eigen::VectorXd& truth);

/// Assemble + solve in one call.
CalibrationEstimate calibrate(const CovarianceEstimate& cov, const ArrayGeometry& geom,
                              const DesignMode& mode, Method method,
                              const WeightOptions& options = {});

}  // namespace nestcal
