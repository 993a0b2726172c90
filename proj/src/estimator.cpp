#include "nestcal/estimator.hpp"

#include <cmath>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

std::string to_string(Method method) { return method == Method::Ls ? "ls" : "ml_owls"; }

namespace {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              Eigen::Index& rank) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  rank = qr.rank();
  if (rank < a.cols()) {
    throw Error(ErrorKind::RankDeficient, "design has rank " + std::to_string(rank) + " < " +
                                              std::to_string(a.cols()) + " unknowns");
  }
  return qr.solve(b);
}

CalibrationEstimate extract(const LogLinearSystem& system, Eigen::VectorXd theta, Method method) {
  const int n = system.layout.sensor_count();
  CalibrationEstimate est;
  est.gains = Eigen::VectorXd::Ones(n);
  est.phases = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    if (const int c = system.layout.log_gain_column(s); c >= 0) est.gains(s) = std::exp(theta(c));
    if (const int c = system.layout.phase_column(s); c >= 0) est.phases(s) = theta(c);
  }
  est.theta = std::move(theta);
  est.method = method;
  est.diagnostics.wrap_warnings = system.wrap_warning_count();
  return est;
}

}  // namespace

CalibrationEstimate solve_ls(const LogLinearSystem& system) {
  Eigen::Index rank = 0;
  Eigen::VectorXd theta = least_squares(system.design, system.measurements, rank);
  const double residual = (system.measurements - system.design * theta).norm();
  CalibrationEstimate est = extract(system, std::move(theta), Method::Ls);
  est.diagnostics.design_rank = rank;
  est.diagnostics.residual_norm = residual;
  return est;
}

CalibrationEstimate solve_ml_owls(const LogLinearSystem& system, const NoiseModel& noise) {
  const Eigen::Index rows = system.design.rows();
  if (noise.covariance.rows() != rows || noise.covariance.cols() != rows ||
      noise.mean.size() != rows) {
    throw Error(ErrorKind::DimensionMismatch, "noise model does not match the system");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(noise.covariance);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularWeights,
                "noise covariance is not positive definite; increase T or the floor");
  }
  const double rcond = llt.rcond();
  if (!(rcond > 0.0)) {
    throw Error(ErrorKind::SingularWeights, "noise covariance is numerically singular");
  }
  const auto lower = llt.matrixL();
  const Eigen::MatrixXd whitened_design = lower.solve(system.design);
  const Eigen::VectorXd whitened_y = lower.solve(system.measurements - noise.mean);

  Eigen::Index rank = 0;
  Eigen::VectorXd theta = least_squares(whitened_design, whitened_y, rank);
  const double residual = (whitened_y - whitened_design * theta).norm();
  CalibrationEstimate est = extract(system, std::move(theta), Method::MlOwls);
  est.diagnostics.design_rank = rank;
  est.diagnostics.residual_norm = residual;
  est.diagnostics.weight_condition = 1.0 / rcond;
  return est;
}

CovarianceEstimate apply_calibration(const CovarianceEstimate& cov, const CalibrationEstimate& est) {
  const Eigen::Index n = cov.size();
  if (est.gains.size() != n || est.phases.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "estimate does not match covariance");
  }
  Eigen::VectorXcd undo(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(est.gains(k) > 0.0)) throw Error(ErrorKind::InvalidArgument, "gain must be positive");
    undo(k) = std::polar(1.0 / est.gains(k), -est.phases(k));
  }
  Eigen::MatrixXcd c = undo.asDiagonal() * cov.matrix * undo.conjugate().asDiagonal();
  return {0.5 * (c + c.adjoint()), cov.sample_count};
}

double gain_mse(const Eigen::VectorXd& gains, const Eigen::VectorXd& truth) {
  if (gains.size() != truth.size() || gains.size() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "gain vectors differ in length");
  }
  const auto n = gains.size();
  return (gains.tail(n - 1) - truth.tail(n - 1)).squaredNorm() / static_cast<double>(n - 1);
}

double phase_mse(const Eigen::VectorXd& phases, const Eigen::VectorXd& truth) {
  if (phases.size() != truth.size() || phases.size() < 3) {
    throw Error(ErrorKind::DimensionMismatch, "phase vectors differ in length");
  }
  const auto n = phases.size();
  return (phases.tail(n - 2) - truth.tail(n - 2)).squaredNorm() / static_cast<double>(n - 2);
}

CalibrationEstimate calibrate(const CovarianceEstimate& cov, const ArrayGeometry& geom,
                              const DesignMode& mode, Method method,
                              const WeightOptions& options) {
  const LogLinearSystem system = assemble_system(cov, geom, mode);
  if (method == Method::Ls) return solve_ls(system);
  return solve_ml_owls(system, build_noise_model(system, cov, options));
}

}  // namespace nestcal
