#pragma once

#include <span>

#include <Eigen/Dense>

#include "nestcal/covariance.hpp"
#include "nestcal/logsys.hpp"

namespace nestcal {

/// First and second moments of the log-domain measurement noise xi.
struct NoiseModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::Index source_sample_count = 0;
};

/// -0.5/T on the N(N+1)/2 mu rows, 0 on the nu rows. t == 0 stands for the
/// T -> infinity limit and yields the zero vector.
Eigen::VectorXd noise_mean(Eigen::Index t, int sensor_count);

/// Large-T covariance of xi for the given rows, from a (sample or model)
/// covariance R:
///   E[eps_ij eps_kl] = (0.5/T) Re{ R_ik R*_jl / (R_ij R*_kl) + R_il R*_jk / (R_ij R_kl) }
///   E[eps_ij ups_kl] = (0.5/T) Im{ R_il R*_jk / (R_ij R_kl) - R_ik R*_jl / (R_ij R*_kl) }
///   E[ups_ij ups_kl] = (0.5/T) Re{ R_ik R*_jl / (R_ij R*_kl) - R_il R*_jk / (R_ij R_kl) }
/// with eps the mu-row noise and ups the nu-row noise.
Eigen::MatrixXd noise_covariance(const CovarianceEstimate& cov, Eigen::Index t,
                                 std::span<const SystemRow> rows);

/// Adds floor * mean(diag) * I.
Eigen::MatrixXd regularize(const Eigen::MatrixXd& noise_cov, double floor);

struct WeightOptions {
  double regularization_floor = 1e-10;
  double ambiguous_row_inflation = 100.0;
};

/// Plug-in noise model for a system assembled from `cov`: moments at
/// T = cov.sample_count (or `t_override` when cov is exact), branch-ambiguous
/// rows inflated, then regularized.
NoiseModel build_noise_model(const LogLinearSystem& system, const CovarianceEstimate& cov,
                             const WeightOptions& options = {}, Eigen::Index t_override = 0);

}  // namespace nestcal
