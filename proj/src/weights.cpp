#include "nestcal/weights.hpp"

#include <complex>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

Eigen::VectorXd noise_mean(Eigen::Index t, int sensor_count) {
  const Eigen::Index n = sensor_count;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n * n);
  if (t > 0) mean.head(n * (n + 1) / 2).setConstant(-0.5 / static_cast<double>(t));
  return mean;
}

Eigen::MatrixXd noise_covariance(const CovarianceEstimate& cov, Eigen::Index t,
                                 std::span<const SystemRow> rows) {
  if (t < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  const auto& r = cov.matrix;
  for (const auto& row : rows) {
    if (r(row.i, row.j) == 0.0) {
      throw EntryError(ErrorKind::ZeroDenominator, row.i, row.j, "zero covariance entry");
    }
  }

  const double scale = 0.5 / static_cast<double>(t);
  const auto size = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    const auto& ra = rows[static_cast<std::size_t>(a)];
    for (Eigen::Index b = a; b < size; ++b) {
      const auto& rb = rows[static_cast<std::size_t>(b)];
      // Order the pair so a mu row (if any) comes first.
      const bool swap = ra.kind == RowKind::Nu && rb.kind == RowKind::Mu;
      const SystemRow& p = swap ? rb : ra;
      const SystemRow& q = swap ? ra : rb;
      const int i = p.i, j = p.j, k = q.i, l = q.j;
      const std::complex<double> direct =
          r(i, k) * std::conj(r(j, l)) / (r(i, j) * std::conj(r(k, l)));
      const std::complex<double> crossed = r(i, l) * std::conj(r(j, k)) / (r(i, j) * r(k, l));
      double v;
      if (p.kind == RowKind::Mu && q.kind == RowKind::Mu) {
        v = (direct + crossed).real();
      } else if (p.kind == RowKind::Nu && q.kind == RowKind::Nu) {
        v = (direct - crossed).real();
      } else {
        v = (crossed - direct).imag();
      }
      out(a, b) = scale * v;
      out(b, a) = scale * v;
    }
  }
  return out;
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& noise_cov, double floor) {
  if (!(floor >= 0.0)) throw Error(ErrorKind::InvalidArgument, "floor must be >= 0");
  Eigen::MatrixXd out = noise_cov;
  if (floor > 0.0 && out.rows() > 0) {
    out.diagonal().array() += floor * out.diagonal().mean();
  }
  return out;
}

NoiseModel build_noise_model(const LogLinearSystem& system, const CovarianceEstimate& cov,
                             const WeightOptions& options, Eigen::Index t_override) {
  const Eigen::Index t = cov.is_exact() ? t_override : cov.sample_count;
  if (t < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "exact covariance needs an explicit sample count for the weights");
  }
  NoiseModel model;
  model.source_sample_count = t;
  model.mean = noise_mean(t, static_cast<int>(cov.size()));
  model.covariance = noise_covariance(cov, t, system.rows);
  for (std::size_t k = 0; k < system.branch_ambiguous.size(); ++k) {
    if (!system.branch_ambiguous[k]) continue;
    const auto idx = static_cast<Eigen::Index>(k);
    const double s = std::sqrt(options.ambiguous_row_inflation);
    model.covariance.row(idx) *= s;
    model.covariance.col(idx) *= s;
  }
  model.covariance = regularize(model.covariance, options.regularization_floor);
  return model;
}

}  // namespace nestcal
