#include "nestcal/covariance.hpp"

#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

CovarianceEstimate sample_covariance(const SnapshotMatrix& snapshots) {
  const auto& x = snapshots.data;
  if (x.cols() == 0 || x.rows() == 0) {
    throw Error(ErrorKind::EmptyInput, "no snapshots");
  }
  Eigen::MatrixXcd r = (x * x.adjoint()) / static_cast<double>(x.cols());
  Eigen::MatrixXcd hermitian = 0.5 * (r + r.adjoint());
  return {std::move(hermitian), x.cols()};
}

Eigen::MatrixXcd nominal_covariance(const ArrayGeometry& geom, const SourceScene& scene) {
  scene.validate();
  const int n = geom.size();
  Eigen::MatrixXcd c = scene.noise_power * Eigen::MatrixXcd::Identity(n, n);
  if (scene.source_count() > 0) {
    const Eigen::MatrixXcd a = manifold(geom, scene.angles_deg);
    const Eigen::Map<const Eigen::VectorXd> p(scene.powers.data(), scene.source_count());
    c += a * p.cast<std::complex<double>>().asDiagonal() * a.adjoint();
  }
  return 0.5 * (c + c.adjoint());
}

CovarianceEstimate model_covariance(const ArrayGeometry& geom, const SourceScene& scene,
                                    const CalibrationParams& calib) {
  calib.validate(geom.size());
  const Eigen::MatrixXcd c = nominal_covariance(geom, scene);
  Eigen::VectorXcd d(geom.size());
  for (int k = 0; k < geom.size(); ++k) d(k) = std::polar(calib.gains(k), calib.phases(k));
  Eigen::MatrixXcd r = d.asDiagonal() * c * d.conjugate().asDiagonal();
  return {0.5 * (r + r.adjoint()), 0};
}

double toeplitz_block_deviation(const Eigen::MatrixXcd& cov, const ArrayGeometry& geom) {
  if (cov.rows() != geom.size() || cov.cols() != geom.size()) {
    throw Error(ErrorKind::DimensionMismatch, "covariance does not match geometry");
  }
  auto block_deviation = [&](int first, int size) {
    double worst = 0.0;
    for (int lag = 0; lag < size; ++lag) {
      std::complex<double> mean = 0.0;
      for (int i = 0; i + lag < size; ++i) mean += cov(first + i, first + i + lag);
      mean /= static_cast<double>(size - lag);
      for (int i = 0; i + lag < size; ++i) {
        worst = std::max(worst, std::abs(cov(first + i, first + i + lag) - mean));
      }
    }
    return worst;
  };
  return std::max(block_deviation(0, geom.n1() + 1), block_deviation(geom.n1(), geom.n2()));
}

}  // namespace nestcal
