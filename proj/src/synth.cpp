#include "nestcal/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

CalibrationParams CalibrationParams::identity(int n) {
  return {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)};
}

void CalibrationParams::validate(int n) const {
  if (gains.size() != n || phases.size() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "calibration has " + std::to_string(gains.size()) + " gains and " +
                    std::to_string(phases.size()) + " phases for " + std::to_string(n) +
                    " sensors");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(gains(k) > 0.0) || !std::isfinite(gains(k))) {
      throw Error(ErrorKind::InvalidArgument, "gain " + std::to_string(k) + " is not positive");
    }
    if (!(phases(k) >= -std::numbers::pi && phases(k) < std::numbers::pi)) {
      throw Error(ErrorKind::InvalidArgument,
                  "phase " + std::to_string(k) + " outside [-pi, pi)");
    }
  }
}

bool CalibrationParams::satisfies_references() const noexcept {
  return gains.size() >= 2 && gains(0) == 1.0 && phases(0) == 0.0 && phases(1) == 0.0;
}

void SourceScene::validate() const {
  if (angles_deg.size() != powers.size()) {
    throw Error(ErrorKind::DimensionMismatch, "angles and powers differ in length");
  }
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
    throw Error(ErrorKind::InvalidArgument, "noise power must be nonnegative");
  }
  std::set<double> seen;
  for (std::size_t m = 0; m < angles_deg.size(); ++m) {
    if (!(angles_deg[m] > 0.0 && angles_deg[m] < 180.0)) {
      throw Error(ErrorKind::InvalidArgument, "source angle outside (0, 180) degrees");
    }
    if (!(powers[m] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "source power must be positive");
    }
    if (!seen.insert(angles_deg[m]).second) {
      throw Error(ErrorKind::InvalidArgument, "source angles must be distinct");
    }
  }
}

std::vector<double> uniform_angles(int m, double lo_deg, double hi_deg) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "negative source count");
  std::vector<double> out;
  if (m == 1) {
    out.push_back(0.5 * (lo_deg + hi_deg));
    return out;
  }
  for (int k = 0; k < m; ++k) {
    out.push_back(lo_deg + (hi_deg - lo_deg) * k / (m - 1));
  }
  return out;
}

namespace {

// (g1 + j g2) * sqrt(power / 2) with g1, g2 standard normal.
void fill_circular_normal(Eigen::MatrixXcd& out, const Eigen::VectorXd& row_power,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(r, t) = std::complex<double>(re, im) * std::sqrt(row_power(r) / 2.0);
    }
  }
}

}  // namespace

SnapshotMatrix synthesize(const ArrayGeometry& geom, const SourceScene& scene,
                          const CalibrationParams& calib, Eigen::Index t, std::uint64_t seed) {
  if (t < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  scene.validate();
  calib.validate(geom.size());

  const int n = geom.size();
  const int m = scene.source_count();
  std::mt19937_64 rng(seed);

  Eigen::MatrixXcd x(n, t);
  if (m > 0) {
    Eigen::MatrixXcd s(m, t);
    fill_circular_normal(s, Eigen::Map<const Eigen::VectorXd>(scene.powers.data(), m), rng);
    x.noalias() = manifold(geom, scene.angles_deg) * s;
  } else {
    x.setZero();
  }
  Eigen::MatrixXcd v(n, t);
  fill_circular_normal(v, Eigen::VectorXd::Constant(n, scene.noise_power), rng);
  x += v;

  Eigen::VectorXcd distortion(n);
  for (int k = 0; k < n; ++k) distortion(k) = std::polar(calib.gains(k), calib.phases(k));
  return SnapshotMatrix{distortion.asDiagonal() * x};
}

double snr_to_noise_power(double snr_db, double source_power) {
  if (!(source_power > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "source power must be positive");
  }
  return source_power / std::pow(10.0, snr_db / 10.0);
}

}  // namespace nestcal
