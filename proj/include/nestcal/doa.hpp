#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nestcal/covariance.hpp"
#include "nestcal/geometry.hpp"

namespace nestcal {

/// Search grid in degrees, inclusive of both ends.
struct AngleGrid {
  double start = 0.02;
  double stop = 179.98;
  double step = 0.02;

  Eigen::Index size() const;
  double at(Eigen::Index k) const { return start + step * static_cast<double>(k); }
};

struct DoaEstimate {
  std::vector<double> angles_deg;  // ascending
  Eigen::VectorXd spectrum;        // one value per grid point
  AngleGrid grid;
};

/// Averages C_ij over all sensor pairs sharing each lag of the central
/// contiguous segment, ordered from lag -Q to +Q.
Eigen::VectorXcd coarray_vectorize(const CovarianceEstimate& cov, const ArrayGeometry& geom);

/// (1/(Q+1)) sum_i z_i z_i^H over the Q+1 length-(Q+1) windows of z. A
/// subarray_size of 0 picks the default (len(z) + 1) / 2.
Eigen::MatrixXcd spatial_smoothing(const Eigen::VectorXcd& z, Eigen::Index subarray_size = 0);

/// MUSIC pseudo-spectrum 1 / ||E_n^H a(angle)||^2 for a virtual ULA with
/// element spacing `spacing_wavelengths`, and its m strongest peaks.
DoaEstimate music_spectrum(const Eigen::MatrixXcd& r_ss, int m, double spacing_wavelengths,
                           const AngleGrid& grid = {});

/// Coarray vectorization, spatial smoothing, and MUSIC in one call.
DoaEstimate ss_music(const CovarianceEstimate& cov, const ArrayGeometry& geom, int m,
                     const AngleGrid& grid = {});

/// Sorts both sides, pairs in order, returns the root mean squared difference.
double doa_rmse(const DoaEstimate& estimated, std::span<const double> truth_deg);
double doa_rmse(std::span<const double> estimated_deg, std::span<const double> truth_deg);

}  // namespace nestcal
