#include "nestcal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::ZeroElement: return "zero-element";
    case ErrorKind::ZeroDenominator: return "zero-denominator";
    case ErrorKind::ModeMismatch: return "mode-mismatch";
    case ErrorKind::RankDeficient: return "rank-deficient-design";
    case ErrorKind::SingularWeights: return "singular-weights";
    case ErrorKind::SubarrayTooLarge: return "subarray-too-large";
    case ErrorKind::TooManySources: return "too-many-sources";
    case ErrorKind::PeaksNotFound: return "no-m-peaks-found";
    case ErrorKind::CountMismatch: return "count-mismatch";
    case ErrorKind::ConfigInvalid: return "config-invalid";
    case ErrorKind::AllTrialsFailed: return "all-trials-failed";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

ArrayGeometry::ArrayGeometry(int n1, int n2, int spacing_factor, double unit_spacing,
                             double wavelength)
    : n1_(n1),
      n2_(n2),
      spacing_factor_(spacing_factor),
      unit_spacing_(unit_spacing),
      wavelength_(wavelength) {
  if (n1 < 1 || n2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "level sizes must be >= 1");
  }
  if (spacing_factor < 1) {
    throw Error(ErrorKind::InvalidArgument, "spacing factor must be >= 1");
  }
  if (!(unit_spacing > 0.0) || !(wavelength > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "unit spacing and wavelength must be positive");
  }
  positions_.reserve(static_cast<std::size_t>(n1 + n2));
  for (int n = 0; n < n1; ++n) positions_.push_back(n);
  for (int k = 0; k < n2; ++k) positions_.push_back(n1 + k * spacing_factor);
}

ArrayGeometry build_geometry(int n1, int n2, int spacing_factor, double unit_spacing,
                             double wavelength) {
  return ArrayGeometry(n1, n2, spacing_factor, unit_spacing, wavelength);
}

Coarray difference_coarray(const ArrayGeometry& geom) {
  std::set<int> lags;
  for (int a : geom.positions()) {
    for (int b : geom.positions()) lags.insert(a - b);
  }
  Coarray out;
  out.lags.assign(lags.begin(), lags.end());
  int q = 0;
  while (lags.count(q + 1) && lags.count(-(q + 1))) ++q;
  for (int k = -q; k <= q; ++k) out.central_segment.push_back(k);
  return out;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double angle_deg) {
  if (!(angle_deg > 0.0 && angle_deg < 180.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "angle must lie in (0, 180) degrees, got " + std::to_string(angle_deg));
  }
  const double k = 2.0 * std::numbers::pi * geom.spacing_in_wavelengths() *
                   std::cos(deg_to_rad(angle_deg));
  Eigen::VectorXcd a(geom.size());
  for (int n = 0; n < geom.size(); ++n) {
    a(n) = std::polar(1.0, k * geom.positions()[static_cast<std::size_t>(n)]);
  }
  return a;
}

Eigen::MatrixXcd manifold(const ArrayGeometry& geom, std::span<const double> angles_deg) {
  Eigen::MatrixXcd a(geom.size(), static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t m = 0; m < angles_deg.size(); ++m) {
    a.col(static_cast<Eigen::Index>(m)) = steering_vector(geom, angles_deg[m]);
  }
  return a;
}

}  // namespace nestcal
