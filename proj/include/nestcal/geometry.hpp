#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nestcal {

/// Two-level nested linear array: a dense ULA of n1 sensors at spacing d
/// followed by a sparse ULA of n2 sensors at spacing L*d. Sensor n (0-based)
/// sits at positions()[n] * d.
class ArrayGeometry {
 public:
  ArrayGeometry(int n1, int n2, int spacing_factor, double unit_spacing, double wavelength);

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  int size() const noexcept { return n1_ + n2_; }
  int spacing_factor() const noexcept { return spacing_factor_; }
  double unit_spacing() const noexcept { return unit_spacing_; }
  double wavelength() const noexcept { return wavelength_; }
  /// d / lambda.
  double spacing_in_wavelengths() const noexcept { return unit_spacing_ / wavelength_; }

  /// Integer multipliers of d, strictly increasing, positions()[0] == 0.
  const std::vector<int>& positions() const noexcept { return positions_; }

  bool is_proposed_design() const noexcept { return spacing_factor_ == n1_; }
  bool is_conventional_design() const noexcept { return spacing_factor_ == n1_ + 1; }

 private:
  int n1_;
  int n2_;
  int spacing_factor_;
  double unit_spacing_;
  double wavelength_;
  std::vector<int> positions_;
};

ArrayGeometry build_geometry(int n1, int n2, int spacing_factor, double unit_spacing,
                             double wavelength);

struct Coarray {
  std::vector<int> lags;             // sorted, symmetric about 0
  std::vector<int> central_segment;  // {-Q, ..., Q}

  int max_contiguous_lag() const noexcept {
    return central_segment.empty() ? 0 : central_segment.back();
  }
};

Coarray difference_coarray(const ArrayGeometry& geom);

/// a_n(angle) = exp(j 2 pi (d / lambda) i_n cos(angle)), angle in degrees,
/// restricted to the open interval (0, 180).
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double angle_deg);

/// Columns are steering vectors, one per angle.
Eigen::MatrixXcd manifold(const ArrayGeometry& geom, std::span<const double> angles_deg);

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

}  // namespace nestcal
