#include "nestcal/doa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

namespace {

// Peaks closer than this many grid steps are treated as one.
constexpr Eigen::Index min_peak_separation = 4;

}  // namespace

Eigen::Index AngleGrid::size() const {
  if (!(step > 0.0) || stop < start) {
    throw Error(ErrorKind::InvalidArgument, "invalid angle grid");
  }
  return static_cast<Eigen::Index>(std::floor((stop - start) / step + 1e-9)) + 1;
}

Eigen::VectorXcd coarray_vectorize(const CovarianceEstimate& cov, const ArrayGeometry& geom) {
  if (cov.size() != geom.size()) {
    throw Error(ErrorKind::DimensionMismatch, "covariance does not match geometry");
  }
  const int q = difference_coarray(geom).max_contiguous_lag();
  const auto& pos = geom.positions();
  std::vector<std::complex<double>> sum(static_cast<std::size_t>(2 * q + 1), 0.0);
  std::vector<int> count(static_cast<std::size_t>(2 * q + 1), 0);
  for (int i = 0; i < geom.size(); ++i) {
    for (int j = 0; j < geom.size(); ++j) {
      const int lag = pos[static_cast<std::size_t>(i)] - pos[static_cast<std::size_t>(j)];
      if (lag < -q || lag > q) continue;
      sum[static_cast<std::size_t>(lag + q)] += cov.matrix(i, j);
      ++count[static_cast<std::size_t>(lag + q)];
    }
  }
  Eigen::VectorXcd z(2 * q + 1);
  for (int k = 0; k <= 2 * q; ++k) {
    z(k) = sum[static_cast<std::size_t>(k)] / static_cast<double>(count[static_cast<std::size_t>(k)]);
  }
  // Exact conjugate symmetry about lag 0.
  for (int k = 1; k <= q; ++k) {
    const std::complex<double> v = 0.5 * (z(q + k) + std::conj(z(q - k)));
    z(q + k) = v;
    z(q - k) = std::conj(v);
  }
  z(q) = z(q).real();
  return z;
}

Eigen::MatrixXcd spatial_smoothing(const Eigen::VectorXcd& z, Eigen::Index subarray_size) {
  const Eigen::Index len = z.size();
  if (subarray_size == 0) subarray_size = (len + 1) / 2;
  if (subarray_size < 1 || subarray_size > len) {
    throw Error(ErrorKind::SubarrayTooLarge, "subarray size " + std::to_string(subarray_size) +
                                                 " does not fit a coarray of length " +
                                                 std::to_string(len));
  }
  const Eigen::Index windows = len - subarray_size + 1;
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(subarray_size, subarray_size);
  for (Eigen::Index i = 0; i < windows; ++i) {
    const auto w = z.segment(i, subarray_size);
    r.noalias() += w * w.adjoint();
  }
  r /= static_cast<double>(windows);
  return 0.5 * (r + r.adjoint());
}

namespace {

void check_source_count(int m, Eigen::Index size) {
  if (m < 1 || m >= size) {
    throw Error(ErrorKind::TooManySources, std::to_string(m) + " sources with a subarray of " +
                                               std::to_string(size));
  }
}

DoaEstimate music_from_noise_subspace(const Eigen::MatrixXcd& noise, int m,
                                      double spacing_wavelengths, const AngleGrid& grid) {
  const Eigen::Index size = noise.rows();
  DoaEstimate out;
  out.grid = grid;
  const Eigen::Index points = grid.size();
  out.spectrum.resize(points);
  Eigen::VectorXcd a(size);
  for (Eigen::Index g = 0; g < points; ++g) {
    const double w = 2.0 * std::numbers::pi * spacing_wavelengths *
                     std::cos(deg_to_rad(grid.at(g)));
    for (Eigen::Index k = 0; k < size; ++k) a(k) = std::polar(1.0, w * static_cast<double>(k));
    const double denom = (noise.adjoint() * a).squaredNorm();
    out.spectrum(g) = 1.0 / std::max(denom, std::numeric_limits<double>::min());
  }

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index g = 1; g + 1 < points; ++g) {
    if (out.spectrum(g) > out.spectrum(g - 1) && out.spectrum(g) >= out.spectrum(g + 1)) {
      candidates.push_back(g);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](Eigen::Index l, Eigen::Index r) {
    return out.spectrum(l) > out.spectrum(r);
  });
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index c : candidates) {
    const bool near = std::any_of(peaks.begin(), peaks.end(), [&](Eigen::Index p) {
      return std::abs(p - c) < min_peak_separation;
    });
    if (!near) peaks.push_back(c);
    if (static_cast<int>(peaks.size()) == m) break;
  }
  if (static_cast<int>(peaks.size()) < m) {
    throw Error(ErrorKind::PeaksNotFound, "found " + std::to_string(peaks.size()) +
                                              " spectrum peaks, need " + std::to_string(m));
  }

  // Parabolic refinement on the dB spectrum.
  for (Eigen::Index p : peaks) {
    const double l = std::log10(out.spectrum(p - 1));
    const double c = std::log10(out.spectrum(p));
    const double r = std::log10(out.spectrum(p + 1));
    const double curvature = l - 2.0 * c + r;
    double offset = curvature < 0.0 ? 0.5 * (l - r) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    out.angles_deg.push_back(grid.at(p) + offset * grid.step);
  }
  std::sort(out.angles_deg.begin(), out.angles_deg.end());
  return out;
}

}  // namespace

DoaEstimate music_spectrum(const Eigen::MatrixXcd& r_ss, int m, double spacing_wavelengths,
                           const AngleGrid& grid) {
  const Eigen::Index size = r_ss.rows();
  check_source_count(m, size);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r_ss);
  // Eigenvalues ascending: the first size - m span the noise subspace.
  return music_from_noise_subspace(eig.eigenvectors().leftCols(size - m), m, spacing_wavelengths,
                                   grid);
}

DoaEstimate ss_music(const CovarianceEstimate& cov, const ArrayGeometry& geom, int m,
                     const AngleGrid& grid) {
  // With the default subarray the smoothed matrix equals T^2 / (Q + 1), where
  // T is the Hermitian Toeplitz matrix T_ab = z(a - b). Taking the noise
  // subspace from T directly avoids squaring its condition number, which
  // matters for dense source scenes.
  const Eigen::VectorXcd z = coarray_vectorize(cov, geom);
  const Eigen::Index size = (z.size() + 1) / 2;
  const Eigen::Index q = size - 1;
  check_source_count(m, size);
  Eigen::MatrixXcd t(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = 0; b < size; ++b) t(a, b) = z(q + a - b);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(t);
  // Smallest |eigenvalue| of T <-> smallest eigenvalue of T^2.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(size));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return std::abs(eig.eigenvalues()(l)) < std::abs(eig.eigenvalues()(r));
  });
  Eigen::MatrixXcd noise(size, size - m);
  for (Eigen::Index k = 0; k < size - m; ++k) {
    noise.col(k) = eig.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return music_from_noise_subspace(noise, m, geom.spacing_in_wavelengths(), grid);
}

double doa_rmse(std::span<const double> estimated_deg, std::span<const double> truth_deg) {
  if (estimated_deg.size() != truth_deg.size() || truth_deg.empty()) {
    throw Error(ErrorKind::CountMismatch, "estimated and true angle counts differ");
  }
  std::vector<double> e(estimated_deg.begin(), estimated_deg.end());
  std::vector<double> t(truth_deg.begin(), truth_deg.end());
  std::sort(e.begin(), e.end());
  std::sort(t.begin(), t.end());
  double sq = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) sq += (e[k] - t[k]) * (e[k] - t[k]);
  return std::sqrt(sq / static_cast<double>(e.size()));
}

double doa_rmse(const DoaEstimate& estimated, std::span<const double> truth_deg) {
  return doa_rmse(std::span<const double>(estimated.angles_deg), truth_deg);
}

}  // namespace nestcal
