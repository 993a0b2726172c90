#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>

namespace oracle {

int central_segment_size(const std::vector<int>& positions) {
  std::set<int> diffs;
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = 0; b < positions.size(); ++b) diffs.insert(positions[a] - positions[b]);
  }
  int q = 0;
  while (diffs.count(q + 1) == 1 && diffs.count(-q - 1) == 1) ++q;
  return 2 * q + 1;
}

Eigen::MatrixXcd model_covariance(const nestcal::ArrayGeometry& geom,
                                  const nestcal::SourceScene& scene,
                                  const nestcal::CalibrationParams& calib) {
  const int n = geom.size();
  const double kd = 2.0 * std::numbers::pi * geom.unit_spacing() / geom.wavelength();
  Eigen::MatrixXcd r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::complex<double> c = (i == j) ? scene.noise_power : 0.0;
      const int lag = geom.positions()[i] - geom.positions()[j];
      for (std::size_t m = 0; m < scene.angles_deg.size(); ++m) {
        const double alpha = scene.angles_deg[m] * std::numbers::pi / 180.0;
        c += scene.powers[m] * std::exp(std::complex<double>(0.0, kd * lag * std::cos(alpha)));
      }
      r(i, j) = calib.gains(i) * calib.gains(j) *
                std::exp(std::complex<double>(0.0, calib.phases(i) - calib.phases(j))) * c;
    }
  }
  return r;
}

namespace {

double e_mu_mu(const Eigen::MatrixXcd& R, int i, int j, int k, int l, double t) {
  const auto a = R(i, k) * std::conj(R(j, l)) / (R(i, j) * std::conj(R(k, l)));
  const auto b = R(i, l) * std::conj(R(j, k)) / (R(i, j) * R(k, l));
  return 0.5 / t * std::real(a + b);
}

double e_nu_nu(const Eigen::MatrixXcd& R, int i, int j, int k, int l, double t) {
  const auto a = R(i, k) * std::conj(R(j, l)) / (R(i, j) * std::conj(R(k, l)));
  const auto b = R(i, l) * std::conj(R(j, k)) / (R(i, j) * R(k, l));
  return 0.5 / t * std::real(a - b);
}

// E[eps_ij * ups_kl]
double e_mu_nu(const Eigen::MatrixXcd& R, int i, int j, int k, int l, double t) {
  const auto a = R(i, l) * std::conj(R(j, k)) / (R(i, j) * R(k, l));
  const auto b = R(i, k) * std::conj(R(j, l)) / (R(i, j) * std::conj(R(k, l)));
  return 0.5 / t * std::imag(a - b);
}

}  // namespace

Eigen::MatrixXd noise_covariance(const Eigen::MatrixXcd& r, double t,
                                 const std::vector<nestcal::SystemRow>& rows) {
  using nestcal::RowKind;
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& p = rows[a];
      const auto& q = rows[b];
      if (p.kind == RowKind::Mu && q.kind == RowKind::Mu) {
        out(a, b) = e_mu_mu(r, p.i, p.j, q.i, q.j, t);
      } else if (p.kind == RowKind::Nu && q.kind == RowKind::Nu) {
        out(a, b) = e_nu_nu(r, p.i, p.j, q.i, q.j, t);
      } else if (p.kind == RowKind::Mu) {
        out(a, b) = e_mu_nu(r, p.i, p.j, q.i, q.j, t);
      } else {
        out(a, b) = e_mu_nu(r, q.i, q.j, p.i, p.j, t);
      }
    }
  }
  return out;
}

Eigen::MatrixXd unmerged_design(int n1, int n2) {
  const int n = n1 + n2;
  // 1-based slot bookkeeping.
  const int n_gain = n - 1, n_phase = n - 2, n_rho1 = n1 + 1, n_iota1 = n1, n_rho2 = n2 - 1,
            n_iota2 = n2 - 1, n_cross = n1 * (n2 - 1);
  const int off_phase = n_gain;
  const int off_rho1 = off_phase + n_phase;
  const int off_iota1 = off_rho1 + n_rho1;
  const int off_rho2 = off_iota1 + n_iota1;
  const int off_iota2 = off_rho2 + n_rho2;
  const int off_p = off_iota2 + n_iota2;
  const int off_i = off_p + n_cross;
  const int k = off_i + n_cross;

  auto gain_col = [&](int s) { return s >= 2 ? s - 2 : -1; };
  auto phase_col = [&](int s) { return s >= 3 ? off_phase + s - 3 : -1; };

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n * n, k);
  int row = 0;
  auto nuisance = [&](int i, int j, bool re) {
    const int lag1 = std::abs(i - j) + 1;
    if (i <= n1 + 1 && j <= n1 + 1) return re ? off_rho1 + lag1 - 1 : off_iota1 + lag1 - 2;
    if (i - n1 >= 1 && j - n1 >= 1) {
      if (lag1 == 1) return off_rho1;  // rho2_1 == rho1_1
      return re ? off_rho2 + lag1 - 2 : off_iota2 + lag1 - 2;
    }
    const int c = j - n1 - 1;  // P_{i, j-N1-1}, 1-based column
    return (re ? off_p : off_i) + (i - 1) * (n2 - 1) + (c - 1);
  };
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j, ++row) {
      if (gain_col(i) >= 0) h(row, gain_col(i)) += 1;
      if (gain_col(j) >= 0) h(row, gain_col(j)) += 1;
      h(row, nuisance(i, j, true)) += 1;
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j, ++row) {
      if (phase_col(i) >= 0) h(row, phase_col(i)) += 1;
      if (phase_col(j) >= 0) h(row, phase_col(j)) -= 1;
      h(row, nuisance(i, j, false)) += 1;
    }
  }
  return h;
}

nestcal::CalibrationParams random_calibration(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gain(0.5, 2.5);
  std::uniform_real_distribution<double> phase(-15.0, 15.0);
  nestcal::CalibrationParams c = nestcal::CalibrationParams::identity(n);
  for (int k = 1; k < n; ++k) c.gains(k) = gain(rng);
  for (int k = 2; k < n; ++k) c.phases(k) = phase(rng) * std::numbers::pi / 180.0;
  return c;
}

}  // namespace oracle
