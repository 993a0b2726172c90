#include <doctest.h>

#include <random>

#include "nestcal/covariance.hpp"
#include "nestcal/error.hpp"
#include "nestcal/harness.hpp"
#include "oracles.hpp"

using namespace nestcal;

namespace {

SourceScene scene() {
  return {{20.0, 47.5, 70.0, 131.0}, {1.0, 0.5, 2.0, 1.5}, 0.2};
}

}  // namespace

TEST_CASE("sample covariance") {
  SnapshotMatrix one{Eigen::MatrixXcd(3, 1)};
  one.data << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(3, 0);
  const auto r = sample_covariance(one);
  CHECK(r.sample_count == 1);
  CHECK(r.matrix.isApprox(one.data * one.data.adjoint()));
  CHECK(Eigen::FullPivLU<Eigen::MatrixXcd>(r.matrix).rank() == 1);

  const auto cfg = default_config();
  const auto x = synthesize(cfg.geometry(), scene(), cfg.truth, 77, 1);
  const auto s = sample_covariance(x);
  CHECK(s.sample_count == 77);
  CHECK(s.matrix == s.matrix.adjoint());
  CHECK(s.matrix.isApprox(x.data * x.data.adjoint() / 77.0, 1e-14));

  try {
    sample_covariance(SnapshotMatrix{Eigen::MatrixXcd(8, 0)});
    FAIL("expected empty-input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyInput);
  }
}

TEST_CASE("model covariance matches the entry-wise formula") {
  for (int l = 4; l <= 5; ++l) {
    const auto geom = build_geometry(4, 4, l, 0.5, 1.0);
    const auto calib = oracle::random_calibration(8, 10 + l);
    const auto r = model_covariance(geom, scene(), calib);
    CHECK(r.is_exact());
    CHECK((r.matrix - oracle::model_covariance(geom, scene(), calib)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("nominal covariance structure") {
  const auto geom = build_geometry(4, 4, 4, 0.5, 1.0);
  const auto c = nominal_covariance(geom, scene());
  CHECK(toeplitz_block_deviation(c, geom) < 1e-12);
  // The sensor at position N1 closes the first block: lag N1 is both the
  // first-block corner and the first second-level lag.
  CHECK(std::abs(c(4, 0) - c(5, 4)) < 1e-12);
  // Second-level lag q (position lag 4q) reappears between sensor 0 and the
  // second-level sensor at position 4q.
  for (int q = 1; q < 4; ++q) CHECK(std::abs(c(4 + q, 4) - c(3 + q, 0)) < 1e-12);
  // Overlap: the first-block lag-k diagonal equals the lag-k first-level pairs.
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(c(k, 0) - c(4, 4 - k)) < 1e-12);

  const auto calib = oracle::random_calibration(8, 3);
  CHECK(toeplitz_block_deviation(model_covariance(geom, scene(), calib).matrix, geom) > 1e-3);
}

TEST_CASE("replication and overlap identities hold on random scenes") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(1.0, 179.0), power(0.1, 3.0), noise(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 10), size(2, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n1 = size(rng);
    const int n2 = size(rng);
    const auto geom = build_geometry(n1, n2, n1, 0.5, 1.0);
    SourceScene s;
    s.noise_power = noise(rng);
    const int m = count(rng);
    for (int k = 0; k < m; ++k) {
      s.angles_deg.push_back(angle(rng));
      s.powers.push_back(power(rng));
    }
    const auto c = nominal_covariance(geom, s);
    CHECK(toeplitz_block_deviation(c, geom) < 1e-12);
    // Sensor n1 (0-based) is shared by both Toeplitz blocks.
    CHECK(std::abs(c(n1, n1).imag()) < 1e-12);
    CHECK(c(n1, n1).real() > 0.0);
    CHECK(std::abs(c(n1, n1) - c(0, 0)) < 1e-12);
    for (int q = 1; q < n2; ++q) {
      CHECK(std::abs(c(n1 + q, n1) - c(n1 - 1 + q, 0)) < 1e-12);
    }
  }
}
