#include <doctest.h>

#include <numbers>

#include "nestcal/covariance.hpp"
#include "nestcal/error.hpp"
#include "nestcal/harness.hpp"
#include "nestcal/synth.hpp"

using namespace nestcal;

TEST_CASE("snr to noise power") {
  CHECK(snr_to_noise_power(10.0, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snr_to_noise_power(0.0, 1.0) == 1.0);
  CHECK(snr_to_noise_power(-10.0, 2.0) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK_THROWS_AS(snr_to_noise_power(0.0, 0.0), Error);
}

TEST_CASE("uniform angle grid includes endpoints") {
  const auto a = uniform_angles(15, 20.0, 70.0);
  REQUIRE(a.size() == 15);
  CHECK(a.front() == 20.0);
  CHECK(a.back() == 70.0);
  CHECK(a[1] - a[0] == doctest::Approx(50.0 / 14.0));
}

TEST_CASE("noise-only snapshots are white") {
  const auto g = build_geometry(4, 4, 4, 0.5, 1.0);
  const SourceScene scene{{}, {}, 1.0};
  const auto x = synthesize(g, scene, CalibrationParams::identity(8), 100000, 7);
  const auto r = sample_covariance(x);
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(r.matrix(i, i).real() - 1.0) < 0.02);
    for (int j = 0; j < 8; ++j) {
      if (i != j) CHECK(std::abs(r.matrix(i, j)) < 0.02);
    }
  }
}

TEST_CASE("single noiseless broadside source gives rank one") {
  const auto g = build_geometry(4, 4, 4, 0.5, 1.0);
  const SourceScene scene{{90.0}, {1.0}, 0.0};
  const auto x = synthesize(g, scene, CalibrationParams::identity(8), 64, 3);
  for (Eigen::Index t = 0; t < x.sample_count(); ++t) {
    for (Eigen::Index n = 1; n < 8; ++n) CHECK(std::abs(x.data(n, t) - x.data(0, t)) < 1e-14);
  }
  const auto r = sample_covariance(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r.matrix);
  const auto& ev = eig.eigenvalues();
  CHECK(ev(7) > 1.0);
  CHECK(ev(6) < 1e-12 * ev(7));
}

TEST_CASE("synthesis is deterministic and seed dependent") {
  const auto cfg = default_config();
  const auto g = cfg.geometry();
  const SourceScene scene{cfg.source_angles_deg, std::vector<double>(15, 1.0), 0.1};
  const auto a = synthesize(g, scene, cfg.truth, 50, 11);
  const auto b = synthesize(g, scene, cfg.truth, 50, 11);
  const auto c = synthesize(g, scene, cfg.truth, 50, 12);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("empirical covariance converges to the model, pseudo-covariance vanishes") {
  const auto cfg = default_config();
  const auto g = cfg.geometry();
  const SourceScene scene{cfg.source_angles_deg, std::vector<double>(15, 1.0), 0.1};
  const Eigen::Index t = 1000000;
  const auto x = synthesize(g, scene, cfg.truth, t, 2024);
  const auto r = sample_covariance(x);
  const auto model = model_covariance(g, scene, cfg.truth);
  const double scale = model.matrix.cwiseAbs().maxCoeff();
  CHECK((r.matrix - model.matrix).cwiseAbs().maxCoeff() < 5e-2 * scale);

  const Eigen::MatrixXcd pseudo = x.data * x.data.transpose() / static_cast<double>(t);
  // O(1/sqrt(T)) relative to the power scale.
  CHECK(pseudo.cwiseAbs().maxCoeff() < 10.0 * scale / std::sqrt(static_cast<double>(t)));
}

TEST_CASE("input validation") {
  const auto g = build_geometry(2, 2, 2, 0.5, 1.0);
  const SourceScene ok{{40.0}, {1.0}, 0.1};
  CHECK_THROWS_AS(synthesize(g, ok, CalibrationParams::identity(4), 0, 1), Error);
  try {
    synthesize(g, ok, CalibrationParams::identity(5), 10, 1);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  CHECK_THROWS_AS(synthesize(g, SourceScene{{40.0, 40.0}, {1.0, 1.0}, 0.1},
                             CalibrationParams::identity(4), 10, 1),
                  Error);
  CHECK_THROWS_AS(synthesize(g, SourceScene{{40.0}, {-1.0}, 0.1}, CalibrationParams::identity(4), 10, 1),
                  Error);
  CalibrationParams bad = CalibrationParams::identity(4);
  bad.gains(2) = 0.0;
  CHECK_THROWS_AS(synthesize(g, ok, bad, 10, 1), Error);
  bad = CalibrationParams::identity(4);
  bad.phases(2) = std::numbers::pi;
  CHECK_THROWS_AS(synthesize(g, ok, bad, 10, 1), Error);
}
