#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nestcal/error.hpp"
#include "nestcal/geometry.hpp"
#include "oracles.hpp"

using namespace nestcal;

TEST_CASE("positions follow the nested indexing function") {
  CHECK(build_geometry(3, 3, 3, 0.5, 1.0).positions() == std::vector<int>{0, 1, 2, 3, 6, 9});
  CHECK(build_geometry(3, 3, 4, 0.5, 1.0).positions() == std::vector<int>{0, 1, 2, 3, 7, 11});
  CHECK(build_geometry(1, 1, 1, 0.5, 1.0).positions() == std::vector<int>{0, 1});

  const auto g = build_geometry(4, 4, 4, 0.5, 1.0);
  CHECK(g.size() == 8);
  CHECK(g.is_proposed_design());
  CHECK_FALSE(g.is_conventional_design());
}

TEST_CASE("invalid geometry arguments") {
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind([] { build_geometry(0, 3, 3, 0.5, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { build_geometry(3, 0, 3, 0.5, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { build_geometry(3, 3, 0, 0.5, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { build_geometry(3, 3, 3, 0.0, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { build_geometry(3, 3, 3, 0.5, -1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("difference coarray") {
  SUBCASE("smallest array") {
    const auto co = difference_coarray(build_geometry(1, 1, 1, 0.5, 1.0));
    CHECK(co.lags == std::vector<int>{-1, 0, 1});
    CHECK(co.central_segment.size() == 3);
  }
  SUBCASE("N1 = N2 = L = 3 matches brute force") {
    const auto g = build_geometry(3, 3, 3, 0.5, 1.0);
    const int expected = oracle::central_segment_size(g.positions());
    CHECK(expected == 19);
    CHECK(difference_coarray(g).central_segment.size() == 19);
  }
  SUBCASE("N1 = N2 = L gives 2 N1^2 + 1") {
    for (int n1 = 2; n1 <= 5; ++n1) {
      const auto g = build_geometry(n1, n1, n1, 0.5, 1.0);
      const auto co = difference_coarray(g);
      CHECK(static_cast<int>(co.central_segment.size()) == 2 * n1 * n1 + 1);
      CHECK(static_cast<int>(co.central_segment.size()) == oracle::central_segment_size(g.positions()));
    }
  }
  SUBCASE("lags symmetric, segment odd") {
    for (int l = 1; l <= 6; ++l) {
      const auto co = difference_coarray(build_geometry(3, 4, l, 0.5, 1.0));
      for (std::size_t k = 0; k < co.lags.size(); ++k) {
        CHECK(co.lags[k] == -co.lags[co.lags.size() - 1 - k]);
      }
      CHECK(co.central_segment.size() % 2 == 1);
    }
  }
}

TEST_CASE("removing sensors 2..N1 leaves a ULA when L = N1") {
  for (int n1 = 2; n1 <= 6; ++n1) {
    const auto g = build_geometry(n1, n1, n1, 0.5, 1.0);
    std::vector<int> kept{g.positions()[0]};
    for (int s = n1; s < g.size(); ++s) kept.push_back(g.positions()[s]);
    for (std::size_t k = 0; k < kept.size(); ++k) CHECK(kept[k] == static_cast<int>(k) * n1);
  }
}

TEST_CASE("steering vector") {
  const auto g = build_geometry(4, 4, 4, 0.5, 1.0);
  const auto broadside = steering_vector(g, 90.0);
  for (Eigen::Index n = 0; n < broadside.size(); ++n) {
    CHECK(std::abs(broadside(n) - 1.0) < 1e-13);
  }

  // i_n = 2, d = lambda/2, 60 degrees -> exp(j pi) = -1
  const auto a60 = steering_vector(build_geometry(3, 3, 3, 0.5, 1.0), 60.0);
  CHECK(std::abs(a60(2) - std::complex<double>(-1.0, 0.0)) < 1e-12);

  const auto a45 = steering_vector(g, 45.0);
  const std::vector<int> mult{0, 1, 2, 3, 4, 8, 12, 16};
  const double base = std::numbers::pi * std::cos(std::numbers::pi / 4.0);
  CHECK(a45(0) == std::complex<double>(1.0, 0.0));
  for (int n = 0; n < 8; ++n) {
    CHECK(std::abs(a45(n) - std::polar(1.0, base * mult[n])) < 1e-12);
    CHECK(std::abs(std::abs(a45(n)) - 1.0) < 1e-15);
  }

  // Conjugate symmetry: a_n a_m^* depends only on the lag and flips to its
  // conjugate when the lag changes sign.
  for (int n = 0; n < 8; ++n) {
    for (int m = 0; m < 8; ++m) {
      CHECK(std::abs(a45(n) * std::conj(a45(m)) - std::conj(a45(m) * std::conj(a45(n)))) < 1e-12);
    }
  }

  CHECK_THROWS_AS(steering_vector(g, 0.0), Error);
  CHECK_THROWS_AS(steering_vector(g, 180.0), Error);
  CHECK_THROWS_AS(steering_vector(g, -5.0), Error);
}
