#include <doctest.h>

#include <cmath>
#include <vector>

#include "ntk/asymptotics.hpp"
#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"

using namespace ntk;

TEST_CASE("kappa0 at landmarks") {
  CHECK(kappa0(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kappa0(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kappa0(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("kappa1 at landmarks") {
  CHECK(kappa1(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kappa1(0.0) == doctest::Approx(0.3183098862).epsilon(1e-10));
  CHECK(std::fabs(kappa1(-1.0)) < 1e-15);
}

TEST_CASE("clamp band") {
  CHECK(kappa0(1.0 + 5e-13) == 1.0);
  CHECK(kappa1(-1.0 - 5e-13) == doctest::Approx(0.0));
  CHECK_THROWS_AS(kappa0(1.0 + 1e-9), DomainError);
  CHECK_THROWS_AS(kappa1(-1.0 - 1e-9), DomainError);
  CHECK_THROWS_AS(kappa0(std::nan("")), DomainError);
}

TEST_CASE("range and monotonicity on a 10^4 grid") {
  const int n = 10000;
  double p0 = -1.0, p1 = -1.0;
  for (int i = 0; i < n; ++i) {
    const double u = -1.0 + 2.0 * i / (n - 1);
    const double a = kappa0(u), b = kappa1(u);
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
    REQUIRE(b >= 0.0);
    REQUIRE(b <= 1.0);
    REQUIRE(a >= p0);
    REQUIRE(b >= p1);
    p0 = a;
    p1 = b;
  }
}

TEST_CASE("kappa1' equals kappa0") {
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i <= 1980; ++i) {
    const double u = -0.99 + 0.001 * i;
    const double fd = (kappa1(u + h) - kappa1(u - h)) / (2 * h);
    worst = std::max(worst, std::fabs(fd - kappa0(u)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("kappa0 edge coefficients") {
  const double s = std::sqrt(2.0) / kPi;
  const auto plus = extract_edge_coefficient([](double u) { return kappa0(u); }, 1);
  const auto minus = extract_edge_coefficient([](double u) { return kappa0(u); }, -1);
  CHECK(plus.c_half == doctest::Approx(-s).epsilon(1e-3));
  CHECK(minus.c_half == doctest::Approx(s).epsilon(1e-3));
}

TEST_CASE("laplace_sphere") {
  CHECK(laplace_sphere(1.0, 1.0) == 1.0);
  CHECK(laplace_sphere(-1.0, 1.0) == doctest::Approx(0.1353352832).epsilon(1e-10));
  CHECK(laplace_sphere(0.0, 1.0) == doctest::Approx(0.2431167344).epsilon(1e-10));
  CHECK_THROWS_AS(laplace_sphere(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(laplace_sphere(1.1, 1.0), DomainError);
}

TEST_CASE("homogenized_laplace") {
  const std::vector<double> x{0.3, -1.2, 0.5}, z{1.0, 0.4, -0.7};
  const double nx2 = 0.09 + 1.44 + 0.25;
  CHECK(homogenized_laplace(x, x, 0.8) == doctest::Approx(nx2).epsilon(1e-14));

  std::vector<double> x2(3), z3(3);
  for (int i = 0; i < 3; ++i) {
    x2[i] = 2 * x[i];
    z3[i] = 3 * z[i];
  }
  CHECK(homogenized_laplace(x2, z3, 1.3) == doctest::Approx(6 * homogenized_laplace(x, z, 1.3)).epsilon(1e-13));

  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0}, zero{0, 0, 0};
  CHECK(homogenized_laplace(e1, e2, 1.0) == doctest::Approx(0.2431167344).epsilon(1e-10));
  CHECK_THROWS_AS(homogenized_laplace(zero, e1, 1.0), DomainError);
}
