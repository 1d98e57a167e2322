// Accuracy of the normal and Student-t kernels. Frozen reference values come
// from tests/oracle/compute_oracles.py (40-digit mpmath); boost::math serves
// as a second, independent oracle for the t quantile.
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "qq/errors.hpp"
#include "qq/probability.hpp"

using namespace qq;

TEST_SUITE("probability") {
  TEST_CASE("normal cdf reference values") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.9750000009035576).epsilon(1e-13));
    for (double z : {0.1, 0.7, 1.3, 2.5, 4.0, 7.5}) {
      CHECK(std_normal_cdf(z) + std_normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(std_normal_cdf(NAN), DomainError);
    CHECK_THROWS_AS(std_normal_cdf(INFINITY), DomainError);
  }

  TEST_CASE("normal cdf is monotone") {
    double prev = 0.0;
    for (double z = -9.0; z <= 9.0; z += 0.01) {
      const double c = std_normal_cdf(z);
      CHECK(c >= prev);
      prev = c;
    }
  }

  TEST_CASE("inverse normal reference values") {
    CHECK(std_normal_inv_cdf(0.5) == 0.0);
    CHECK(std_normal_inv_cdf(0.975) == doctest::Approx(1.9599639845400542).epsilon(1e-14));
    CHECK(std_normal_inv_cdf(0.125) == doctest::Approx(-1.1503493803760082).epsilon(1e-14));
    CHECK(std_normal_inv_cdf(0.25) == doctest::Approx(-0.6744897501960817).epsilon(1e-14));
    CHECK(std::fabs(std_normal_inv_cdf(0.1) + std_normal_inv_cdf(0.9)) < 1e-12);
  }

  TEST_CASE("inverse normal rejects the endpoints") {
    CHECK_THROWS_AS(std_normal_inv_cdf(0.0), DomainError);
    CHECK_THROWS_AS(std_normal_inv_cdf(1.0), DomainError);
    CHECK_THROWS_AS(std_normal_inv_cdf(-0.2), DomainError);
    CHECK_THROWS_AS(std_normal_inv_cdf(NAN), DomainError);
  }

  TEST_CASE("cdf(inv(p)) round trip on log-spaced p") {
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double p = std::pow(10.0, -8.0 + 8.0 * i / 2000.0) * 0.5;
      for (double q : {p, 1.0 - p}) {
        worst = std::max(worst, std::fabs(std_normal_cdf(std_normal_inv_cdf(q)) - q));
      }
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("inv(cdf(z)) round trip on [-6, 6]") {
    double worst = 0.0;
    for (double z = -6.0; z <= 6.0; z += 0.003) {
      worst = std::max(worst, std::fabs(std_normal_inv_cdf(std_normal_cdf(z)) - z));
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("incomplete beta matches closed forms") {
    // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1 - x)^b.
    for (double x : {0.01, 0.3, 0.5, 0.77, 0.999}) {
      CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-14));
      CHECK(incomplete_beta(3.5, 1.0, x) == doctest::Approx(std::pow(x, 3.5)).epsilon(1e-13));
      CHECK(incomplete_beta(1.0, 2.5, x) ==
            doctest::Approx(1.0 - std::pow(1.0 - x, 2.5)).epsilon(1e-13));
    }
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    CHECK_THROWS_AS(incomplete_beta(0.0, 1.0, 0.5), DomainError);
  }

  TEST_CASE("t quantile reference values") {
    CHECK(student_t_inv_cdf(0.5, 3.0) == 0.0);
    CHECK(student_t_inv_cdf(0.75, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(student_t_inv_cdf(0.975, 5.0) == doctest::Approx(2.5705818356363155).epsilon(1e-12));
    CHECK(student_t_inv_cdf(0.975, 3.7) == doctest::Approx(2.8675207071911895).epsilon(1e-12));
    CHECK(student_t_inv_cdf(0.99, 2.5) == doctest::Approx(5.353111173030874).epsilon(1e-12));
    CHECK(student_t_inv_cdf(0.6, 0.5) == doctest::Approx(0.3979754267847907).epsilon(1e-12));
    CHECK(student_t_inv_cdf(0.999, 30.0) == doctest::Approx(3.385184866829305).epsilon(1e-12));
    CHECK(student_t_inv_cdf(0.9, 200.0) == doctest::Approx(1.285798793994801).epsilon(1e-12));
  }

  TEST_CASE("t quantile agrees with boost::math on a grid") {
    double worst = 0.0;
    for (double nu : {0.7, 1.0, 1.5, 2.0, 3.7, 5.0, 12.0, 60.0, 500.0, 5e4}) {
      boost::math::students_t dist(nu);
      for (double p : {1e-6, 0.001, 0.02, 0.2, 0.45, 0.55, 0.8, 0.975, 0.999, 1 - 1e-6}) {
        const double expected = boost::math::quantile(dist, p);
        const double got = student_t_inv_cdf(p, nu);
        worst = std::max(worst, std::fabs(got - expected) / std::max(1.0, std::fabs(expected)));
      }
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("t quantile symmetry, monotonicity and normal limit") {
    for (double nu : {0.5, 1.0, 3.7, 40.0}) {
      double prev = -INFINITY;
      for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        const double t = student_t_inv_cdf(p, nu);
        CHECK(t > prev);
        prev = t;
        CHECK(std::fabs(t + student_t_inv_cdf(1.0 - p, nu)) < 1e-9 * std::max(1.0, std::fabs(t)));
      }
    }
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double p = i / 100.0;
      worst = std::max(worst, std::fabs(student_t_inv_cdf(p, 1e6) - std_normal_inv_cdf(p)));
    }
    CHECK(worst < 1e-3);
  }

  TEST_CASE("t cdf inverts the quantile") {
    for (double nu : {0.8, 2.0, 3.7, 9.0}) {
      for (double p : {0.01, 0.3, 0.9, 0.9999}) {
        CHECK(student_t_cdf(student_t_inv_cdf(p, nu), nu) == doctest::Approx(p).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("t quantile domain errors") {
    CHECK_THROWS_AS(student_t_inv_cdf(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(student_t_inv_cdf(0.5, -2.0), DomainError);
    CHECK_THROWS_AS(student_t_inv_cdf(1.0, 3.0), DomainError);
    CHECK_THROWS_AS(student_t_inv_cdf(0.3, INFINITY), DomainError);
  }
}
