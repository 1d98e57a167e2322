#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qq/errors.hpp"
#include "qq/normtest.hpp"
#include "qq/rng.hpp"
#include "qq/scores.hpp"

using namespace qq;

TEST_SUITE("normtest") {
  TEST_CASE("z transform values") {
    CHECK(z_transform(0.0) == 0.0);
    CHECK(z_transform(0.99) == doctest::Approx(-5.848931924611135).epsilon(1e-13));
    CHECK_THROWS_AS(z_transform(1.0), DomainError);
    CHECK_THROWS_AS(z_transform(-1.5), DomainError);
    CHECK(clamp_correlation(1.0) == kMaxCorrelation);
    CHECK(clamp_correlation(0.5) == 0.5);
  }

  TEST_CASE("z transform round trip and monotonicity") {
    double prev = -INFINITY;
    for (int i = 0; i <= 1000; ++i) {
      const double r = 1.0 - std::pow(10.0, -9.0 * i / 1000.0);
      const double y = z_transform(r);
      CHECK(std::fabs(z_transform_inverse(y) - r) < 1e-12);
      // Larger r means smaller Y.
      if (i > 0) CHECK(y < prev);
      prev = y;
    }
  }

  TEST_CASE("worked standardization constants") {
    const auto& full = builtin_calibration(TestVariant::full);
    CHECK(full.mean_model(120, 0.0) == doctest::Approx(-7.03716479996).epsilon(1e-11));
    CHECK(full.sd_model(120, 0.0) == doctest::Approx(0.800022369882).epsilon(1e-11));
    const auto& cens = builtin_calibration(TestVariant::censored_original);
    CHECK(cens.mean_model(120, 0.25) == doctest::Approx(-6.76606251996).epsilon(1e-11));
    CHECK(cens.sd_model(120, 0.25) == doctest::Approx(0.890852943058).epsilon(1e-11));
  }

  TEST_CASE("standardizing the model mean gives zero") {
    for (auto v : {TestVariant::full, TestVariant::winsorized, TestVariant::boxcox,
                   TestVariant::boxcox_winsorized, TestVariant::censored_original,
                   TestVariant::censored_boxcox}) {
      for (std::size_t n : {60u, 120u, 333u, 1080u}) {
        const double f = is_censored_variant(v) ? 0.3 : 0.0;
        const double m = builtin_calibration(v, f > 0).mean_model(n, f);
        CHECK(std::fabs(standardize(m, n, v, f).z) < 1e-12);
      }
    }
  }

  TEST_CASE("standardize range checks") {
    CHECK(standardize(-7.0, 40, TestVariant::full).calibration_warning.has_value());
    CHECK_FALSE(standardize(-7.0, 120, TestVariant::full).calibration_warning.has_value());
    CHECK_THROWS_AS(standardize(-7.0, 120, TestVariant::censored_original, 0.6),
                    CalibrationRangeError);
    CHECK_THROWS_AS(standardize(-7.0, 5, TestVariant::full), InsufficientDataError);
    // Censored variants with nothing censored use the uncensored model.
    CHECK(standardize(-7.0, 120, TestVariant::censored_original, 0.0).z ==
          standardize(-7.0, 120, TestVariant::full).z);
  }

  TEST_CASE("variant names") {
    CHECK(parse_test_variant("boxcox-winsorized") == TestVariant::boxcox_winsorized);
    CHECK(to_string(TestVariant::censored_boxcox) == "censored-boxcox");
    CHECK_THROWS(parse_test_variant("sw"));
  }

  TEST_CASE("winsor count rounds half up") {
    CHECK(winsor_count(60) == 2);
    CHECK(winsor_count(120) == 3);
    CHECK(winsor_count(100) == 3);
    CHECK(winsor_count(99) == 2);
    CHECK(winsor_count(480) == 12);
  }

  TEST_CASE("perfect linearity does not reject") {
    const auto z = hazen_scores(120);
    const Sample s = Sample::complete({z.values().begin(), z.values().end()});
    const NormalityTest t = test_normality(s, TestVariant::full);
    CHECK(t.r_clamped);
    CHECK(t.p == doctest::Approx(1.0));
    CHECK_FALSE(t.reject);
  }

  TEST_CASE("location-scale invariance") {
    auto y = rng_standard_normal(RngStream{.seed = 77}, 120);
    std::vector<double> y2;
    for (double v : y) y2.push_back(4.0 * v + 100.0);
    for (auto v : {TestVariant::full, TestVariant::winsorized}) {
      const auto a = test_normality(Sample::complete(y), v);
      const auto b = test_normality(Sample::complete(y2), v);
      CHECK(std::fabs(a.r - b.r) < 1e-12);
      CHECK(std::fabs(a.z - b.z) < 1e-9);
      CHECK(std::fabs(a.p - b.p) < 1e-10);
    }
  }

  TEST_CASE("p is nonincreasing as r decreases") {
    double prev_p = 2.0;
    for (double r = 0.9999; r > 0.9; r -= 0.0005) {
      const double z = standardize(z_transform(r), 120, TestVariant::full).z;
      const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
      CHECK(p <= prev_p);
      prev_p = p;
    }
  }

  TEST_CASE("skewed data rejects, Box-Cox variant accepts after transforming") {
    auto y = rng_standard_normal(RngStream{.seed = 9}, 240);
    std::vector<double> ln;
    for (double v : y) ln.push_back(std::exp(v));
    const auto raw = test_normality(Sample::complete(ln), TestVariant::full);
    CHECK(raw.reject);
    const auto bc = test_normality(Sample::complete(ln), TestVariant::boxcox);
    REQUIRE(bc.lambda.has_value());
    CHECK(std::fabs(*bc.lambda) < 0.5);
    CHECK(bc.p > raw.p);
  }

  TEST_CASE("censored variants") {
    auto y = rng_standard_normal(RngStream{.seed = 10}, 120);
    std::sort(y.begin(), y.end());
    const Sample s = Sample::left_censored({y.begin() + 30, y.end()}, 30);
    const auto t = test_normality(s, TestVariant::censored_original);
    CHECK(t.f == doctest::Approx(0.25));
    CHECK(t.p > 0.0);
    CHECK_THROWS_AS(test_normality(s, TestVariant::full), DomainError);

    const Sample heavy = Sample::left_censored({y.begin() + 72, y.end()}, 72);
    CHECK_THROWS_AS(test_normality(heavy, TestVariant::censored_original), CalibrationRangeError);

    std::vector<double> pos;
    for (double v : y) pos.push_back(std::exp(v));
    const Sample ps = Sample::left_censored({pos.begin() + 12, pos.end()}, 12);
    const auto bc = test_normality(ps, TestVariant::censored_boxcox);
    CHECK(bc.lambda.has_value());
  }

  TEST_CASE("too little data after trimming") {
    auto y = rng_standard_normal(RngStream{.seed = 12}, 15);
    std::sort(y.begin(), y.end());
    CHECK_THROWS_AS(test_normality(Sample::complete({y.begin(), y.begin() + 9}), TestVariant::full),
                    InsufficientDataError);
    CHECK_THROWS_AS(
        test_normality(Sample::left_censored({y.begin() + 6, y.end()}, 6),
                       TestVariant::censored_original),
        InsufficientDataError);
    CHECK_THROWS_AS(test_normality(Sample::complete(y), TestVariant::full, 1.5), DomainError);
  }

  TEST_CASE("custom coefficients") {
    CalibrationCoefficients c;
    c.mean[0] = -7.0;
    c.sd[0] = 1.0;
    c.provenance = "user";
    CHECK(standardize(-6.0, 120, TestVariant::full, 0.0, &c).z == doctest::Approx(1.0));
  }
}
