#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "qq/qqfit.hpp"

namespace qq {

enum class TestVariant {
  full,
  winsorized,
  boxcox,
  boxcox_winsorized,
  censored_original,
  censored_boxcox,
};

std::string_view to_string(TestVariant v);
// Accepts the hyphenated names ("boxcox-winsorized", "censored-original", ...).
TestVariant parse_test_variant(std::string_view name);
bool is_censored_variant(TestVariant v);

// Power applied to 1 - r before standardizing.
inline constexpr double kZTransformLambda = -0.1;
// Correlations at or above 1 - 1e-15 are clamped to this value.
inline constexpr double kMaxCorrelation = 1.0 - 1e-15;

// Y = ((1 - r)^lambda - 1) / lambda with lambda = -0.1. Throws DomainError for
// r < -1 or r >= 1; callers clamp r first (see clamp_correlation).
double z_transform(double r);
// r = 1 - (1 + lambda Y)^(1 / lambda).
double z_transform_inverse(double y);
double clamp_correlation(double r) noexcept;

// Mean and sd models for Y as functions of ln(n + 30) (and, for censored
// data, the censored fraction f):
//   uncensored:  mean = A + B L,             sd = D + E L
//   censored:    mean = a + b L + c f + d f L (same form for sd)
struct CalibrationCoefficients {
  // {intercept, ln(n+30), f, f*ln(n+30)}; f terms are zero for uncensored
  // variants.
  double mean[4] = {0, 0, 0, 0};
  double sd[4] = {0, 0, 0, 0};
  std::string provenance;

  double mean_model(std::size_t n, double f) const;
  double sd_model(std::size_t n, double f) const;
};

// Built-in coefficients for a variant. For censored variants with f = 0 the
// uncensored model of the matching scale is returned.
const CalibrationCoefficients& builtin_calibration(TestVariant v, bool censored_data = true);

inline constexpr std::size_t kCalibrationMinN = 60;
inline constexpr std::size_t kCalibrationMaxN = 1080;

struct Standardized {
  double z = 0.0;
  double mean = 0.0;
  double sd = 1.0;
  std::optional<std::string> calibration_warning;
};

// Z = (Y - mean_model) / sd_model. `f` is the censored fraction.
Standardized standardize(double y, std::size_t n, TestVariant variant, double f = 0.0,
                         const CalibrationCoefficients* coefficients = nullptr);

struct NormalityTest {
  TestVariant variant = TestVariant::full;
  double r = 0.0;
  double y = 0.0;
  double z = 0.0;
  double p = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::size_t n = 0;
  double f = 0.0;  // censored fraction
  std::size_t winsor = 0;
  std::optional<double> lambda;  // Box-Cox variants
  bool r_clamped = false;
  std::optional<std::string> calibration_warning;
};

// Winsorizing count for the winsorized variants: 2.5% per tail, rounded
// half up.
std::size_t winsor_count(std::size_t n);

NormalityTest test_normality(const Sample& sample, TestVariant variant, double alpha = 0.05,
                             const CalibrationCoefficients* coefficients = nullptr);

}  // namespace qq
