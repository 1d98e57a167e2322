#include "qq/normtest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qq/errors.hpp"
#include "qq/probability.hpp"
#include "qq/shapefit.hpp"

namespace qq {

namespace {

CalibrationCoefficients make_coefficients(std::initializer_list<double> mean,
                                          std::initializer_list<double> sd,
                                          std::string provenance) {
  CalibrationCoefficients c;
  std::size_t i = 0;
  for (double v : mean) c.mean[i++] = v;
  i = 0;
  for (double v : sd) c.sd[i++] = v;
  c.provenance = std::move(provenance);
  return c;
}

// Uncensored models: mean = A + B ln(n+30), sd = D + E ln(n+30).
const CalibrationCoefficients kFull =
    make_coefficients({1.992, -1.802}, {0.6717, 0.02561}, "builtin:uncensored:full");
const CalibrationCoefficients kWinsor =
    make_coefficients({3.12, -2.115}, {0.4413, 0.08462}, "builtin:uncensored:winsorized");
const CalibrationCoefficients kBoxCox =
    make_coefficients({1.405, -1.782}, {0.5941, 0.03245}, "builtin:uncensored:boxcox");
const CalibrationCoefficients kBoxCoxWinsor = make_coefficients(
    {2.809, -2.164}, {0.4288, 0.07453}, "builtin:uncensored:boxcox-winsorized");

// Censored models over {1, ln(n+30), f, f ln(n+30)}.
const CalibrationCoefficients kCensoredOriginal =
    make_coefficients({2.256, -1.923, -0.7297, 0.6353}, {0.598, 0.05197, 0.2236, -0.01872},
                      "builtin:censored:original");
const CalibrationCoefficients kCensoredBoxCox =
    make_coefficients({1.796, -1.937, -1.331, 0.7059}, {0.475, 0.06489, 0.3955, -0.06081},
                      "builtin:censored:boxcox");

double evaluate(const double (&c)[4], std::size_t n, double f) {
  const double l = std::log(static_cast<double>(n) + 30.0);
  return c[0] + c[1] * l + c[2] * f + c[3] * f * l;
}

}  // namespace

std::string_view to_string(TestVariant v) {
  switch (v) {
    case TestVariant::full: return "full";
    case TestVariant::winsorized: return "winsorized";
    case TestVariant::boxcox: return "boxcox";
    case TestVariant::boxcox_winsorized: return "boxcox-winsorized";
    case TestVariant::censored_original: return "censored-original";
    case TestVariant::censored_boxcox: return "censored-boxcox";
  }
  return "unknown";
}

TestVariant parse_test_variant(std::string_view name) {
  for (auto v : {TestVariant::full, TestVariant::winsorized, TestVariant::boxcox,
                 TestVariant::boxcox_winsorized, TestVariant::censored_original,
                 TestVariant::censored_boxcox}) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown test variant: " + std::string(name));
}

bool is_censored_variant(TestVariant v) {
  return v == TestVariant::censored_original || v == TestVariant::censored_boxcox;
}

double clamp_correlation(double r) noexcept { return r > kMaxCorrelation ? kMaxCorrelation : r; }

double z_transform(double r) {
  if (std::isnan(r) || r < -1.0) throw DomainError("z_transform: r must lie in [-1, 1)");
  if (r >= 1.0) throw DomainError("z_transform: r >= 1 must be clamped before transforming");
  return (std::pow(1.0 - r, kZTransformLambda) - 1.0) / kZTransformLambda;
}

double z_transform_inverse(double y) {
  const double base = 1.0 + kZTransformLambda * y;
  if (!(base > 0.0)) throw DomainError("z_transform_inverse: Y outside the transform's range");
  return 1.0 - std::pow(base, 1.0 / kZTransformLambda);
}

double CalibrationCoefficients::mean_model(std::size_t n, double f) const {
  return evaluate(mean, n, f);
}

double CalibrationCoefficients::sd_model(std::size_t n, double f) const {
  return evaluate(sd, n, f);
}

const CalibrationCoefficients& builtin_calibration(TestVariant v, bool censored_data) {
  switch (v) {
    case TestVariant::full: return kFull;
    case TestVariant::winsorized: return kWinsor;
    case TestVariant::boxcox: return kBoxCox;
    case TestVariant::boxcox_winsorized: return kBoxCoxWinsor;
    case TestVariant::censored_original: return censored_data ? kCensoredOriginal : kFull;
    case TestVariant::censored_boxcox: return censored_data ? kCensoredBoxCox : kBoxCox;
  }
  throw std::invalid_argument("unknown test variant");
}

Standardized standardize(double y, std::size_t n, TestVariant variant, double f,
                         const CalibrationCoefficients* coefficients) {
  if (n < 10) throw InsufficientDataError("standardize: n must be at least 10");
  if (is_censored_variant(variant)) {
    if (!(f >= 0.0)) throw DomainError("standardize: censored fraction must be non-negative");
    if (f > kMaxCalibratedCensoring) {
      throw CalibrationRangeError("censored fraction " + std::to_string(f) +
                                  " exceeds the calibrated maximum of 0.5");
    }
  } else {
    f = 0.0;
  }
  const CalibrationCoefficients& c =
      coefficients ? *coefficients : builtin_calibration(variant, f > 0.0);
  Standardized out;
  out.mean = c.mean_model(n, f);
  out.sd = c.sd_model(n, f);
  if (!(out.sd > 0.0)) throw DomainError("standardize: sd model is not positive at this n");
  out.z = (y - out.mean) / out.sd;
  if (n < kCalibrationMinN || n > kCalibrationMaxN) {
    out.calibration_warning = "n = " + std::to_string(n) + " lies outside the calibrated range [" +
                              std::to_string(kCalibrationMinN) + ", " +
                              std::to_string(kCalibrationMaxN) + "]";
  }
  return out;
}

std::size_t winsor_count(std::size_t n) { return (n + 20) / 40; }

NormalityTest test_normality(const Sample& sample, TestVariant variant, double alpha,
                             const CalibrationCoefficients* coefficients) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test_normality: alpha must lie in (0, 1)");
  sample.validate();
  const std::size_t n = sample.n_total;
  const std::size_t k = sample.k_censored;
  if (!is_censored_variant(variant) && k > 0) {
    throw DomainError(std::string("variant '") + std::string(to_string(variant)) +
                      "' requires an uncensored sample; use a censored variant");
  }

  NormalityTest t;
  t.variant = variant;
  t.alpha = alpha;
  t.n = n;
  t.f = sample.censored_fraction();
  if (is_censored_variant(variant) && t.f > kMaxCalibratedCensoring) {
    throw CalibrationRangeError("censored fraction " + std::to_string(t.f) +
                                " exceeds the calibrated maximum of 0.5");
  }

  const bool winsorized =
      variant == TestVariant::winsorized || variant == TestVariant::boxcox_winsorized;
  if (winsorized) t.winsor = winsor_count(n);
  if (n < 2 * t.winsor + 10 || n - k < 10) {
    throw InsufficientDataError("test_normality: fewer than 10 points remain after " +
                                std::string(winsorized ? "winsorizing" : "censoring"));
  }

  switch (variant) {
    case TestVariant::full:
      t.r = fit_full(sample).r;
      break;
    case TestVariant::winsorized:
      t.r = fit_winsorized(sample, t.winsor).r;
      break;
    case TestVariant::censored_original:
      t.r = fit_censored(sample).r;
      break;
    case TestVariant::boxcox:
    case TestVariant::boxcox_winsorized:
    case TestVariant::censored_boxcox: {
      BoxCoxOptions opts;
      opts.winsor = t.winsor;
      const BoxCoxFit bc = fit_boxcox_qqr(sample, opts);
      t.r = bc.qqr_at_opt;
      t.lambda = bc.lambda_hat;
      break;
    }
  }

  const double r = clamp_correlation(t.r);
  t.r_clamped = r != t.r;
  t.y = z_transform(r);
  const Standardized s = standardize(t.y, n, variant, t.f, coefficients);
  t.z = s.z;
  t.calibration_warning = s.calibration_warning;
  t.p = std::min(1.0, std::max(0.0, std_normal_sf(t.z)));
  t.reject = t.p < alpha;
  return t;
}

}  // namespace qq
