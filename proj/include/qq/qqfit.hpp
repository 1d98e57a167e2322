#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qq {

// Observed values sorted ascending plus left-censoring metadata. The k
// censored observations carry no value; they occupy ranks 1..k.
struct Sample {
  std::vector<double> values;
  std::size_t n_total = 0;
  std::size_t k_censored = 0;
  std::optional<double> detection_limit;
  // Reserved. Fitting rejects right-censored samples.
  std::size_t k_right_censored = 0;

  // Sorts `values`; n_total = values.size().
  static Sample complete(std::vector<double> values);
  // `observed` are the uncensored values; k more lie below the detection limit.
  static Sample left_censored(std::vector<double> observed, std::size_t k,
                              std::optional<double> detection_limit = std::nullopt);

  std::size_t observed_count() const noexcept { return values.size(); }
  double censored_fraction() const noexcept {
    return n_total == 0 ? 0.0 : static_cast<double>(k_censored) / static_cast<double>(n_total);
  }
  // Throws DomainError if the invariants do not hold.
  void validate() const;
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r = 0.0;
};

// Ordinary least squares of y on x and the Pearson correlation of the pairs.
LineFit qq_regression(std::span<const double> y, std::span<const double> x);

enum class FitKind { full, censored, winsorized };

struct QQFit {
  FitKind kind = FitKind::full;
  double intercept = 0.0;  // location estimate m
  double slope = 0.0;      // scale estimate s
  double r = 0.0;
  std::size_t n_total = 0;
  std::size_t k_censored = 0;
  std::size_t w_winsorized = 0;
  double n_eff_mean = 0.0;
  double n_eff_sd = 0.0;
  double n_eff_limit = 0.0;
  double se_mean = 0.0;
  double se_sd = 0.0;
  double se_upper_limit = 0.0;

  bool out_of_calibration = false;     // censored fraction above 0.5
  bool outside_calibrated_n = false;   // efficiency model applied outside its n range
  bool negative_slope = false;
  std::vector<std::string> warnings;
};

// Standard error multiplier of m + 1.96 s: sqrt(1 + 1.96^2 / 2) = 1.709...
inline constexpr double kUpperLimitSeFactor = 1.71;

// Efficiency of the left-censored estimators relative to the full sample,
// as fitted functions of the censoring.
struct CensoringEfficiency {
  double mean = 1.0;   // 1 - 1.5 (k/n)^1.7
  double sd = 1.0;     // (2.5 - 1.5 f)^-2
  double limit = 1.0;  // (1.38 - 0.37 f)^-2
};
// f = 1 - k/n is the uncensored fraction.
CensoringEfficiency censoring_efficiency(std::size_t n, std::size_t k);

// Censoring calibration covers up to half of the sample.
inline constexpr double kMaxCalibratedCensoring = 0.5;
inline constexpr std::size_t kCalibratedMinN = 60;
inline constexpr std::size_t kCalibratedMaxN = 1080;

QQFit fit_full(const Sample& sample);

// Regresses the observed values on the upper n - k Hazen scores of the full
// sample. With k = 0 this is fit_full.
QQFit fit_censored(const Sample& sample);

// Drops the w smallest and w largest observations from the regression.
QQFit fit_winsorized(const Sample& sample, std::size_t w);

struct ReferenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double coverage = 0.95;
  double z_multiplier = 0.0;
  double se_upper = 0.0;
  // No separate formula exists for the lower limit; assumed equal to se_upper.
  double se_lower = 0.0;
  bool se_lower_assumed = true;
};

// m -/+ z s with z = Phi^-1((1 + coverage) / 2), unless `z_override` is given
// (e.g. the rounded 1.96).
ReferenceInterval reference_interval(const QQFit& fit, double coverage = 0.95,
                                     std::optional<double> z_override = std::nullopt);

}  // namespace qq
