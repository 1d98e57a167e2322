#include "qq/qqfit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qq/errors.hpp"
#include "qq/probability.hpp"
#include "qq/scores.hpp"

namespace qq {

Sample Sample::complete(std::vector<double> values) {
  Sample s;
  std::sort(values.begin(), values.end());
  s.n_total = values.size();
  s.values = std::move(values);
  s.validate();
  return s;
}

Sample Sample::left_censored(std::vector<double> observed, std::size_t k,
                             std::optional<double> detection_limit) {
  Sample s;
  std::sort(observed.begin(), observed.end());
  s.n_total = observed.size() + k;
  s.k_censored = k;
  s.detection_limit = detection_limit;
  s.values = std::move(observed);
  s.validate();
  return s;
}

void Sample::validate() const {
  if (values.size() + k_censored + k_right_censored != n_total) {
    throw DomainError("sample: observed + censored counts do not add up to n_total");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValueDomainError("sample: non-finite value", i);
    if (i > 0 && values[i] < values[i - 1]) {
      throw ValueDomainError("sample: values must be sorted ascending", i);
    }
  }
  if (detection_limit && !values.empty() && values.front() < *detection_limit) {
    throw ValueDomainError("sample: observed value below the detection limit", 0);
  }
}

LineFit qq_regression(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) {
    throw std::invalid_argument("qq_regression: y and x differ in length");
  }
  const std::size_t n = y.size();
  if (n < 3) throw InsufficientDataError("qq_regression: at least 3 points are required");

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateError("qq_regression: scores have zero variance");
  if (!(syy > 0.0)) throw DegenerateError("qq_regression: data have zero variance");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return fit;
}

CensoringEfficiency censoring_efficiency(std::size_t n, std::size_t k) {
  if (n == 0 || k > n) throw DomainError("censoring_efficiency: need 0 <= k <= n, n > 0");
  const double frac_censored = static_cast<double>(k) / static_cast<double>(n);
  const double f = 1.0 - frac_censored;
  CensoringEfficiency e;
  e.mean = 1.0 - 1.5 * std::pow(frac_censored, 1.7);
  e.sd = 1.0 / ((2.5 - 1.5 * f) * (2.5 - 1.5 * f));
  e.limit = 1.0 / ((1.38 - 0.37 * f) * (1.38 - 0.37 * f));
  return e;
}

namespace {

void reject_right_censoring(const Sample& sample) {
  if (sample.k_right_censored != 0) {
    throw DomainError("right-censored samples are not supported");
  }
}

QQFit make_fit(FitKind kind, const LineFit& line, const Sample& sample) {
  QQFit fit;
  fit.kind = kind;
  fit.intercept = line.intercept;
  fit.slope = line.slope;
  fit.r = line.r;
  fit.n_total = sample.n_total;
  fit.k_censored = sample.k_censored;
  if (line.slope < 0.0) {
    fit.negative_slope = true;
    fit.warnings.emplace_back("negative QQ slope: the data decrease with the scores");
  }
  return fit;
}

void set_standard_errors(QQFit& fit) {
  const double s = std::fabs(fit.slope);
  fit.se_mean = s / std::sqrt(fit.n_eff_mean);
  fit.se_sd = s / std::sqrt(2.0 * fit.n_eff_sd);
  fit.se_upper_limit = kUpperLimitSeFactor * s / std::sqrt(fit.n_eff_limit);
}

void flag_calibrated_n(QQFit& fit, std::size_t lo, std::size_t hi) {
  if (fit.n_total < lo || fit.n_total > hi) {
    fit.outside_calibrated_n = true;
    fit.warnings.emplace_back("n = " + std::to_string(fit.n_total) +
                              " lies outside the range [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] the efficiency models were fitted on");
  }
}

}  // namespace

QQFit fit_full(const Sample& sample) {
  reject_right_censoring(sample);
  if (sample.k_censored != 0) {
    throw DomainError("fit_full: sample is censored; use fit_censored");
  }
  if (sample.n_total < 3) throw InsufficientDataError("fit_full: at least 3 values are required");
  const auto scores = hazen_scores(sample.n_total);
  const LineFit line = qq_regression(sample.values, scores.values());

  QQFit fit = make_fit(FitKind::full, line, sample);
  const auto n = static_cast<double>(sample.n_total);
  fit.n_eff_mean = n;
  fit.n_eff_sd = n;
  fit.n_eff_limit = n;
  set_standard_errors(fit);
  return fit;
}

QQFit fit_censored(const Sample& sample) {
  reject_right_censoring(sample);
  sample.validate();
  if (sample.k_censored == 0) return fit_full(sample);

  const std::size_t n = sample.n_total;
  const std::size_t k = sample.k_censored;
  if (n - k < 3) {
    throw InsufficientDataError("fit_censored: at least 3 uncensored values are required");
  }
  const auto scores = hazen_scores(n);
  const LineFit line = qq_regression(sample.values, scores.values().subspan(k));

  QQFit fit = make_fit(FitKind::censored, line, sample);
  const CensoringEfficiency eff = censoring_efficiency(n, k);
  const auto nd = static_cast<double>(n);
  fit.n_eff_mean = nd * eff.mean;
  fit.n_eff_sd = nd * eff.sd;
  fit.n_eff_limit = nd * eff.limit;
  set_standard_errors(fit);

  if (sample.censored_fraction() > kMaxCalibratedCensoring) {
    fit.out_of_calibration = true;
    fit.warnings.emplace_back("censored fraction " + std::to_string(sample.censored_fraction()) +
                              " exceeds the calibrated maximum of 0.5");
  }
  flag_calibrated_n(fit, kCalibratedMinN, kCalibratedMaxN);
  return fit;
}

QQFit fit_winsorized(const Sample& sample, std::size_t w) {
  reject_right_censoring(sample);
  if (sample.k_censored != 0) {
    throw DomainError("fit_winsorized: sample is censored; winsorizing needs a complete sample");
  }
  if (w == 0) return fit_full(sample);

  const std::size_t n = sample.n_total;
  if (2 * w + 3 > n) {
    throw InsufficientDataError("fit_winsorized: winsorizing " + std::to_string(w) +
                                " per side leaves fewer than 3 points");
  }
  const auto nd = static_cast<double>(n);
  const auto wd = static_cast<double>(w);
  if (nd - 5.0 * wd <= 0.0) {
    throw InsufficientDataError("fit_winsorized: effective sample size n - 5w is not positive");
  }
  const auto scores = hazen_scores(n);
  const std::size_t kept = n - 2 * w;
  const LineFit line = qq_regression(std::span<const double>(sample.values).subspan(w, kept),
                                     scores.values().subspan(w, kept));

  QQFit fit = make_fit(FitKind::winsorized, line, sample);
  fit.w_winsorized = w;
  fit.n_eff_mean = nd;
  fit.n_eff_sd = nd - 5.0 * wd;
  fit.n_eff_limit = nd - 3.5 * wd;
  set_standard_errors(fit);
  flag_calibrated_n(fit, 80, 240);
  return fit;
}

ReferenceInterval reference_interval(const QQFit& fit, double coverage,
                                     std::optional<double> z_override) {
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw DomainError("reference_interval: coverage must lie in (0, 1)");
  }
  if (!(fit.n_eff_limit > 0.0)) throw DomainError("reference_interval: invalid fit");

  ReferenceInterval ri;
  ri.coverage = coverage;
  ri.z_multiplier = z_override ? *z_override : std_normal_inv_cdf(0.5 * (1.0 + coverage));
  const double s = std::fabs(fit.slope);
  ri.upper = fit.intercept + ri.z_multiplier * s;
  ri.lower = fit.intercept - ri.z_multiplier * s;
  if (coverage == 0.95) {
    ri.se_upper = kUpperLimitSeFactor * s / std::sqrt(fit.n_eff_limit);
  } else {
    const double z = ri.z_multiplier;
    ri.se_upper = s * std::sqrt((1.0 + 0.5 * z * z) / fit.n_eff_limit);
  }
  ri.se_lower = ri.se_upper;
  return ri;
}

}  // namespace qq
