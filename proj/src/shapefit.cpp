#include "qq/shapefit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qq/errors.hpp"
#include "qq/probability.hpp"
#include "qq/scores.hpp"

namespace qq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw ValueDomainError("Box-Cox requires positive data, got " + std::to_string(x[i]), i);
    }
  }
}

inline double boxcox_from_log(double log_x, double lambda) {
  if (lambda == 0.0) return log_x;
  return std::expm1(lambda * log_x) / lambda;
}

std::vector<double> logs_of(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i]);
  return out;
}

std::vector<double> lambda_grid(const BoxCoxOptions& o) {
  if (!(o.lambda_range.lo < o.lambda_range.hi) || !(o.grid_step > 0.0)) {
    throw DomainError("Box-Cox search: need lo < hi and a positive grid step");
  }
  std::vector<double> grid;
  const double span = o.lambda_range.hi - o.lambda_range.lo;
  const auto steps = static_cast<std::size_t>(std::floor(span / o.grid_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    grid.push_back(o.lambda_range.lo + static_cast<double>(i) * o.grid_step);
  }
  if (grid.back() < o.lambda_range.hi - 1e-12) grid.push_back(o.lambda_range.hi);
  return grid;
}

void check_boxcox_sample(const Sample& sample) {
  sample.validate();
  if (sample.k_right_censored != 0) throw DomainError("right-censored samples are not supported");
  if (sample.n_total < 10) throw InsufficientDataError("Box-Cox fitting needs n >= 10");
  require_positive(sample.values);
}

Sample transformed_sample(const Sample& sample, double lambda) {
  Sample t = sample;
  t.values = boxcox_transform(sample.values, lambda);
  if (sample.detection_limit && *sample.detection_limit > 0.0) {
    const double dl = *sample.detection_limit;
    t.detection_limit = boxcox_transform(std::span<const double>(&dl, 1), lambda).front();
  } else {
    t.detection_limit.reset();
  }
  return t;
}

QQFit qq_fit_for(const Sample& sample, std::size_t winsor) {
  if (sample.k_censored > 0) return fit_censored(sample);
  return fit_winsorized(sample, winsor);
}

BoxCoxFit finish_boxcox(const Sample& sample, const BoxCoxOptions& options, BoxCoxMethod method,
                        SearchResult search) {
  BoxCoxFit fit;
  fit.method = method;
  fit.search_trace = std::move(search.trace);
  if (search.flat) {
    fit.no_preference = true;
    fit.lambda_hat = 1.0;
    fit.warnings.emplace_back("objective is flat over the lambda range; returning lambda = 1");
  } else {
    fit.lambda_hat = search.argmax;
  }
  fit.fit_at_opt = qq_fit_for(transformed_sample(sample, fit.lambda_hat), options.winsor);
  fit.qqr_at_opt = fit.fit_at_opt.r;
  fit.objective_at_opt = search.flat ? fit.search_trace.front().objective : search.best;
  return fit;
}

}  // namespace

std::vector<double> boxcox_transform(std::span<const double> x, double lambda) {
  require_positive(x);
  std::vector<double> out(x.size());
  if (lambda == 1.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - 1.0;
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = boxcox_from_log(std::log(x[i]), lambda);
  return out;
}

BoxCoxFit fit_boxcox_qqr(const Sample& sample, const BoxCoxOptions& options) {
  check_boxcox_sample(sample);
  const std::size_t n = sample.n_total;
  const std::size_t k = sample.k_censored;
  const std::size_t w = options.winsor;
  if (k > 0 && w > 0) throw DomainError("Box-Cox: winsorizing a censored sample is not supported");
  if (n - k < 3 || 2 * w + 3 > n) {
    throw InsufficientDataError("Box-Cox: too few points remain for the QQ regression");
  }

  const auto scores = hazen_scores(n);
  const std::size_t first = k > 0 ? 0 : w;
  const std::size_t count = k > 0 ? n - k : n - 2 * w;
  const auto x = scores.values().subspan(k > 0 ? k : w, count);
  const std::vector<double> logs = logs_of(sample.values);
  std::vector<double> y(count);

  auto objective = [&](double lambda) {
    for (std::size_t i = 0; i < count; ++i) y[i] = boxcox_from_log(logs[first + i], lambda);
    try {
      const double r = qq_regression(y, x).r;
      return std::isfinite(r) ? r : kNegInf;
    } catch (const DegenerateError&) {
      return kNegInf;
    }
  };

  const auto grid = lambda_grid(options);
  SearchOptions so;
  so.tolerance = options.tolerance;
  so.preferred = 1.0;
  return finish_boxcox(sample, options, BoxCoxMethod::max_qqr,
                       grid_golden_maximize(grid, objective, so));
}

double boxcox_profile_loglik(std::span<const double> x, double lambda) {
  require_positive(x);
  const std::vector<double> logs = logs_of(x);
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  double sum_log = 0.0;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = boxcox_from_log(logs[i], lambda);
    mean += y[i];
    sum_log += logs[i];
  }
  mean /= n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return -0.5 * n * std::log(ss / n) + (lambda - 1.0) * sum_log;
}

BoxCoxFit fit_boxcox_pl(const Sample& sample, const BoxCoxOptions& options) {
  check_boxcox_sample(sample);
  if (sample.k_censored > 0) {
    throw DomainError("Box-Cox pseudolikelihood is only defined for complete samples");
  }
  if (options.winsor > 0) {
    throw DomainError("Box-Cox pseudolikelihood does not support winsorizing");
  }
  const std::vector<double> logs = logs_of(sample.values);
  const auto n = static_cast<double>(logs.size());
  double sum_log = 0.0;
  for (double l : logs) sum_log += l;
  std::vector<double> y(logs.size());

  auto objective = [&](double lambda) {
    double mean = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      y[i] = boxcox_from_log(logs[i], lambda);
      mean += y[i];
    }
    mean /= n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double ll = -0.5 * n * std::log(ss / n) + (lambda - 1.0) * sum_log;
    return std::isfinite(ll) ? ll : kNegInf;
  };

  const auto grid = lambda_grid(options);
  SearchOptions so;
  so.tolerance = options.tolerance;
  so.preferred = 1.0;
  return finish_boxcox(sample, options, BoxCoxMethod::pseudolikelihood,
                       grid_golden_maximize(grid, objective, so));
}

TFit fit_t_nu(const Sample& sample, const TFitOptions& options) {
  sample.validate();
  if (sample.k_censored != 0 || sample.k_right_censored != 0) {
    throw DomainError("fit_t_nu: censored samples are not supported");
  }
  const std::size_t n = sample.n_total;
  if (n < 10) throw InsufficientDataError("fit_t_nu: needs n >= 10");
  const double lo = options.nu_range.lo;
  const double hi = options.nu_range.hi;
  if (!(lo > 0.0 && lo < hi) || !std::isfinite(hi)) {
    throw DomainError("fit_t_nu: nu range must satisfy 0 < lo < hi < infinity");
  }

  std::vector<double> grid;
  SearchOptions so;
  so.preferred = std::numeric_limits<double>::infinity();
  if (options.integer_only) {
    for (double v = std::ceil(lo); v <= hi; v += 1.0) grid.push_back(v);
    if (grid.empty()) throw DomainError("fit_t_nu: no integer nu inside the range");
    so.tolerance = 0.0;
  } else {
    const std::size_t m = std::max<std::size_t>(options.grid_points, 2);
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      grid.push_back(i + 1 == m ? hi : std::exp(std::log(lo) + step * static_cast<double>(i)));
    }
    grid.front() = lo;
    so.tolerance = options.tolerance;
  }

  auto objective = [&](double nu) {
    const double r = qq_regression(sample.values, t_scores(n, nu).values()).r;
    return std::isfinite(r) ? r : kNegInf;
  };
  SearchResult search = grid_golden_maximize(grid, objective, so);

  TFit fit;
  fit.nu_hat = search.argmax;
  fit.search_trace = std::move(search.trace);
  const LineFit line = qq_regression(sample.values, t_scores(n, fit.nu_hat).values());
  fit.qqr_at_opt = line.r;
  fit.mu_hat = line.intercept;
  fit.sigma_hat = line.slope;
  fit.coverage = options.coverage;
  const double q = student_t_inv_cdf(0.5 * (1.0 + options.coverage), fit.nu_hat);
  fit.upper_limit = fit.mu_hat + fit.sigma_hat * q;
  fit.lower_limit = fit.mu_hat - fit.sigma_hat * q;
  return fit;
}

}  // namespace qq
