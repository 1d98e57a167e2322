#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qq/line_search.hpp"
#include "qq/qqfit.hpp"

namespace qq {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// (x^lambda - 1) / lambda, or ln x at lambda = 0. Throws ValueDomainError
// naming the first non-positive value.
std::vector<double> boxcox_transform(std::span<const double> x, double lambda);

enum class BoxCoxMethod { max_qqr, pseudolikelihood };

struct BoxCoxOptions {
  Interval lambda_range{-3.0, 3.0};
  double grid_step = 0.25;
  double tolerance = 1e-4;
  // Winsorize the QQ regression inside the objective (max-QQr only).
  std::size_t winsor = 0;
};

struct BoxCoxFit {
  double lambda_hat = 1.0;
  BoxCoxMethod method = BoxCoxMethod::max_qqr;
  double qqr_at_opt = 0.0;
  // Value of the maximized objective (QQr or profile log-likelihood).
  double objective_at_opt = 0.0;
  QQFit fit_at_opt;  // on the transformed scale
  std::vector<SearchPoint> search_trace;
  bool no_preference = false;
  std::vector<std::string> warnings;
};

// Picks lambda maximizing the QQ correlation of the transformed sample. Works
// on left-censored samples (regressing on the upper scores) and, with
// options.winsor > 0, on the winsorized QQ regression.
BoxCoxFit fit_boxcox_qqr(const Sample& sample, const BoxCoxOptions& options = {});

// Picks lambda maximizing the Box-Cox profile log-likelihood
//   -(n/2) ln sigma^2(lambda) + (lambda - 1) sum ln x.
// Complete samples only.
BoxCoxFit fit_boxcox_pl(const Sample& sample, const BoxCoxOptions& options = {});

// Profile log-likelihood at a single lambda.
double boxcox_profile_loglik(std::span<const double> x, double lambda);

struct TFitOptions {
  Interval nu_range{1.0, 200.0};
  bool integer_only = false;
  std::size_t grid_points = 40;
  double tolerance = 1e-4;
  double coverage = 0.95;
};

struct TFit {
  double nu_hat = 0.0;
  double qqr_at_opt = 0.0;
  double mu_hat = 0.0;     // intercept
  double sigma_hat = 0.0;  // slope: the t scale parameter, not the SD
  double upper_limit = 0.0;
  double lower_limit = 0.0;
  double coverage = 0.95;
  std::vector<SearchPoint> search_trace;
};

// Picks nu maximizing the correlation of the ordered data with t scores.
TFit fit_t_nu(const Sample& sample, const TFitOptions& options = {});

}  // namespace qq
