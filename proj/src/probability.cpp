#include "qq/probability.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qq/errors.hpp"

namespace qq {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Acklam's rational approximation for the lower half (p <= 0.5); relative
// error about 1.15e-9 before refinement.
double acklam_lower(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

// Upper tail P(T > t) for t >= 0.
double t_upper_tail(double t, double nu) {
  const double t2 = t * t;
  double x;
  double y;
  if (std::isinf(t2)) {
    return 0.0;
  }
  x = nu / (nu + t2);
  y = t2 / (nu + t2);
  return 0.5 * incomplete_beta(0.5 * nu, 0.5, x, y);
}

double t_density(double t, double nu, double log_norm) {
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

// Cornish-Fisher expansion of the t quantile around the normal quantile z.
double t_quantile_asymptotic(double z, double nu) {
  const double z2 = z * z;
  const double z3 = z2 * z;
  const double z5 = z3 * z2;
  const double z7 = z5 * z2;
  const double z9 = z7 * z2;
  const double g1 = (z3 + z) / 4.0;
  const double g2 = (5.0 * z5 + 16.0 * z3 + 3.0 * z) / 96.0;
  const double g3 = (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / 384.0;
  const double g4 =
      (79.0 * z9 + 776.0 * z7 + 1482.0 * z5 - 1920.0 * z3 - 945.0 * z) / 92160.0;
  return z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu) + g4 / (nu * nu * nu * nu);
}

// Solves P(T > t) = q for t > 0, q in (0, 0.5).
double t_upper_quantile(double q, double nu) {
  if (nu == 1.0) return 1.0 / std::tan(std::numbers::pi * q);
  if (nu == 2.0) return (1.0 - 2.0 * q) / std::sqrt(2.0 * q * (1.0 - q));

  const double z = -std_normal_inv_cdf(q);
  if (nu >= 1e5) return t_quantile_asymptotic(z, nu);

  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * std::numbers::pi);

  // Bracket: tail(lo) > q >= tail(hi).
  double lo = 0.0;
  double hi = std::max(1.0, nu > 4.0 ? t_quantile_asymptotic(z, nu) : z);
  while (t_upper_tail(hi, nu) > q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::max();
  }

  double t = 0.5 * (lo + hi);
  if (lo > 0.0 && hi / lo > 4.0) t = std::sqrt(lo * hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double g = t_upper_tail(t, nu) - q;
    if (g == 0.0) return t;
    if (g > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t + g / t_density(t, nu, log_norm);
    if (!(next > lo && next < hi)) {
      next = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    if (std::fabs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * next) {
      return next;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
    t = next;
  }
  return t;
}

}  // namespace

Probability::Probability(double p) : p_(p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("probability must lie strictly inside (0, 1), got " + std::to_string(p));
  }
}

double std_normal_cdf(double z) {
  if (!std::isfinite(z)) throw DomainError("std_normal_cdf: argument must be finite");
  return 0.5 * std::erfc(-z / kSqrt2);
}

double std_normal_sf(double z) {
  if (!std::isfinite(z)) throw DomainError("std_normal_sf: argument must be finite");
  return 0.5 * std::erfc(z / kSqrt2);
}

double std_normal_inv_cdf(Probability prob) {
  const double p = prob.value();
  if (p == 0.5) return 0.0;
  // Work in the lower tail so that the refinement uses a relative-accurate
  // CDF; the upper half follows by odd symmetry.
  const double q = p < 0.5 ? p : 1.0 - p;
  double x = acklam_lower(q);
  const double e = 0.5 * std::erfc(-x / kSqrt2) - q;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return p < 0.5 ? x : -x;
}

double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0 || x == 1.0) return 1.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double student_t_cdf(double t, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("student_t_cdf: nu must be positive");
  if (std::isnan(t)) throw DomainError("student_t_cdf: t is NaN");
  if (t == 0.0) return 0.5;
  const double tail = t_upper_tail(std::fabs(t), nu);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_inv_cdf(Probability prob, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("student_t_inv_cdf: nu must be a positive finite number");
  }
  const double p = prob.value();
  if (p == 0.5) return 0.0;
  const double q = p < 0.5 ? p : 1.0 - p;
  const double t = t_upper_quantile(q, nu);
  return p < 0.5 ? -t : t;
}

}  // namespace qq
