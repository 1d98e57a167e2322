#pragma once

// Special functions for the normal and Student-t distributions.

namespace qq {

// A probability strictly inside (0, 1). Endpoints are rejected rather than
// mapped to infinities.
class Probability {
 public:
  explicit Probability(double p);
  double value() const noexcept { return p_; }

 private:
  double p_;
};

// Standard normal CDF, absolute error below 1e-12. Throws DomainError for
// non-finite z.
double std_normal_cdf(double z);

// Upper tail 1 - Phi(z), computed without cancellation.
double std_normal_sf(double z);

// Inverse standard normal CDF. Rational starting value refined by a Halley
// step against std_normal_cdf.
double std_normal_inv_cdf(Probability p);
inline double std_normal_inv_cdf(double p) { return std_normal_inv_cdf(Probability(p)); }

// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing both
// lets callers avoid cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);
inline double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

// Student-t CDF for real nu > 0.
double student_t_cdf(double t, double nu);

// Inverse Student-t CDF for real-valued nu > 0.
double student_t_inv_cdf(Probability p, double nu);
inline double student_t_inv_cdf(double p, double nu) {
  return student_t_inv_cdf(Probability(p), nu);
}

}  // namespace qq
