#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qq {

// Plotting-position constants: score i of n uses the probability
// (i - beta) / (n + 1 - alpha - beta).
struct PlottingPosition {
  double alpha = 0.5;
  double beta = 0.5;

  static constexpr PlottingPosition hazen() { return {0.5, 0.5}; }
  static constexpr PlottingPosition blom() { return {0.375, 0.375}; }
  static constexpr PlottingPosition weibull() { return {0.0, 0.0}; }
  static constexpr PlottingPosition symmetric(double a) { return {a, a}; }

  bool is_symmetric() const noexcept { return alpha == beta; }
  double probability(std::size_t i, std::size_t n) const noexcept {
    return (static_cast<double>(i) - beta) / (static_cast<double>(n) + 1.0 - alpha - beta);
  }
  bool operator==(const PlottingPosition&) const = default;
};

enum class ScoreDistribution { normal, student_t };

// Abscissa of a QQ plot: n strictly increasing scores. Copies share storage.
class ScoreVector {
 public:
  ScoreVector(std::shared_ptr<const std::vector<double>> values, ScoreDistribution dist, double nu,
              PlottingPosition position)
      : values_(std::move(values)), distribution_(dist), nu_(nu), position_(position) {}

  std::size_t size() const noexcept { return values_->size(); }
  std::span<const double> values() const noexcept { return *values_; }
  double operator[](std::size_t i) const { return (*values_)[i]; }

  ScoreDistribution distribution() const noexcept { return distribution_; }
  // Degrees of freedom for t scores; 0 for normal scores.
  double nu() const noexcept { return nu_; }
  PlottingPosition position() const noexcept { return position_; }

 private:
  std::shared_ptr<const std::vector<double>> values_;
  ScoreDistribution distribution_;
  double nu_;
  PlottingPosition position_;
};

// Normal scores Phi^-1((i - beta)/(n + 1 - alpha - beta)), i = 1..n. Requires
// alpha == beta, which makes the scores point-symmetric; results are cached.
ScoreVector normal_scores(std::size_t n, PlottingPosition position);

// Same formula without the alpha == beta requirement. Only meant for
// plotting-position studies; library fitting always uses symmetric scores.
ScoreVector normal_scores_unrestricted(std::size_t n, PlottingPosition position);

// Phi^-1((i - 0.5)/n). The default abscissa everywhere in the library.
ScoreVector hazen_scores(std::size_t n);

// Student-t scores F^-1((i - 0.5)/n; nu) for real nu > 0.
ScoreVector t_scores(std::size_t n, double nu);

}  // namespace qq
