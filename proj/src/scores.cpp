#include "qq/scores.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "qq/errors.hpp"
#include "qq/probability.hpp"

namespace qq {

namespace {

void check_position(std::size_t n, PlottingPosition pos) {
  if (n < 1) throw DomainError("scores: n must be at least 1");
  if (!(pos.alpha >= 0.0 && pos.alpha < 1.0) || !(pos.beta >= 0.0 && pos.beta < 1.0)) {
    throw DomainError("scores: alpha and beta must lie in [0, 1)");
  }
}

// Fills the lower half from `quantile` and mirrors it, so the result is
// exactly point-symmetric.
template <typename Quantile>
std::vector<double> symmetric_scores(std::size_t n, PlottingPosition pos, Quantile quantile) {
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = quantile(pos.probability(i + 1, n));
    v[i] = x;
    v[n - 1 - i] = -x;
  }
  return v;
}

struct CacheKey {
  std::size_t n;
  double alpha;
  double beta;
  auto operator<=>(const CacheKey&) const = default;
};

std::shared_ptr<const std::vector<double>> cached_normal(std::size_t n, PlottingPosition pos) {
  static std::mutex mutex;
  static std::map<CacheKey, std::shared_ptr<const std::vector<double>>> cache;

  const CacheKey key{n, pos.alpha, pos.beta};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto values = std::make_shared<const std::vector<double>>(
      symmetric_scores(n, pos, [](double p) { return std_normal_inv_cdf(p); }));
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(values)).first->second;
}

}  // namespace

ScoreVector normal_scores(std::size_t n, PlottingPosition position) {
  check_position(n, position);
  if (!position.is_symmetric()) {
    throw DomainError("normal_scores: alpha must equal beta for symmetric scores; use "
                      "normal_scores_unrestricted for asymmetric positions");
  }
  return ScoreVector(cached_normal(n, position), ScoreDistribution::normal, 0.0, position);
}

ScoreVector normal_scores_unrestricted(std::size_t n, PlottingPosition position) {
  check_position(n, position);
  if (position.is_symmetric()) return normal_scores(n, position);
  auto values = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    (*values)[i] = std_normal_inv_cdf(position.probability(i + 1, n));
  }
  return ScoreVector(std::move(values), ScoreDistribution::normal, 0.0, position);
}

ScoreVector hazen_scores(std::size_t n) { return normal_scores(n, PlottingPosition::hazen()); }

ScoreVector t_scores(std::size_t n, double nu) {
  constexpr PlottingPosition pos = PlottingPosition::hazen();
  check_position(n, pos);
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("t_scores: nu must be positive and finite, got " + std::to_string(nu));
  }
  auto values = std::make_shared<const std::vector<double>>(
      symmetric_scores(n, pos, [nu](double p) { return student_t_inv_cdf(p, nu); }));
  return ScoreVector(std::move(values), ScoreDistribution::student_t, nu, pos);
}

}  // namespace qq
