#include "qq/line_search.hpp"

#include <cmath>
#include <stdexcept>

namespace qq {

namespace {

// Is `candidate` preferred over `incumbent` when their objectives tie?
bool closer_to_preferred(double candidate, double incumbent, double preferred) {
  if (std::isinf(preferred)) return preferred > 0 ? candidate > incumbent : candidate < incumbent;
  return std::fabs(candidate - preferred) < std::fabs(incumbent - preferred);
}

}  // namespace

SearchResult grid_golden_maximize(std::span<const double> grid,
                                  const std::function<double(double)>& objective,
                                  const SearchOptions& options) {
  if (grid.empty()) throw std::invalid_argument("grid_golden_maximize: empty grid");

  SearchResult result;
  result.trace.reserve(grid.size() + 32);

  std::size_t best_index = 0;
  double lowest = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = objective(grid[i]);
    result.trace.push_back({grid[i], value});
    if (i == 0) {
      result.best = value;
      lowest = value;
      continue;
    }
    lowest = std::min(lowest, value);
    const bool better = value > result.best + options.tie_tolerance;
    const bool tie = std::fabs(value - result.best) <= options.tie_tolerance;
    if (better || (tie && closer_to_preferred(grid[i], grid[best_index], options.preferred))) {
      best_index = i;
      result.best = std::max(value, result.best);
    }
  }
  result.argmax = grid[best_index];
  result.best = result.trace[best_index].objective;
  result.flat = result.best - lowest <= options.tie_tolerance;

  if (result.flat || options.tolerance <= 0.0 || grid.size() < 2) return result;

  auto consider = [&](double x, double value) {
    result.trace.push_back({x, value});
    const bool better = value > result.best + options.tie_tolerance;
    const bool tie = std::fabs(value - result.best) <= options.tie_tolerance;
    if (better || (tie && value >= result.best &&
                   closer_to_preferred(x, result.argmax, options.preferred))) {
      result.argmax = x;
      result.best = value;
    }
  };

  double a = grid[best_index == 0 ? 0 : best_index - 1];
  double b = grid[best_index + 1 == grid.size() ? best_index : best_index + 1];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  consider(c, fc);
  double fd = objective(d);
  consider(d, fd);
  while (b - a > options.tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
      consider(d, fd);
    }
  }
  return result;
}

}  // namespace qq
