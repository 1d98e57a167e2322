#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qq {

struct SearchPoint {
  double parameter = 0.0;
  double objective = 0.0;
};

struct SearchResult {
  double argmax = 0.0;
  double best = 0.0;
  // True when every grid value agreed to within the tie tolerance.
  bool flat = false;
  // Every evaluation in order: grid points first, then refinement points.
  std::vector<SearchPoint> trace;
};

struct SearchOptions {
  // Golden-section refinement stops once the bracket is this narrow; <= 0
  // disables refinement.
  double tolerance = 1e-4;
  // Objective values this close count as ties.
  double tie_tolerance = 1e-12;
  // Ties go to the parameter closest to this value; +infinity means "largest".
  double preferred = 0.0;
};

// Maximizes `objective` over an ascending grid, then refines by golden-section
// search inside the bracket around the best grid point. The returned maximum
// is never below the best grid value.
SearchResult grid_golden_maximize(std::span<const double> grid,
                                  const std::function<double(double)>& objective,
                                  const SearchOptions& options);

}  // namespace qq
