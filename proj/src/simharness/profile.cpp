#include <cmath>
#include <limits>
#include <string>

#include "common.hpp"
#include "qq/qqfit.hpp"
#include "qq/scores.hpp"

namespace qq::sim {

namespace {

std::optional<std::size_t> grid_index(const std::vector<double>& grid, double value) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - value) < 1e-9) return i;
  }
  return std::nullopt;
}

}  // namespace

StudyReport run_score_profile(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const auto& grid = config.position_grid;
  const std::size_t R = config.replicates;
  const std::size_t G = grid.size();
  FigureTable fig{"A1", {"n", "alpha", "efficiency", "mcse", "mse"}, {}};

  for (std::size_t ci = 0; ci < config.sample_sizes.size(); ++ci) {
    const std::size_t n = config.sample_sizes[ci];
    std::vector<ScoreVector> scores;
    for (double a : grid) scores.push_back(normal_scores(n, PlottingPosition::symmetric(a)));

    // Squared error of the slope as an estimator of sigma = 1, laid out g * R + r.
    std::vector<double> sq(G * R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ci, r));
      const auto y = detail::sorted_normal(gen, n);
      for (std::size_t g = 0; g < G; ++g) {
        const double e = qq_regression(y, scores[g].values()).slope - 1.0;
        sq[g * R + r] = e * e;
      }
    });

    auto mse = [&](std::size_t g, std::size_t lo, std::size_t hi) {
      return detail::mean(std::span<const double>(sq).subspan(g * R + lo, hi - lo));
    };
    auto best = [&](std::size_t lo, std::size_t hi) {
      std::size_t arg = 0;
      for (std::size_t g = 1; g < G; ++g) {
        if (mse(g, lo, hi) < mse(arg, lo, hi)) arg = g;
      }
      return arg;
    };

    std::vector<Estimate> eff(G);
    for (std::size_t g = 0; g < G; ++g) {
      eff[g] = detail::batch_estimate(R, config.batches, [&](std::size_t lo, std::size_t hi) {
        return mse(best(lo, hi), lo, hi) / mse(g, lo, hi);
      });
      Cell cell;
      cell.label = "n=" + std::to_string(n) + ",alpha=" + detail::label_number(grid[g]);
      cell.params = {{"n", static_cast<double>(n)}, {"alpha", grid[g]}};
      cell.add("mse", detail::batch_estimate(R, config.batches, [&](std::size_t lo, std::size_t hi) {
                 return mse(g, lo, hi);
               }));
      cell.add("efficiency", eff[g]);
      fig.rows.push_back({static_cast<double>(n), grid[g], eff[g].value, eff[g].mcse,
                          mse(g, 0, R)});
      report.cells.push_back(std::move(cell));
    }

    if (ci != 0) continue;
    // Summary and checks refer to the first sample size.
    const Estimate argmax = detail::batch_estimate(
        R, config.batches, [&](std::size_t lo, std::size_t hi) { return grid[best(lo, hi)]; });
    report.summary.emplace_back("argmax_alpha", argmax);
    report.comparisons.push_back(compare_to_bounds("argmax alpha=beta", argmax, 0.40, 0.55));
    if (auto i = grid_index(grid, 0.5)) {
      report.summary.emplace_back("efficiency_at_0.5", eff[*i]);
      report.comparisons.push_back(
          compare_to_bounds("efficiency at 0.5 within 0.5% of max", eff[*i], 0.995, std::nullopt));
    }
    if (auto i = grid_index(grid, 0.375)) report.summary.emplace_back("efficiency_at_0.375", eff[*i]);
    if (auto i = grid_index(grid, 0.0)) {
      report.summary.emplace_back("efficiency_at_0", eff[*i]);
      report.comparisons.push_back(
          compare_to_bounds("Weibull efficiency at least 2% below max", eff[*i], std::nullopt, 0.98));
    }
  }
  if (config.sample_sizes.size() > 1) {
    report.notes.push_back("summary statistics refer to n = " +
                           std::to_string(config.sample_sizes.front()));
  }
  report.notes.push_back("efficiency = min-grid MSE / MSE of the QQ slope as an estimator of sigma");
  report.figures.push_back(std::move(fig));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
