#include <cmath>
#include <map>
#include <string>

#include "common.hpp"
#include "qq/qqfit.hpp"
#include "qq/scores.hpp"

namespace qq::sim {

namespace {

// Mean and sd of s and of the QQ slope, and the efficiency, per sample size.
struct B1Row {
  double mean_s, mean_slope, sd_s, sd_slope, rmse_s, rmse_slope, efficiency;
};
const std::map<std::size_t, B1Row> kTableB1 = {
    {30, {0.9919, 0.9793, 0.1305, 0.1292, 0.1308, 0.1309, 99.86}},
    {60, {0.9958, 0.9883, 0.0920, 0.0915, 0.0921, 0.0922, 99.70}},
    {120, {0.9982, 0.9939, 0.0646, 0.0645, 0.0647, 0.0648, 99.61}},
    {240, {0.9991, 0.9967, 0.0455, 0.0455, 0.0455, 0.0456, 99.89}},
};

double sample_sd(std::span<const double> v) { return std::sqrt(detail::variance(v)); }

}  // namespace

StudyReport run_slope_efficiency(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;
  FigureTable table{"B1",
                    {"n", "mean_s", "mean_slope", "sd_s", "sd_slope", "rmse_s", "rmse_slope",
                     "efficiency"},
                    {}};

  for (std::size_t ci = 0; ci < config.sample_sizes.size(); ++ci) {
    const std::size_t n = config.sample_sizes[ci];
    const auto x = hazen_scores(n);
    std::vector<double> s(R), slope(R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ci, r));
      const auto y = detail::sorted_normal(gen, n);
      s[r] = sample_sd(y);
      slope[r] = qq_regression(y, x.values()).slope;
    });

    auto stat = [&](auto f) {
      return detail::batch_estimate(R, B, [&](std::size_t lo, std::size_t hi) {
        return f(detail::slice(s, lo, hi), detail::slice(slope, lo, hi));
      });
    };
    using V = std::span<const double>;
    const Estimate mean_s = stat([](V a, V) { return detail::mean(a); });
    const Estimate mean_slope = stat([](V, V b) { return detail::mean(b); });
    const Estimate sd_s = stat([](V a, V) { return sample_sd(a); });
    const Estimate sd_slope = stat([](V, V b) { return sample_sd(b); });
    const Estimate rmse_s = stat([](V a, V) { return std::sqrt(detail::mse_about(a, 1.0)); });
    const Estimate rmse_slope = stat([](V, V b) { return std::sqrt(detail::mse_about(b, 1.0)); });
    Estimate eff = stat([](V a, V b) {
      return 100.0 * detail::mse_about(a, 1.0) / detail::mse_about(b, 1.0);
    });

    Cell cell;
    cell.label = "n=" + std::to_string(n);
    cell.params = {{"n", static_cast<double>(n)}};
    std::vector<std::pair<std::string, Estimate>> stats = {
        {"mean_s", mean_s},     {"mean_slope", mean_slope}, {"sd_s", sd_s},
        {"sd_slope", sd_slope}, {"rmse_s", rmse_s},         {"rmse_slope", rmse_slope},
        {"efficiency", eff}};
    if (auto it = kTableB1.find(n); it != kTableB1.end()) {
      const B1Row& t = it->second;
      const double refs[] = {t.mean_s, t.mean_slope, t.sd_s,      t.sd_slope,
                             t.rmse_s, t.rmse_slope, t.efficiency};
      for (std::size_t i = 0; i < stats.size(); ++i) stats[i].second.reference = refs[i];
    }
    for (auto& [name, e] : stats) cell.add(name, e);
    table.rows.push_back({static_cast<double>(n), mean_s.value, mean_slope.value, sd_s.value,
                          sd_slope.value, rmse_s.value, rmse_slope.value, eff.value});

    const std::string tag = " (n=" + std::to_string(n) + ")";
    if (n == 120) {
      report.comparisons.push_back(compare_to_target("slope mean" + tag, mean_slope, 0.9939, 0.003));
      report.comparisons.push_back(compare_to_target("slope sd" + tag, sd_slope, 0.0645, 0.002));
      report.comparisons.push_back(compare_to_target("efficiency" + tag, eff, 99.61, 0.5));
    }
    report.comparisons.push_back(
        compare_to_bounds("efficiency at least 99" + tag, eff, 99.0, std::nullopt));
    report.cells.push_back(std::move(cell));
  }
  report.notes.push_back("efficiency = 100 * (RMSE of s / RMSE of QQ slope)^2; sigma = 1");
  report.figures.push_back(std::move(table));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
