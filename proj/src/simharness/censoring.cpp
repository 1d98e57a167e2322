#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "common.hpp"
#include "qq/qqfit.hpp"

namespace qq::sim {

namespace {

struct Estimates {
  double mean, sd, limit;
};

Estimates estimates_of(const QQFit& f) {
  return {f.intercept, f.slope, f.intercept + 1.96 * f.slope};
}

}  // namespace

StudyReport run_censoring_study(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;
  const auto& fractions = config.censor_fractions;
  const std::size_t F = fractions.size();
  FigureTable c1{"C1", {"n", "censored_fraction", "limit_efficiency", "mcse"}, {}};
  // Efficiencies per fraction, averaged over n below.
  std::vector<std::array<double, 3>> sums(F, {0.0, 0.0, 0.0});
  std::vector<std::array<double, 3>> spread_min(F, {1e300, 1e300, 1e300});
  std::vector<std::array<double, 3>> spread_max(F, {-1e300, -1e300, -1e300});

  for (std::size_t ci = 0; ci < config.sample_sizes.size(); ++ci) {
    const std::size_t n = config.sample_sizes[ci];
    std::vector<std::size_t> ks;
    for (double f : fractions) {
      ks.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
    }
    // Full-sample estimates at [r], censored ones at [(1 + j) * R + r].
    std::vector<double> m((F + 1) * R), s((F + 1) * R), L((F + 1) * R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ci, r));
      const auto y = detail::sorted_normal(gen, n);
      auto store = [&](std::size_t slot, const QQFit& fit) {
        const Estimates e = estimates_of(fit);
        m[slot * R + r] = e.mean;
        s[slot * R + r] = e.sd;
        L[slot * R + r] = e.limit;
      };
      store(0, fit_full(Sample::complete(y)));
      for (std::size_t j = 0; j < F; ++j) {
        std::vector<double> observed(y.begin() + static_cast<std::ptrdiff_t>(ks[j]), y.end());
        store(j + 1, fit_censored(Sample::left_censored(std::move(observed), ks[j])));
      }
    });

    auto ratio = [&](const std::vector<double>& v, std::size_t j) {
      return detail::batch_estimate(R, B, [&](std::size_t lo, std::size_t hi) {
        return detail::variance(detail::slice(v, lo, hi)) /
               detail::variance(detail::slice(v, (j + 1) * R + lo, (j + 1) * R + hi));
      });
    };

    for (std::size_t j = 0; j < F; ++j) {
      const CensoringEfficiency model = censoring_efficiency(n, ks[j]);
      Estimate em = ratio(m, j), es = ratio(s, j), el = ratio(L, j);
      em.reference = model.mean;
      es.reference = model.sd;
      el.reference = model.limit;

      Cell cell;
      cell.label = "n=" + std::to_string(n) + ",censored=" + detail::label_number(fractions[j]);
      cell.params = {{"n", static_cast<double>(n)},
                     {"censored_fraction", fractions[j]},
                     {"k", static_cast<double>(ks[j])}};
      cell.add("efficiency_mean", em);
      cell.add("efficiency_sd", es);
      cell.add("efficiency_limit", el);
      c1.rows.push_back({static_cast<double>(n), fractions[j], el.value, el.mcse});

      const std::string tag = " (" + cell.label + ")";
      report.comparisons.push_back(compare_to_target("mean efficiency vs model" + tag, em, model.mean, 0.05));
      report.comparisons.push_back(compare_to_target("sd efficiency vs model" + tag, es, model.sd, 0.05));
      report.comparisons.push_back(compare_to_target("limit efficiency vs model" + tag, el, model.limit, 0.05));
      const Estimate gap{el.value - es.value, std::hypot(el.mcse, es.mcse), std::nullopt};
      report.comparisons.push_back(
          compare_to_bounds("limit efficiency exceeds sd efficiency" + tag, gap, 0.0, std::nullopt));

      const double values[3] = {em.value, es.value, el.value};
      for (int q = 0; q < 3; ++q) {
        sums[j][q] += values[q];
        spread_min[j][q] = std::min(spread_min[j][q], values[q]);
        spread_max[j][q] = std::max(spread_max[j][q], values[q]);
      }
      report.cells.push_back(std::move(cell));
    }
  }

  FigureTable c2{"C2",
                 {"censored_fraction", "efficiency_mean", "efficiency_sd", "efficiency_limit",
                  "model_mean", "model_sd", "model_limit"},
                 {}};
  const double count = static_cast<double>(config.sample_sizes.size());
  for (std::size_t j = 0; j < F; ++j) {
    const double kf = fractions[j];
    const double f = 1.0 - kf;
    c2.rows.push_back({kf, sums[j][0] / count, sums[j][1] / count, sums[j][2] / count,
                       1.0 - 1.5 * std::pow(kf, 1.7), std::pow(2.5 - 1.5 * f, -2.0),
                       std::pow(1.38 - 0.37 * f, -2.0)});
    if (config.sample_sizes.size() > 1) {
      Estimate spread;
      spread.value = spread_max[j][2] - spread_min[j][2];
      const std::string name = "limit_efficiency_spread_over_n,censored=" + detail::label_number(kf);
      report.summary.emplace_back(name, spread);
      report.comparisons.push_back(compare_to_bounds(name, spread, std::nullopt, 0.05));
    }
  }
  report.notes.push_back(
      "efficiency = variance of the full-sample estimate / variance of the censored estimate; "
      "censored fraction = k/n, models use the uncensored fraction 1 - k/n");
  report.figures.push_back(std::move(c1));
  report.figures.push_back(std::move(c2));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
