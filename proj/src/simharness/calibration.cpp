#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "common.hpp"
#include "qq/normtest.hpp"

namespace qq::sim {

namespace {

struct Combo {
  TestVariant variant;
  std::size_t variant_index;
  double fraction;  // censored fraction k/n; 0 for uncensored variants
};

bool uses_boxcox(TestVariant v) {
  return v == TestVariant::boxcox || v == TestVariant::boxcox_winsorized ||
         v == TestVariant::censored_boxcox;
}

// Per-batch values (indices 0..B-1) and the all-replicate value (index B).
struct CellSeries {
  std::size_t n;
  double fraction;
  std::vector<double> mean, sd;
};

}  // namespace

StudyReport run_calibration(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;

  std::vector<Combo> combos;
  for (std::size_t vi = 0; vi < config.variants.size(); ++vi) {
    const TestVariant v = parse_test_variant(config.variants[vi]);
    if (is_censored_variant(v)) {
      for (double f : config.censor_fractions) combos.push_back({v, vi, f});
    } else {
      combos.push_back({v, vi, 0.0});
    }
  }
  const std::size_t C = combos.size();
  std::vector<std::vector<CellSeries>> series(config.variants.size());
  FigureTable f1{"F1",
                 {"variant_index", "n", "log_n_plus_30", "mean_y", "sd_y", "model_mean",
                  "model_sd", "size"},
                 {}};
  FigureTable f2{"F2",
                 {"variant_index", "n", "censored_fraction", "log_n_plus_30", "mean_y", "sd_y",
                  "model_mean", "model_sd", "size"},
                 {}};

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const std::size_t n = config.sample_sizes[ni];
    const double log_n = std::log(static_cast<double>(n) + 30.0);
    std::vector<double> y(C * R), hit(C * R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ni, r));
      const auto z = detail::sorted_normal(gen, n);
      std::vector<double> ez(n);
      std::transform(z.begin(), z.end(), ez.begin(), [](double v) { return std::exp(v); });
      for (std::size_t c = 0; c < C; ++c) {
        const auto& data = uses_boxcox(combos[c].variant) ? ez : z;
        const auto k =
            static_cast<std::size_t>(std::llround(combos[c].fraction * static_cast<double>(n)));
        const Sample sample =
            k == 0 ? Sample::complete(data)
                   : Sample::left_censored(
                         std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(k), data.end()), k);
        const NormalityTest t = test_normality(sample, combos[c].variant, config.alpha);
        y[c * R + r] = t.y;
        hit[c * R + r] = t.reject ? 1.0 : 0.0;
      }
    });

    for (std::size_t c = 0; c < C; ++c) {
      const Combo& combo = combos[c];
      const auto k = static_cast<std::size_t>(std::llround(combo.fraction * static_cast<double>(n)));
      const double f = static_cast<double>(k) / static_cast<double>(n);
      CellSeries cs{n, f, {}, {}};
      for (std::size_t b = 0; b <= B; ++b) {
        const std::size_t lo = b < B ? b * R / B : 0;
        const std::size_t hi = b < B ? (b + 1) * R / B : R;
        const auto part = detail::slice(y, c * R + lo, c * R + hi);
        cs.mean.push_back(detail::mean(part));
        cs.sd.push_back(std::sqrt(detail::variance(part)));
      }
      auto from_series = [&](const std::vector<double>& v) {
        std::vector<double> batches(v.begin(), v.end() - 1);
        return Estimate{v.back(), std::sqrt(detail::variance(batches) / static_cast<double>(B)),
                        std::nullopt};
      };
      const CalibrationCoefficients& model = builtin_calibration(combo.variant, k > 0);
      Estimate mean_y = from_series(cs.mean);
      Estimate sd_y = from_series(cs.sd);
      mean_y.reference = model.mean_model(n, f);
      sd_y.reference = model.sd_model(n, f);
      Estimate size = detail::proportion(detail::slice(hit, c * R, (c + 1) * R));
      size.reference = config.alpha;

      Cell cell;
      cell.label = config.variants[combo.variant_index] + ",n=" + std::to_string(n);
      if (is_censored_variant(combo.variant)) cell.label += ",censored=" + detail::label_number(combo.fraction);
      cell.params = {{"n", static_cast<double>(n)}, {"censored_fraction", f}};
      cell.add("mean_y", mean_y);
      cell.add("sd_y", sd_y);
      cell.add("size", size);
      // Standardized mean and sd of Z under the built-in model.
      cell.add("mean_z", {(mean_y.value - *mean_y.reference) / *sd_y.reference,
                          mean_y.mcse / *sd_y.reference, 0.0});
      cell.add("sd_z", {sd_y.value / *sd_y.reference, sd_y.mcse / *sd_y.reference, 1.0});

      const double lo_size = is_censored_variant(combo.variant) ? 0.03 : 0.035;
      const double hi_size = is_censored_variant(combo.variant) ? 0.07 : 0.065;
      if (std::abs(config.alpha - 0.05) < 1e-12) {
        report.comparisons.push_back(
            compare_to_bounds("test size (" + cell.label + ")", size, lo_size, hi_size));
      }
      if (is_censored_variant(combo.variant)) {
        f2.rows.push_back({static_cast<double>(combo.variant_index), static_cast<double>(n), f,
                           log_n, mean_y.value, sd_y.value, *mean_y.reference, *sd_y.reference,
                           size.value});
      } else {
        f1.rows.push_back({static_cast<double>(combo.variant_index), static_cast<double>(n), log_n,
                           mean_y.value, sd_y.value, *mean_y.reference, *sd_y.reference,
                           size.value});
      }
      series[combo.variant_index].push_back(std::move(cs));
      report.cells.push_back(std::move(cell));
    }
  }

  // Refit the calibration regressions across cells.
  for (std::size_t vi = 0; vi < config.variants.size(); ++vi) {
    const TestVariant v = parse_test_variant(config.variants[vi]);
    const auto& cells = series[vi];
    const bool censored = is_censored_variant(v);
    std::set<std::size_t> ns;
    std::set<double> fs;
    for (const auto& cs : cells) {
      ns.insert(cs.n);
      fs.insert(cs.fraction);
    }
    const std::size_t p = censored ? 4 : 2;
    if (ns.size() < 2 || (censored && fs.size() < 2) || cells.size() <= p) {
      report.notes.push_back("refit of '" + config.variants[vi] +
                             "' skipped: too few distinct sample sizes or fractions");
      continue;
    }
    std::vector<std::vector<double>> x;
    for (const auto& cs : cells) {
      const double l = std::log(static_cast<double>(cs.n) + 30.0);
      if (censored) {
        x.push_back({1.0, l, cs.fraction, cs.fraction * l});
      } else {
        x.push_back({1.0, l});
      }
    }
    const CalibrationCoefficients& builtin = builtin_calibration(v, censored);
    const char* mean_names[] = {"A", "B", "C", "D"};
    const char* sd_names[] = {"D", "E", "F", "G"};
    const char* censored_names[] = {"a", "b", "c", "d"};
    for (int which = 0; which < 2; ++which) {
      auto fit_at = [&](std::size_t b) {
        std::vector<double> yv;
        for (const auto& cs : cells) yv.push_back(which == 0 ? cs.mean[b] : cs.sd[b]);
        return detail::ols(x, yv);
      };
      const detail::OlsResult full = fit_at(B);
      std::vector<std::vector<double>> per_batch(p);
      for (std::size_t b = 0; b < B; ++b) {
        const auto res = fit_at(b);
        for (std::size_t i = 0; i < p; ++i) per_batch[i].push_back(res.coef[i]);
      }
      const std::string prefix = config.variants[vi] + (which == 0 ? ".mean." : ".sd.");
      std::vector<Estimate> coefs;
      for (std::size_t i = 0; i < p; ++i) {
        const double ref = which == 0 ? builtin.mean[i] : builtin.sd[i];
        const std::string coef = censored ? std::string(censored_names[i])
                                          : std::string(which == 0 ? mean_names[i] : sd_names[i]);
        coefs.push_back({full.coef[i],
                         std::sqrt(detail::variance(per_batch[i]) / static_cast<double>(B)), ref});
        report.summary.emplace_back(prefix + coef, coefs.back());
      }
      const Estimate r2{full.r_squared, 0.0, std::nullopt};
      report.summary.emplace_back(prefix + "r_squared", r2);
      report.summary.emplace_back(prefix + "residual_sd",
                                  Estimate{full.residual_sd, 0.0, std::nullopt});
      if (!censored && which == 0 && ns.size() >= 3) {
        report.comparisons.push_back(
            compare_to_bounds(prefix + "r_squared above 0.999", r2, 0.999, std::nullopt));
        if (v == TestVariant::full) {
          report.comparisons.push_back(
              compare_to_target("full.mean.B vs built-in", coefs[1], builtin.mean[1], 0.05));
        }
      }
    }
  }
  report.notes.push_back("Y = ((1 - r)^-0.1 - 1) / -0.1; regressions on ln(n + 30)");
  report.notes.push_back("Box-Cox variants are calibrated on exp of a normal sample");
  if (!f1.rows.empty()) report.figures.push_back(std::move(f1));
  if (!f2.rows.empty()) report.figures.push_back(std::move(f2));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
