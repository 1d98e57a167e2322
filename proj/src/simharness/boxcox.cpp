#include <cmath>
#include <map>
#include <string>

#include "common.hpp"
#include "qq/shapefit.hpp"

namespace qq::sim {

namespace {

struct E1Row {
  double bias_qq, bias_pl, sd_qq, sd_pl, rmse_qq, rmse_pl, efficiency;
};
// Keyed by 4 * lambda.
const std::map<int, E1Row> kTableE1 = {
    {-8, {0.014, 0.073, 0.592, 0.564, 0.592, 0.568, 92.0}},
    {-6, {0.011, 0.056, 0.440, 0.419, 0.440, 0.422, 92.0}},
    {-4, {0.012, 0.042, 0.293, 0.279, 0.293, 0.282, 92.6}},
    {-2, {0.005, 0.020, 0.146, 0.139, 0.146, 0.140, 92.1}},
    {0, {-0.004, -0.004, 0.315, 0.306, 0.315, 0.306, 94.4}},
    {2, {-0.003, -0.017, 0.148, 0.140, 0.148, 0.141, 91.4}},
    {4, {-0.009, -0.039, 0.294, 0.279, 0.294, 0.282, 91.8}},
    {6, {-0.013, -0.058, 0.451, 0.429, 0.452, 0.433, 91.8}},
    {8, {-0.012, -0.071, 0.585, 0.556, 0.585, 0.561, 91.7}},
};

// N(1, 0.25^2) raised to 1/lambda (exp at lambda = 0), so that the Box-Cox
// transform with the true lambda is exactly normal.
std::vector<double> skewed_sample(Generator& gen, std::size_t n, double lambda) {
  std::vector<double> x(n);
  for (auto& v : x) {
    double z;
    do {
      z = 1.0 + 0.25 * gen.normal();
    } while (!(z > 0.0));
    v = lambda == 0.0 ? std::exp(z) : std::pow(z, 1.0 / lambda);
  }
  return x;
}

}  // namespace

StudyReport run_boxcox_study(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;
  FigureTable e1{"E1",
                 {"n", "lambda", "bias_qq", "bias_pl", "sd_qq", "sd_pl", "rmse_qq", "rmse_pl",
                  "efficiency", "correlation"},
                 {}};
  double eff_sum = 0.0, corr_sum = 0.0, eff_var = 0.0, corr_var = 0.0;
  std::size_t cells = 0;

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const std::size_t n = config.sample_sizes[ni];
    for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
      const double lambda = config.lambdas[li];
      std::vector<double> qq(R), pl(R);
      detail::parallel_for(R, config.threads, [&](std::size_t r) {
        Generator gen(detail::replicate_stream(config, ni * config.lambdas.size() + li, r));
        const Sample sample = Sample::complete(skewed_sample(gen, n, lambda));
        qq[r] = fit_boxcox_qqr(sample).lambda_hat;
        pl[r] = fit_boxcox_pl(sample).lambda_hat;
      });

      using V = std::span<const double>;
      auto stat = [&](auto f) {
        return detail::batch_estimate(R, B, [&](std::size_t lo, std::size_t hi) {
          return f(detail::slice(qq, lo, hi), detail::slice(pl, lo, hi));
        });
      };
      std::vector<std::pair<std::string, Estimate>> stats = {
          {"bias_qq", stat([&](V a, V) { return detail::mean(a) - lambda; })},
          {"bias_pl", stat([&](V, V b) { return detail::mean(b) - lambda; })},
          {"sd_qq", stat([](V a, V) { return std::sqrt(detail::variance(a)); })},
          {"sd_pl", stat([](V, V b) { return std::sqrt(detail::variance(b)); })},
          {"rmse_qq", stat([&](V a, V) { return std::sqrt(detail::mse_about(a, lambda)); })},
          {"rmse_pl", stat([&](V, V b) { return std::sqrt(detail::mse_about(b, lambda)); })},
          {"efficiency", stat([&](V a, V b) {
             return 100.0 * detail::mse_about(b, lambda) / detail::mse_about(a, lambda);
           })},
          {"correlation", stat([](V a, V b) { return detail::correlation(a, b); })},
      };
      const auto key = static_cast<int>(std::lround(lambda * 4.0));
      const auto row = kTableE1.find(key);
      if (row != kTableE1.end()) {
        const E1Row& t = row->second;
        const double refs[] = {t.bias_qq, t.bias_pl, t.sd_qq,     t.sd_pl,
                               t.rmse_qq, t.rmse_pl, t.efficiency};
        for (std::size_t i = 0; i < 7; ++i) stats[i].second.reference = refs[i];
      }

      Cell cell;
      cell.label = "n=" + std::to_string(n) + ",lambda=" + detail::label_number(lambda);
      cell.params = {{"n", static_cast<double>(n)}, {"lambda", lambda}};
      std::vector<double> fig_row = {static_cast<double>(n), lambda};
      for (auto& [name, e] : stats) {
        cell.add(name, e);
        fig_row.push_back(e.value);
      }
      e1.rows.push_back(fig_row);

      const Estimate& eff = cell.stat("efficiency");
      const Estimate& corr = cell.stat("correlation");
      eff_sum += eff.value;
      corr_sum += corr.value;
      eff_var += eff.mcse * eff.mcse;
      corr_var += corr.mcse * corr.mcse;
      ++cells;
      const std::string tag = " (" + cell.label + ")";
      if (row != kTableE1.end() && n == 120) {
        report.comparisons.push_back(
            compare_to_target("efficiency" + tag, eff, row->second.efficiency, 4.0));
      }
      report.comparisons.push_back(
          compare_to_bounds("QQ-PL correlation" + tag, corr, 0.98, std::nullopt));
      if (lambda != 0.0) {
        const Estimate& bq = cell.stat("bias_qq");
        const Estimate& bp = cell.stat("bias_pl");
        const Estimate gap{std::abs(bp.value) - std::abs(bq.value), std::hypot(bq.mcse, bp.mcse),
                           std::nullopt};
        report.comparisons.push_back(
            compare_to_bounds("QQ |bias| at most PL |bias|" + tag, gap, 0.0, std::nullopt));
      }
      report.cells.push_back(std::move(cell));
    }
  }
  // Cells use independent streams, so their errors add in quadrature.
  const auto c = static_cast<double>(cells);
  report.summary.emplace_back("mean_efficiency",
                              Estimate{eff_sum / c, std::sqrt(eff_var) / c, 92.2});
  report.summary.emplace_back("mean_correlation",
                              Estimate{corr_sum / c, std::sqrt(corr_var) / c, 0.9957});
  report.notes.push_back("efficiency = 100 * (RMSE of PL / RMSE of max-QQr)^2");
  report.figures.push_back(std::move(e1));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
