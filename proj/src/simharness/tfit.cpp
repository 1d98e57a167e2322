#include <cmath>
#include <string>

#include "common.hpp"
#include "qq/probability.hpp"
#include "qq/qqfit.hpp"
#include "qq/shapefit.hpp"

namespace qq::sim {

StudyReport run_tfit_study(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;
  const double true_limit =
      config.t_mu + config.t_sigma * student_t_inv_cdf(0.975, static_cast<double>(config.t_nu));

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const std::size_t n = config.sample_sizes[ni];
    std::vector<double> nu(R), mu(R), upper(R), normal_upper(R), below(R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ni, r));
      std::vector<double> x(n);
      for (auto& v : x) v = config.t_mu + config.t_sigma * gen.student_t(config.t_nu);
      const Sample sample = Sample::complete(std::move(x));
      const TFit t = fit_t_nu(sample);
      nu[r] = t.nu_hat;
      mu[r] = t.mu_hat;
      upper[r] = t.upper_limit;
      const QQFit normal = fit_full(sample);
      normal_upper[r] = normal.intercept + 1.96 * normal.slope;
      below[r] = normal_upper[r] < true_limit ? 1.0 : 0.0;
    });

    auto over = [&](const std::vector<double>& v, auto f) {
      return detail::batch_estimate(R, B, [&](std::size_t lo, std::size_t hi) {
        return f(detail::slice(v, lo, hi));
      });
    };
    auto median = [](std::span<const double> s) {
      return detail::median(std::vector<double>(s.begin(), s.end()));
    };
    auto mean = [](std::span<const double> s) { return detail::mean(s); };

    Cell cell;
    cell.label = "n=" + std::to_string(n);
    cell.params = {{"n", static_cast<double>(n)},
                   {"mu", config.t_mu},
                   {"sigma", config.t_sigma},
                   {"nu", static_cast<double>(config.t_nu)},
                   {"true_upper_limit", true_limit}};
    const Estimate median_nu = over(nu, median);
    Estimate mean_mu = over(mu, mean);
    mean_mu.reference = config.t_mu;
    Estimate mean_upper = over(upper, mean);
    mean_upper.reference = true_limit;
    Estimate mean_normal = over(normal_upper, mean);
    mean_normal.reference = true_limit;
    const Estimate frac_below = detail::proportion(below);
    cell.add("median_nu_hat", median_nu);
    cell.add("mean_mu_hat", mean_mu);
    cell.add("mean_upper_limit", mean_upper);
    cell.add("mean_normal_upper_limit", mean_normal);
    cell.add("fraction_normal_limit_below_truth", frac_below);

    const std::string tag = " (n=" + std::to_string(n) + ")";
    report.comparisons.push_back(compare_to_bounds("median nu_hat" + tag, median_nu, 3.0, 9.0));
    report.comparisons.push_back(compare_to_target("mean mu_hat" + tag, mean_mu, config.t_mu, 0.2));
    report.comparisons.push_back(
        compare_to_target("mean t upper limit" + tag, mean_upper, true_limit, 0.8));
    report.comparisons.push_back(compare_to_bounds("normal limit below truth" + tag, frac_below,
                                                   0.8, std::nullopt));
    report.cells.push_back(std::move(cell));
  }
  report.notes.push_back("data: mu + sigma * t(nu); t fits over nu in [1, 200]");
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
