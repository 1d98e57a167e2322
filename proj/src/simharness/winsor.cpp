#include <cmath>
#include <string>

#include "common.hpp"
#include "qq/qqfit.hpp"

namespace qq::sim {

StudyReport run_winsor_study(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const std::size_t B = config.batches;
  const auto& ws = config.winsor_counts;
  const std::size_t W = ws.size();
  FigureTable d1{"D1", {"n", "w", "loss_mean", "loss_sd", "loss_limit"}, {}};

  // Losses per batch (index b) and for all replicates (index B), per cell.
  struct Losses {
    std::vector<double> mean, sd, limit;
  };
  std::vector<double> cell_w;
  std::vector<Losses> cell_losses;

  for (std::size_t ci = 0; ci < config.sample_sizes.size(); ++ci) {
    const std::size_t n = config.sample_sizes[ci];
    const auto nd = static_cast<double>(n);
    std::vector<double> m(W * R), s(W * R), L(W * R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ci, r));
      const Sample sample = Sample::complete(detail::sorted_normal(gen, n));
      for (std::size_t j = 0; j < W; ++j) {
        const QQFit fit = fit_winsorized(sample, ws[j]);
        m[j * R + r] = fit.intercept;
        s[j * R + r] = fit.slope;
        L[j * R + r] = fit.intercept + 1.96 * fit.slope;
      }
    });

    for (std::size_t j = 0; j < W; ++j) {
      auto var = [&](const std::vector<double>& v, std::size_t lo, std::size_t hi) {
        return detail::variance(detail::slice(v, j * R + lo, j * R + hi));
      };
      auto loss_mean = [&](std::size_t lo, std::size_t hi) { return nd - 1.0 / var(m, lo, hi); };
      auto loss_sd = [&](std::size_t lo, std::size_t hi) { return nd - 0.5 / var(s, lo, hi); };
      auto loss_limit = [&](std::size_t lo, std::size_t hi) {
        return nd - kUpperLimitSeFactor * kUpperLimitSeFactor / var(L, lo, hi);
      };
      Losses losses;
      for (std::size_t b = 0; b <= B; ++b) {
        const std::size_t lo = b < B ? b * R / B : 0;
        const std::size_t hi = b < B ? (b + 1) * R / B : R;
        losses.mean.push_back(loss_mean(lo, hi));
        losses.sd.push_back(loss_sd(lo, hi));
        losses.limit.push_back(loss_limit(lo, hi));
      }
      cell_w.push_back(static_cast<double>(ws[j]));
      cell_losses.push_back(losses);

      Cell cell;
      cell.label = "n=" + std::to_string(n) + ",w=" + std::to_string(ws[j]);
      cell.params = {{"n", nd}, {"w", static_cast<double>(ws[j])}};
      const Estimate em = detail::batch_estimate(R, B, loss_mean);
      const Estimate es = detail::batch_estimate(R, B, loss_sd);
      const Estimate el = detail::batch_estimate(R, B, loss_limit);
      cell.add("loss_mean", em);
      cell.add("loss_sd", es);
      cell.add("loss_limit", el);
      cell.add("n_eff_limit", {nd - el.value, el.mcse, std::nullopt});
      d1.rows.push_back({nd, static_cast<double>(ws[j]), em.value, es.value, el.value});
      report.cells.push_back(std::move(cell));
    }
  }

  // Pooled slope of loss on w; its spread over batches gives the MCSE.
  auto slope_of = [&](std::vector<double> Losses::*member, double model, const char* name,
                      double tolerance) {
    auto slope_at = [&](std::size_t b) {
      std::vector<double> y;
      for (const auto& l : cell_losses) y.push_back((l.*member)[b]);
      return detail::simple_slope(cell_w, y);
    };
    std::vector<double> per_batch;
    for (std::size_t b = 0; b < B; ++b) per_batch.push_back(slope_at(b));
    Estimate e{slope_at(B), std::sqrt(detail::variance(per_batch) / static_cast<double>(B)), model};
    report.summary.emplace_back(name, e);
    report.comparisons.push_back(compare_to_target(name, e, model, tolerance));
  };
  if (W >= 2) {
    slope_of(&Losses::mean, 0.0, "loss_slope_mean", 1.5);
    slope_of(&Losses::sd, 5.0, "loss_slope_sd", 1.5);
    slope_of(&Losses::limit, 3.5, "loss_slope_limit", 1.5);
  } else {
    report.notes.push_back("loss slopes need at least two winsor counts");
  }
  report.notes.push_back(
      "implied n_eff: mean 1/var(m), sd 1/(2 var(s)), limit 1.71^2/var(m + 1.96 s); loss = n - n_eff");
  report.figures.push_back(std::move(d1));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
