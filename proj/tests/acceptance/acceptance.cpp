// Runs each acceptance criterion at its stated scale and tolerance and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.
//
//   qq_acceptance            all criteria
//   qq_acceptance 3 5        selected criteria

#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qq/normtest.hpp"
#include "qq/probability.hpp"
#include "qq/simharness.hpp"

using namespace qq;
using namespace qq::sim;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void table_b1(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::slope_efficiency);
  c.replicates = 10000;
  c.sample_sizes = {120};
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_slope_efficiency(c);
  const double elapsed = seconds_since(t0);
  const Cell& cell = r.cells.front();
  const double mean = cell.stat("mean_slope").value;
  const double sd = cell.stat("sd_slope").value;
  const double eff = cell.stat("efficiency").value;
  o.check(within(mean, 0.9909, 0.9969), "slope mean " + num(mean) + " in [0.9909, 0.9969]");
  o.check(within(sd, 0.0625, 0.0665), "slope sd " + num(sd) + " in [0.0625, 0.0665]");
  o.check(within(eff, 99.1, 100.1), "efficiency " + num(eff, 2) + " in [99.1, 100.1]");
  o.check(elapsed < 120.0, "runtime " + num(elapsed, 1) + "s < 120s");
}

void score_profile(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::score_profile);
  c.replicates = 5000;
  c.sample_sizes = {120};
  const auto r = run_score_profile(c);
  const double arg = r.summary_stat("argmax_alpha").value;
  const double e05 = r.summary_stat("efficiency_at_0.5").value;
  const double e0 = r.summary_stat("efficiency_at_0").value;
  o.check(within(arg, 0.40, 0.55), "argmax " + num(arg, 2) + " in [0.40, 0.55]");
  o.check(e05 >= 0.995, "efficiency(0.5) " + num(e05) + " >= 0.995 of max");
  o.check(e0 <= 0.98, "efficiency(0) " + num(e0) + " <= 0.98 of max");
}

void censoring_models(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::censoring);
  c.replicates = 10000;
  c.sample_sizes = {120};
  c.censor_fractions = {0.1, 0.3, 0.5};
  const auto r = run_censoring_study(c);
  for (const Cell& cell : r.cells) {
    const double f = 1.0 - cell.param("censored_fraction");
    for (const char* which : {"efficiency_mean", "efficiency_sd", "efficiency_limit"}) {
      const Estimate& e = cell.stat(which);
      o.check(std::abs(e.value - *e.reference) <= 0.05,
              std::string(which + 11) + "(f=" + num(f, 1) + ") " + num(e.value, 3) + " vs " +
                  num(*e.reference, 3));
    }
  }
}

void winsor_losses(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::winsor);
  c.replicates = 20000;
  c.sample_sizes = {120};
  c.winsor_counts = {1, 2, 3, 4, 5};
  const auto r = run_winsor_study(c);
  const double lim = r.summary_stat("loss_slope_limit").value;
  const double sd = r.summary_stat("loss_slope_sd").value;
  const double mean = r.summary_stat("loss_slope_mean").value;
  o.check(within(lim, 2.0, 5.0), "limit-loss slope " + num(lim, 2) + " in [2, 5]");
  o.check(within(sd, 3.5, 6.5), "sd-loss slope " + num(sd, 2) + " in [3.5, 6.5]");
  o.check(std::abs(mean) <= 1.5, "mean-loss slope " + num(mean, 2) + " within 1.5 of 0");
}

void boxcox_efficiency(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::boxcox);
  c.replicates = 2000;
  c.sample_sizes = {120};
  c.lambdas = {-1.0, 0.0, 1.0};
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_boxcox_study(c);
  const double elapsed = seconds_since(t0);
  const double targets[] = {92.6, 94.4, 91.8};
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const Cell& cell = r.cells[i];
    const std::string l = num(cell.param("lambda"), 0);
    const double eff = cell.stat("efficiency").value;
    const double corr = cell.stat("correlation").value;
    o.check(std::abs(eff - targets[i]) <= 4.0,
            "efficiency(" + l + ") " + num(eff, 1) + " vs " + num(targets[i], 1));
    o.check(corr >= 0.98, "correlation(" + l + ") " + num(corr) + " >= 0.98");
  }
  o.check(elapsed < 600.0, "runtime " + num(elapsed, 1) + "s < 600s");
}

void test_size(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::calibration);
  c.replicates = 10000;
  c.sample_sizes = {60, 120, 480};
  c.variants = {"full", "winsorized"};
  const auto r = run_calibration(c);
  for (const Cell& cell : r.cells) {
    const double size = cell.stat("size").value;
    o.check(within(size, 0.035, 0.065), cell.label + " size " + num(size));
  }
}

void censored_test_size(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::calibration);
  c.replicates = 10000;
  c.sample_sizes = {120};
  c.variants = {"censored-original"};
  c.censored_extension = true;
  c.censor_fractions = {0.1, 0.3, 0.5};
  const auto r = run_calibration(c);
  for (const Cell& cell : r.cells) {
    const double size = cell.stat("size").value;
    o.check(within(size, 0.03, 0.07), cell.label + " size " + num(size));
  }
}

void power_curve(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::power);
  c.replicates = 5000;
  c.sample_sizes = {120};
  const auto r = run_power_study(c);
  double previous = -1.0;
  bool monotone = true;
  std::string curve;
  for (const Cell& cell : r.cells) {
    const double p = cell.stat("power").value;
    if (p < previous) monotone = false;
    previous = p;
    curve += (curve.empty() ? "" : " ") + num(p, 3);
  }
  const double size = r.cells.front().stat("power").value;
  o.check(monotone, "power nondecreasing [" + curve + "]");
  o.check(within(size, 0.035, 0.065), "size at shift 1 " + num(size));
}

void t_fit(Outcome& o) {
  auto c = StudyConfig::defaults(StudyId::tfit);
  c.replicates = 500;
  c.sample_sizes = {120};
  const auto r = run_tfit_study(c);
  const Cell& cell = r.cells.front();
  const double nu = cell.stat("median_nu_hat").value;
  const double mu = cell.stat("mean_mu_hat").value;
  const double upper = cell.stat("mean_upper_limit").value;
  const double below = cell.stat("fraction_normal_limit_below_truth").value;
  o.check(within(nu, 3.0, 9.0), "median nu " + num(nu, 2) + " in [3, 9]");
  o.check(within(mu, 19.8, 20.2), "mean mu " + num(mu, 3) + " in [19.8, 20.2]");
  o.check(std::abs(upper - 30.28) <= 0.8, "mean upper limit " + num(upper, 3) + " within 0.8 of 30.28");
  o.check(below >= 0.8, "normal limit below 30.28 on " + num(100.0 * below, 1) + "% >= 80%");
}

void kernel_accuracy(Outcome& o) {
  double worst = 0.0;
  const int count = 10000;
  // Log-spaced over [1e-300, 0.5], each p checked along with 1 - p.
  for (int i = 0; i < count; ++i) {
    const double p = std::pow(10.0, -300.0 + (300.0 + std::log10(0.5)) * i / (count - 1));
    for (double q : {p, 1.0 - p}) {
      if (!(q > 0.0 && q < 1.0)) continue;
      worst = std::max(worst, std::abs(std_normal_cdf(std_normal_inv_cdf(q)) - q));
    }
  }
  o.check(worst <= 1e-10, "max |Phi(Phi^-1(p)) - p| = " + [&] {
    std::ostringstream s;
    s << worst;
    return s.str();
  }());
  const double t = student_t_inv_cdf(0.975, 5.0);
  const double oracle = boost::math::quantile(boost::math::students_t(5.0), 0.975);
  o.check(std::abs(t - 2.5706) <= 1e-4, "t(0.975, 5) = " + num(t, 6));
  o.check(std::abs(t - oracle) <= 1e-10, "independent quantile " + num(oracle, 10));
  // Back through the incomplete beta: P(T <= t) = 1 - I_{nu/(nu+t^2)}(nu/2, 1/2) / 2.
  const double back = 1.0 - 0.5 * incomplete_beta(2.5, 0.5, 5.0 / (5.0 + t * t));
  o.check(std::abs(back - 0.975) <= 1e-10, "incomplete-beta cdf " + num(back, 12));
}

void standardization_constants(Outcome& o) {
  const auto& c = builtin_calibration(TestVariant::full);
  const double m = c.mean_model(120, 0.0);
  const double s = c.sd_model(120, 0.0);
  o.check(std::abs(m - (-7.037)) <= 0.001, "mean " + num(m));
  o.check(std::abs(s - 0.800) <= 0.001, "sd " + num(s));
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "slope vs sample sd, n=120", table_b1},
      {2, "plotting-position profile", score_profile},
      {3, "censoring efficiency models", censoring_models},
      {4, "winsorizing sample-size loss", winsor_losses},
      {5, "Box-Cox QQ vs PL efficiency", boxcox_efficiency},
      {6, "normality test size", test_size},
      {7, "censored test size", censored_test_size},
      {8, "power curve", power_curve},
      {9, "t-model reference limit", t_fit},
      {10, "kernel accuracy", kernel_accuracy},
      {11, "standardization constants", standardization_constants},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s[%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures;
}
