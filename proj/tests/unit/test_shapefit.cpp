#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qq/errors.hpp"
#include "qq/probability.hpp"
#include "qq/rng.hpp"
#include "qq/scores.hpp"
#include "qq/shapefit.hpp"

using namespace qq;

namespace {

std::vector<double> lognormal(std::uint64_t seed, std::size_t n) {
  auto v = rng_standard_normal(RngStream{.seed = seed}, n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

}  // namespace

TEST_SUITE("shapefit") {
  TEST_CASE("Box-Cox transform special cases") {
    const std::vector<double> x{0.5, 1.0, 2.0, 7.25};
    const auto one = boxcox_transform(x, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(one[i] == x[i] - 1.0);
    CHECK(boxcox_transform(std::vector<double>{std::exp(1.0)}, 0.0)[0] ==
          doctest::Approx(1.0).epsilon(1e-15));
    for (double lam : {1e-9, -1e-9}) {
      CHECK(std::fabs(boxcox_transform(std::vector<double>{2.0}, lam)[0] - std::log(2.0)) < 1e-8);
    }
    const auto sq = boxcox_transform(x, 2.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(sq[i] == doctest::Approx((x[i] * x[i] - 1.0) / 2.0).epsilon(1e-14));
    }
  }

  TEST_CASE("Box-Cox transform reports the offending index") {
    try {
      boxcox_transform(std::vector<double>{1.0, 2.0, -3.0, 0.0}, 0.5);
      FAIL("expected an exception");
    } catch (const ValueDomainError& e) {
      CHECK(e.index() == 2);
    }
  }

  TEST_CASE("max-QQr on lognormal data lands near zero") {
    const auto x = lognormal(11, 120);
    const BoxCoxFit f = fit_boxcox_qqr(Sample::complete(x));
    CHECK(std::fabs(f.lambda_hat) < 0.315);
    CHECK(f.method == BoxCoxMethod::max_qqr);
    for (const auto& pt : f.search_trace) CHECK(f.qqr_at_opt >= pt.objective - 1e-12);
    CHECK(f.lambda_hat >= -3.0);
    CHECK(f.lambda_hat <= 3.0);
  }

  TEST_CASE("pseudolikelihood maximizer") {
    const auto x = lognormal(12, 150);
    const BoxCoxFit f = fit_boxcox_pl(Sample::complete(x));
    for (const auto& pt : f.search_trace) CHECK(f.objective_at_opt >= pt.objective - 1e-9);
    CHECK(f.objective_at_opt ==
          doctest::Approx(boxcox_profile_loglik(x, f.lambda_hat)).epsilon(1e-12));
    // Brute-force check on a fine grid.
    double best = -INFINITY, arg = 0.0;
    for (double lam = -3.0; lam <= 3.0; lam += 0.001) {
      const double v = boxcox_profile_loglik(x, lam);
      if (v > best) {
        best = v;
        arg = lam;
      }
    }
    CHECK(std::fabs(f.lambda_hat - arg) < 2e-3);
  }

  TEST_CASE("both Box-Cox methods agree on clean lognormal samples") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Sample s = Sample::complete(lognormal(100 + seed, 240));
      const double qq = fit_boxcox_qqr(s).lambda_hat;
      const double pl = fit_boxcox_pl(s).lambda_hat;
      CHECK(std::fabs(qq - pl) <= 0.5);
    }
  }

  TEST_CASE("log objective is scale invariant") {
    const auto x = lognormal(13, 120);
    std::vector<double> cx;
    for (double v : x) cx.push_back(v * 37.5);
    const auto z = hazen_scores(120);
    auto sorted = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    const double r1 = qq_regression(boxcox_transform(sorted(x), 0.0), z.values()).r;
    const double r2 = qq_regression(boxcox_transform(sorted(cx), 0.0), z.values()).r;
    CHECK(std::fabs(r1 - r2) < 1e-12);
  }

  TEST_CASE("refining the grid never lowers the optimum") {
    const Sample s = Sample::complete(lognormal(14, 120));
    BoxCoxOptions coarse;
    BoxCoxOptions fine;
    fine.grid_step = 0.125;
    CHECK(fit_boxcox_qqr(s, fine).qqr_at_opt >= fit_boxcox_qqr(s, coarse).qqr_at_opt - 1e-9);
  }

  TEST_CASE("censored and winsorized objectives") {
    auto x = lognormal(15, 120);
    std::sort(x.begin(), x.end());
    const Sample cens = Sample::left_censored({x.begin() + 30, x.end()}, 30, x[29]);
    const BoxCoxFit fc = fit_boxcox_qqr(cens);
    CHECK(fc.fit_at_opt.kind == FitKind::censored);
    CHECK(std::fabs(fc.lambda_hat) < 1.0);
    BoxCoxOptions w;
    w.winsor = 3;
    const BoxCoxFit fw = fit_boxcox_qqr(Sample::complete(x), w);
    CHECK(fw.fit_at_opt.kind == FitKind::winsorized);
    CHECK(fw.fit_at_opt.w_winsorized == 3);
    CHECK_THROWS_AS(fit_boxcox_pl(cens), DomainError);
  }

  TEST_CASE("Box-Cox errors") {
    std::vector<double> x = lognormal(16, 20);
    x[7] = -1.0;
    CHECK_THROWS_AS(fit_boxcox_qqr(Sample::complete(x)), ValueDomainError);
    CHECK_THROWS_AS(fit_boxcox_qqr(Sample::complete(lognormal(1, 9))), InsufficientDataError);
  }

  TEST_CASE("t fit on normal data goes to the top of the range") {
    const auto y = rng_standard_normal(RngStream{.seed = 31}, 120);
    const TFit f = fit_t_nu(Sample::complete(y));
    CHECK(f.nu_hat > 30.0);
    for (const auto& pt : f.search_trace) CHECK(f.qqr_at_opt >= pt.objective - 1e-12);
  }

  TEST_CASE("t fit on heavy-tailed data") {
    Generator gen(RngStream{.seed = 1093});
    std::vector<double> y(120);
    for (auto& v : y) v = 20.0 + 4.0 * gen.student_t(5);
    const TFit f = fit_t_nu(Sample::complete(y));
    CHECK(f.nu_hat < 30.0);
    CHECK(f.upper_limit ==
          doctest::Approx(f.mu_hat + f.sigma_hat * student_t_inv_cdf(0.975, f.nu_hat)));

    // Affine equivariance.
    std::vector<double> z;
    for (double v : y) z.push_back(2.5 * v + 7.0);
    const TFit g = fit_t_nu(Sample::complete(z));
    CHECK(g.nu_hat == doctest::Approx(f.nu_hat).epsilon(1e-9));
    CHECK(g.mu_hat == doctest::Approx(2.5 * f.mu_hat + 7.0).epsilon(1e-10));
    CHECK(g.sigma_hat == doctest::Approx(2.5 * f.sigma_hat).epsilon(1e-10));
    REQUIRE(g.search_trace.size() == f.search_trace.size());
    for (std::size_t i = 0; i < f.search_trace.size(); ++i) {
      CHECK(std::fabs(g.search_trace[i].objective - f.search_trace[i].objective) < 1e-12);
    }

    TFitOptions ints;
    ints.integer_only = true;
    const TFit h = fit_t_nu(Sample::complete(y), ints);
    CHECK(h.nu_hat == std::round(h.nu_hat));
    CHECK(h.search_trace.size() == 200);
  }

  TEST_CASE("t fit errors") {
    CHECK_THROWS_AS(fit_t_nu(Sample::left_censored({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 2)),
                    DomainError);
    CHECK_THROWS_AS(fit_t_nu(Sample::complete({1, 2, 3, 4, 5})), InsufficientDataError);
  }
}

TEST_SUITE("line_search") {
  TEST_CASE("golden refinement finds an interior maximum") {
    const std::vector<double> grid{-2, -1, 0, 1, 2};
    SearchOptions o;
    o.tolerance = 1e-6;
    const auto r = grid_golden_maximize(grid, [](double x) { return -(x - 0.3141) * (x - 0.3141); }, o);
    CHECK(r.argmax == doctest::Approx(0.3141).epsilon(1e-5));
    CHECK(r.trace.size() > grid.size());
  }

  TEST_CASE("ties prefer the preferred point") {
    const std::vector<double> grid{-1, 0, 1, 2};
    SearchOptions o;
    o.tolerance = 0.0;
    o.preferred = 1.0;
    const auto r = grid_golden_maximize(grid, [](double) { return 0.5; }, o);
    CHECK(r.flat);
    CHECK(r.argmax == 1.0);
    o.preferred = INFINITY;
    const auto s = grid_golden_maximize(grid, [](double x) { return x < 0 ? 0.0 : 1.0; }, o);
    CHECK(s.argmax == 2.0);
  }
}
