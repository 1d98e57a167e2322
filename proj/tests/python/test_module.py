import math
import random

import pytest

import qqmethods as qq


def normal_sample(n, seed=1, mu=0.0, sigma=1.0):
    rng = random.Random(seed)
    return [rng.gauss(mu, sigma) for _ in range(n)]


def test_kernel_values():
    assert qq.std_normal_inv_cdf(0.975) == pytest.approx(1.9599639845400542, abs=1e-14)
    assert qq.std_normal_cdf(1.959964) == pytest.approx(0.9750000009035576, abs=1e-15)
    assert qq.student_t_inv_cdf(0.975, 5) == pytest.approx(2.5705818356363155, abs=1e-12)
    assert qq.student_t_cdf(qq.student_t_inv_cdf(0.3, 3.7), 3.7) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ValueError):
        qq.std_normal_inv_cdf(1.0)


def test_scores_are_symmetric():
    s = qq.normal_scores(7)
    assert s[3] == 0.0
    assert s[0] == -s[6]
    assert qq.normal_scores(4, alpha=0.375)[0] == pytest.approx(qq.std_normal_inv_cdf(0.625 / 4.25))
    assert len(qq.t_scores(10, 5.0)) == 10


def test_fit_and_interval():
    x = normal_sample(120, mu=50, sigma=5)
    fit = qq.fit_full(qq.Sample(x))
    assert fit.kind == qq.FitKind.full
    assert abs(fit.m - 50) < 2.5 and 3.5 < fit.s < 6.5
    ri = qq.reference_interval(fit)
    assert ri.upper == pytest.approx(fit.m + 1.959963984540054 * fit.s)
    assert qq.reference_interval(fit, z=1.96).z == 1.96
    assert qq.fit_winsorized(qq.Sample(x), 2).n_eff_limit == pytest.approx(113.0)


def test_censored_fit():
    x = sorted(normal_sample(120, seed=2))
    s = qq.Sample(x[18:], censored=18, detection_limit=x[18])
    assert s.n_total == 120 and s.censored_fraction == pytest.approx(0.15)
    fit = qq.fit_censored(s)
    assert fit.k_censored == 18
    assert fit.n_eff_limit == pytest.approx(120 * 0.88083, rel=1e-4)


def test_boxcox_and_tfit():
    x = [math.exp(v) for v in normal_sample(120, seed=3, sigma=0.5)]
    bc = qq.fit_boxcox(qq.Sample(x))
    assert -0.6 < bc.lambda_hat < 0.6
    assert bc.qqr_at_opt >= max(o for _, o in bc.search_trace) - 1e-15
    pl = qq.fit_boxcox(qq.Sample(x), method="pl")
    assert abs(pl.lambda_hat - bc.lambda_hat) < 0.5
    with pytest.raises(ValueError):
        qq.fit_boxcox(qq.Sample([1.0, -1.0] + x[:10]))
    t = qq.fit_t(qq.Sample(normal_sample(120, seed=4, mu=20, sigma=4)), integer_nu=True)
    assert t.nu_hat == int(t.nu_hat)


def test_normality_test():
    t = qq.test_normality(qq.Sample(normal_sample(120, seed=5)))
    assert 0.0 <= t.p <= 1.0 and t.variant == "full"
    x = [math.exp(v) for v in normal_sample(120, seed=6)]
    assert qq.test_normality(qq.Sample(x)).reject
    assert qq.z_transform_inverse(qq.z_transform(0.99)) == pytest.approx(0.99, abs=1e-12)
    s = qq.Sample(sorted(normal_sample(120, seed=7))[72:], censored=72)
    with pytest.raises(qq.CalibrationRangeError):
        qq.test_normality(s, "censored-original")


def test_run_study():
    r = qq.run_study({"study": "B-efficiency", "replicates": 200, "sample_sizes": [30], "seed": 5})
    assert r["config"]["seed"]["seed"] == 5
    assert r["cells"][0]["stats"]["efficiency"]["reference"] == 99.86
    again = qq.run_study({"study": "B-efficiency", "replicates": 200, "sample_sizes": [30], "seed": 5})
    assert again["cells"] == r["cells"]
    with pytest.raises(qq.ConfigError):
        qq.run_study({"study": "B-efficiency", "replicates": 5})
