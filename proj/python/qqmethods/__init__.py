"""QQ-plot estimation of location, scale and reference intervals.

Quick start::

    import qqmethods as qq
    s = qq.Sample([4.1, 5.0, 5.3, ...])
    fit = qq.fit_full(s)
    qq.reference_interval(fit).upper
"""

from ._core import (
    BoxCoxFit,
    CalibrationRangeError,
    ConfigError,
    DegenerateError,
    DomainError,
    FitKind,
    InsufficientDataError,
    NormalityTest,
    QQFit,
    ReferenceInterval,
    Sample,
    TFit,
    boxcox_transform,
    fit_boxcox,
    fit_censored,
    fit_full,
    fit_t,
    fit_winsorized,
    incomplete_beta,
    normal_scores,
    reference_interval,
    run_study,
    std_normal_cdf,
    std_normal_inv_cdf,
    student_t_cdf,
    student_t_inv_cdf,
    t_scores,
    test_normality,
    z_transform,
    z_transform_inverse,
)

__version__ = "0.1.0"
