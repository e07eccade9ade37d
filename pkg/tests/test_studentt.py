import numpy as np
import pytest
from scipy import stats

from tarpreg import ParameterError, t_cdf, t_interval_halfwidth, t_pdf, t_ppf


def test_cauchy_quartile_is_one():
    # df = 1 is Cauchy: the 50% central interval has half-width exactly 1
    assert t_interval_halfwidth(0.5, 1.0) == pytest.approx(1.0, abs=1e-10)


def test_roundtrip_inverse_of_cdf():
    for df in (1.0, 1.04, 2.0, 4.7, 30.0, 250.0):
        p = np.linspace(0.001, 0.999, 97)
        back = t_cdf(t_ppf(p, df), df)
        assert np.abs(back - p).max() < 1e-10


def test_matches_reference_quantiles():
    for df in (1.0, 3.3, 11.0, 100.0):
        p = np.array([0.01, 0.25, 0.6, 0.75, 0.95, 0.999])
        assert t_ppf(p, df) == pytest.approx(stats.t.ppf(p, df), rel=1e-9, abs=1e-9)


def test_cdf_matches_reference():
    x = np.array([-8.0, -1.3, 0.0, 0.2, 2.5, 40.0])
    for df in (1.0, 2.5, 60.0):
        assert t_cdf(x, df) == pytest.approx(stats.t.cdf(x, df), abs=1e-12)


def test_pdf_consistent_with_cdf():
    x = np.linspace(-60, 60, 200_001)
    val = np.trapezoid(t_pdf(x, 2.3), x)
    assert val == pytest.approx(t_cdf(60.0, 2.3) - t_cdf(-60.0, 2.3), abs=1e-8)


def test_quantile_monotone_in_level():
    halves = [t_interval_halfwidth(l, 5.0) for l in (0.1, 0.5, 0.8, 0.99)]
    assert all(np.diff(halves) > 0)


def test_symmetry():
    assert t_ppf(0.2, 7.0) == pytest.approx(-t_ppf(0.8, 7.0), abs=1e-12)
    assert t_ppf(0.5, 7.0) == 0.0


def test_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        t_ppf(0.0, 5.0)
    with pytest.raises(ParameterError):
        t_ppf(0.5, -1.0)
    with pytest.raises(ParameterError):
        t_interval_halfwidth(1.0, 5.0)
