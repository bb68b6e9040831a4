import math

import numpy as np
import pytest

from fusionkit.core import median
from fusionkit.errors import DimensionError, DomainError
from fusionkit.characteristics import (
    MAD_SCALE, SpreadKind, SpreadSpec, andness, aveorness_mc, average_value, breakdown_probe, circ_mean,
    cumsum, diff_sorted, entropy, gen_spread_pair, lorenz_leq, nwd_normalizer, orness, owa_orness, relative,
    shape, spread, spread_leq,
)


def quadratic_mean(x):
    return math.sqrt(float(np.mean(x ** 2)))


def harmonic_mean(x):
    return x.size / float(np.sum(1.0 / x))


def geometric_mean(x):
    return float(np.prod(x)) ** (1.0 / x.size)


@pytest.mark.parametrize("x,expected", [
    ((0, 2, 4), 2 / 3),
    ((2, 4, 6), 1 / 3),
    ((0, 3, 5), 5 / 8),
])
def test_gini_coefficient(x, expected):
    assert relative("gini", x) == pytest.approx(expected)


def test_gini_mean_difference():
    assert spread("gini_md", (0, 2, 4)) == pytest.approx(8 / 3)
    assert spread("gini_md", (7,)) == 0.0


def test_relative_spread_needs_nonzero_mean():
    assert relative("cv", (1, 2, 3)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        relative("gini", (-1, 1))
    with pytest.raises(ValueError):
        relative("entropy", (1, 2))


def test_classical_spreads():
    assert spread("var", (1, 2, 3, 4)) == pytest.approx(5 / 3)
    assert spread("sd", (1, 2, 3, 4)) == pytest.approx(math.sqrt(5 / 3))
    assert spread("range", (4, -1, 2)) == 5.0
    assert spread("iqr", (1, 2, 3, 4, 5)) == pytest.approx(2.0)
    assert spread("mad", (1, 2, 3, 4, 100)) == pytest.approx(MAD_SCALE)
    assert spread("mean_error", (0, 2)) == pytest.approx(math.sqrt(math.pi / 2))
    with pytest.raises(DomainError):
        spread("var", (1,))


def test_weighted_spreads():
    spec = SpreadSpec(SpreadKind.WD1WAM, weights=(0.5, 0.5))
    assert spread(spec, (0, 2)) == pytest.approx(1.0)
    assert spread(SpreadSpec("wd2wam", weights=(0.5, 0.5)), (0, 2)) == pytest.approx(1.0)
    assert spread(SpreadSpec("wdinfwam", weights=(0.75, 0.25)), (0, 4)) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        SpreadSpec(SpreadKind.WD2WAM)
    with pytest.raises(DimensionError):
        spread(spec, (0, 1, 2))


def test_nwd_normalizer():
    p, subset, exact = nwd_normalizer((0.4, 0.35, 0.25))
    assert p == pytest.approx(0.4)
    assert subset == (0,)
    assert exact
    p, _, exact = nwd_normalizer(np.full(25, 1 / 25))
    assert not exact
    assert p == pytest.approx(12 / 25)


def test_normalized_spread_peaks_at_the_maximizing_indicator():
    w = (0.4, 0.35, 0.25)
    indicator = (1.0, 0.0, 0.0)
    for kind in ("nwd1wam", "nwd2wam"):
        spec = SpreadSpec(kind, weights=w)
        assert spread(spec, indicator) == pytest.approx(1.0)
        assert spread(spec, (0.3, 0.3, 0.3)) == pytest.approx(0.0)
        assert spread(spec, (0.2, 0.9, 0.5)) <= 1.0 + 1e-12
    with pytest.raises(DomainError):
        spread(SpreadSpec("nwd1wam", weights=w), (0.0, 2.0, 0.0))
    assert spread(SpreadSpec("nwd1wam", weights=w, bounds=(0, 2)), (2.0, 0.0, 0.0)) == pytest.approx(1.0)


def test_spread_order():
    assert spread_leq((1, 2, 3), (0, 2, 4))
    assert not spread_leq((0, 2, 4), (1, 2, 3))
    assert not spread_leq((1, 2, 3), (3, 2, 1))
    with pytest.raises(DimensionError):
        spread_leq((1, 2), (1, 2, 3))


@pytest.mark.parametrize("seed", range(10))
def test_generated_spread_pairs_are_ordered(seed):
    x, y = gen_spread_pair(6, seed)
    assert spread_leq(x, y)
    assert np.all((x >= 0) & (x <= 1)) and np.all((y >= 0) & (y <= 1))
    assert spread("range", x) <= spread("range", y) + 1e-12


def test_lorenz_order():
    assert lorenz_leq((2, 2, 2), (0, 2, 4))
    res = lorenz_leq((0, 2, 4), (2, 2, 2))
    assert not res and res.reason == "partial sums exceed"
    res = lorenz_leq((1, 1), (1, 2))
    assert not res and res.reason == "means differ"


def test_shape_measures():
    assert shape("skewness", (1, 2, 3)) == pytest.approx(0.0)
    assert shape("skewness", (0, 0, 0, 10)) > 0
    assert shape("kurtosis", (0, 1)) == pytest.approx(-2.0)
    with pytest.raises(DomainError):
        shape("kurtosis", (2, 2, 2))
    with pytest.raises(DomainError):
        shape("peakedness", (1, 2))


def test_average_value_of_quadratic_and_harmonic_means():
    est = average_value(quadratic_mean, 2, m=100000, seed=7)
    assert est.value == pytest.approx(0.5410751, abs=5 * est.stderr)
    assert est.samples == 100000
    est = average_value(harmonic_mean, 2, m=100000, seed=7)
    assert est.value == pytest.approx(4 / 3 * (1 - math.log(2)), abs=5 * est.stderr)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_orness_of_the_geometric_mean(n):
    exact = (n + 1) / (n - 1) * (n / (n + 1)) ** n - 1 / (n - 1)
    est = orness(geometric_mean, n, m=50000, seed=n)
    assert est.value == pytest.approx(exact, abs=max(5 * est.stderr, 1e-3))
    assert andness(est.value) == pytest.approx(1 - est.value)


def test_orness_of_extremes_and_determinism():
    assert orness(np.max, 3, m=20000, seed=1).value == pytest.approx(1.0, abs=0.02)
    assert orness(np.min, 3, m=20000, seed=1).value == pytest.approx(0.0, abs=0.02)
    assert orness(np.mean, 4, m=500, seed=2).value == orness(np.mean, 4, m=500, seed=2).value
    with pytest.raises(DomainError):
        orness(np.mean, 1, m=100)
    with pytest.raises(DomainError):
        average_value(np.mean, 2, m=1)


def test_orness_uses_configured_sample_count(monkeypatch):
    from fusionkit.fusion_config import get_fusion_config
    monkeypatch.setitem(get_fusion_config().get_monte_carlo_config(), "samples", 64)
    assert average_value(np.mean, 2, seed=0).samples == 64


def test_owa_orness():
    assert owa_orness((1, 0, 0)) == 0.0
    assert owa_orness((0, 0, 1)) == 1.0
    assert owa_orness((0.25, 0.25, 0.25, 0.25)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        owa_orness((1.0,))


def test_average_orness_of_the_arithmetic_mean():
    est = aveorness_mc(np.mean, 2, m=1000, seed=4)
    assert est.value == pytest.approx(0.5)
    assert est.stderr == pytest.approx(0.0, abs=1e-12)


def test_entropy():
    assert entropy((0.25,) * 4) == pytest.approx(math.log(4))
    assert entropy((1.0, 0.0)) == 0.0


def test_breakdown_of_mean_and_median():
    x = np.arange(11.0)
    assert breakdown_probe(np.mean, x) == pytest.approx(1 / 11)
    assert breakdown_probe(median, x) == pytest.approx(6 / 11)
    assert breakdown_probe(np.min, x) == 1.0


def test_breakdown_of_a_multivariate_location():
    X = np.vstack([np.arange(8.0), np.arange(8.0) ** 2])
    assert breakdown_probe(lambda D: D.mean(axis=-1), X, magnitude=1e8) == pytest.approx(1 / 8)
    with pytest.raises(DomainError):
        breakdown_probe(np.mean, [])


def test_circular_mean():
    assert circ_mean((0.1, -0.1)) == pytest.approx(0.0)
    assert abs(circ_mean((math.pi - 0.1, -math.pi + 0.1))) == pytest.approx(math.pi)
    assert circ_mean((0.0, math.pi / 2)) == pytest.approx(math.pi / 4)
    with pytest.raises(DomainError):
        circ_mean((0.0, math.pi))


def test_sorted_differences_and_cumulative_sums():
    assert diff_sorted((3, 1, 6)).tolist() == [2.0, 3.0]
    assert cumsum((3, 1, 6)).tolist() == [3.0, 4.0, 10.0]
