import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionkit.core import owa
from fusionkit.errors import DimensionError, DomainError
from fusionkit.integrals import (
    LatticePolySpec, MonotoneMeasure, choquet, owmax, owmax_measure, owmin, shilkret, sugeno,
    sugeno_bruteforce, wlpf, wmax, wmin,
)

nonneg = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)


def random_table(n, seed):
    """Monotone table built as a sum of random unanimity-like increments"""
    rng = np.random.default_rng(seed)
    table = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        sub = max(table[mask & ~(1 << i)] for i in range(n) if mask >> i & 1)
        table[mask] = sub + rng.uniform(0.0, 1.0)
    return table


def test_measure_validation():
    with pytest.raises(DomainError):
        MonotoneMeasure.from_table(2, [0.0, 0.5, 0.3, 0.2])
    with pytest.raises(DomainError):
        MonotoneMeasure.from_table(1, [0.1, 1.0])
    with pytest.raises(DimensionError):
        MonotoneMeasure.from_table(2, [0.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        MonotoneMeasure.symmetric([0.0, 2.0, 1.0])
    with pytest.raises(DomainError):
        MonotoneMeasure.from_table(2, {"1": 0.5, "3": 1.0})


def test_measure_accepts_infinite_values():
    mu = MonotoneMeasure.from_table(2, [0.0, 1.0, 2.0, math.inf])
    assert mu.total() == math.inf
    assert choquet(mu, [0.0, 3.0]) == pytest.approx(6.0)


def test_counting_measure_choquet_is_the_sum():
    mu = MonotoneMeasure.counting(4)
    assert choquet(mu, [1, 2, 3, 4]) == pytest.approx(10.0)
    assert mu.of_set([0, 2]) == 2.0


def test_additive_measure_choquet_is_weighted_mean():
    w = [0.1, 0.2, 0.3, 0.4]
    mu = MonotoneMeasure.additive(w)
    x = [4.0, 1.0, 3.0, 2.0]
    assert choquet(mu, x) == pytest.approx(float(np.dot(w, x)))


def test_symmetric_measure_choquet_is_owa():
    mu = MonotoneMeasure.symmetric([0.0, 0.1, 0.5, 1.0])
    x = [0.7, 0.2, 0.9]
    assert choquet(mu, x) == pytest.approx(owa(mu.owa_weights(), x))
    assert mu.owa_weights().tolist() == pytest.approx([0.5, 0.4, 0.1])
    with pytest.raises(DomainError):
        MonotoneMeasure.additive([0.5, 0.5]).owa_weights()


def test_sugeno_and_shilkret_small_example():
    mu = MonotoneMeasure.from_table(2, [0.0, 0.3, 0.6, 1.0])
    x = [0.8, 0.4]
    # upper sets: {0,1} at 0.4, {0} at 0.8
    assert sugeno(mu, x) == pytest.approx(0.4)
    assert shilkret(mu, x) == pytest.approx(0.4)
    assert choquet(mu, x) == pytest.approx(0.4 + 0.4 * 0.3)


@pytest.mark.parametrize("seed", range(5))
def test_sugeno_matches_subset_enumeration(seed):
    n = 4
    mu = MonotoneMeasure.from_table(n, random_table(n, seed))
    x = np.random.default_rng(100 + seed).uniform(0, 3, size=n)
    assert sugeno(mu, x) == pytest.approx(sugeno_bruteforce(mu, x))


@given(st.lists(nonneg, min_size=3, max_size=3), st.lists(nonneg, min_size=3, max_size=3))
def test_choquet_is_monotone(x, y):
    mu = MonotoneMeasure.from_table(3, random_table(3, 7))
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    assert choquet(mu, lo) <= choquet(mu, hi) + 1e-9


def test_integrals_reject_bad_input():
    mu = MonotoneMeasure.counting(2)
    with pytest.raises(DimensionError):
        choquet(mu, [1, 2, 3])
    with pytest.raises(DomainError):
        sugeno(mu, [-1, 2])


def test_json_round_trip_keeps_infinity():
    mu = MonotoneMeasure.from_table(2, [0.0, 1.0, 2.0, math.inf])
    again = MonotoneMeasure.from_json(mu.to_json())
    assert again.to_table().tolist() == mu.to_table().tolist()
    with pytest.raises(DomainError):
        MonotoneMeasure.from_json('{"0": 0, "1": 1, "2": 1}')


def test_wlpf():
    spec = LatticePolySpec(((0,), (1, 2)), (0.3, 0.9))
    assert wlpf(spec, [0.8, 0.6, 0.7]) == pytest.approx(0.6)
    assert wlpf(spec, [0.8, 0.1, 0.7]) == pytest.approx(0.3)
    with pytest.raises(DimensionError):
        wlpf(spec, [0.5, 0.5])
    with pytest.raises(DomainError):
        LatticePolySpec(((),), (1.0,))


def test_weighted_max_and_min():
    v = [1.0, 0.5, 0.2]
    x = [0.3, 0.9, 0.8]
    assert wmax(v, x) == pytest.approx(0.5)
    assert wmin(v, x) == pytest.approx(0.3)
    assert wmin(v, x, b=1.0) == pytest.approx(0.3)


def test_ordered_weighted_max_is_sugeno_of_its_measure():
    v = [0.9, 0.6, 0.2]
    x = [0.5, 0.1, 0.8]
    assert owmax(v, x) == pytest.approx(sugeno(owmax_measure(v), x))
    with pytest.raises(DomainError):
        owmax([0.1, 0.5], [1, 1])
    with pytest.raises(DomainError):
        owmin([0.5, 0.1], [1, 1])


@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=6))
def test_owmax_equals_sugeno_everywhere(x):
    v = sorted(np.linspace(0.1, 1.0, len(x)), reverse=True)
    assert owmax(v, x) == pytest.approx(sugeno(owmax_measure(v), x))
