import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionkit.errors import DomainError, InputFormatError
from fusionkit.informetric import (
    ImpactSpec, SortedVarVector, Variant, dpr2_centroid, dpr2_centroid_candidates, dpr2_penalty, dpr_dist,
    g_index, gamma_leq, h2_index, h_index, impact_index, m1_median, maxprod_index, read_producers,
    universal_impact, w_index,
)

records = st.lists(st.integers(min_value=0, max_value=60), min_size=1, max_size=15).map(
    lambda v: sorted(v, reverse=True))

PRODUCERS = [(42, 31, 12, 10, 8), (1, 0, -10), (0, -1), (-10, -13)]
NEGATIVE_PRODUCERS = [(-10, -12, -14, -16, -17), (1, 0, -10), (-10, -15, -16), (-20,)]

Y_RECORD = (60, 30, 10, 4)
Z_RECORD = (15, 13, 11, 11, 9, 8, 7, 7, 6, 5, 3, 3, 2, 1, 1, 1, 1)


def test_sorted_var_vector():
    assert SortedVarVector.of([1, 3, 2]).values == (3.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        SortedVarVector((1.0, 2.0))
    with pytest.raises(DomainError):
        SortedVarVector(())
    with pytest.raises(DomainError):
        SortedVarVector.of([math.nan])
    assert SortedVarVector((2.0, 1.0)).padded(4).tolist() == [2.0, 1.0, 0.0, 0.0]


def test_dpr_distances():
    assert dpr_dist("M1", 1, 1, (3, 1), (2,)) == pytest.approx(3.0)
    assert dpr_dist(Variant.M2, 1, 1, (3, 1), (2,)) == pytest.approx(math.sqrt(2) + 1)
    assert dpr_dist("M1", 2, 2, (1,), (1, 0, 0)) == pytest.approx(16.0)
    with pytest.raises(DomainError):
        dpr_dist("M1", 0, 1, (1,), (1,))


def test_centroid_candidates_table():
    candidates = dpr2_centroid_candidates(PRODUCERS, 1, 1)
    penalties = [p for p, _ in candidates]
    assert penalties == pytest.approx([3139.75, 3063.50, 3062.50, 3047.50, 3034.1667], abs=1e-3)
    assert candidates[0][1].tolist() == pytest.approx([8.25])
    assert candidates[2][1].tolist() == pytest.approx([8.25, 4.25, 0.5])
    assert candidates[3][1].tolist() == pytest.approx([8.25, 4.25, 1.5, 1.5])


def test_centroid_with_pooled_components():
    y = dpr2_centroid(PRODUCERS, 1, 1)
    assert list(y.values) == pytest.approx([8.25, 4.25, 5 / 3, 5 / 3, 5 / 3])


def test_centroid_of_negative_records():
    candidates = dpr2_centroid_candidates(NEGATIVE_PRODUCERS, 1, 1)
    assert [p for p, _ in candidates] == pytest.approx([1694.75, 1528.50, 1126.50, 1142.75, 1108.95], abs=1e-6)
    assert candidates[1][1].tolist() == pytest.approx([-8.25, -8.25])
    assert candidates[3][1].tolist() == pytest.approx([-7.625] * 4)
    assert list(dpr2_centroid(NEGATIVE_PRODUCERS, 1, 1).values) == pytest.approx([-6.95] * 5)


def test_centroid_penalty_is_consistent():
    for penalty, y in dpr2_centroid_candidates(PRODUCERS, 1, 1):
        assert dpr2_penalty(PRODUCERS, y, 1, 1) == pytest.approx(penalty)


def test_centroid_ties_pick_the_shortest():
    # identical records padded with zeros give equal penalties for both lengths
    y = dpr2_centroid([(2.0, 0.0), (2.0,)], 1, 1)
    assert len(y) == 1


def test_m1_median():
    y = m1_median([(5, 3), (4,), (6, 2, 1)], 1, 1)
    assert y.values == (5.0, 2.0)
    with pytest.raises(DomainError):
        m1_median([(1, -1)], 1, 1)


def test_gamma_order():
    assert gamma_leq((3, 2), (4, 2, 1))
    assert not gamma_leq((5,), (4, 4))
    assert not gamma_leq((1, 1, 1), (5, 5))


@given(records, st.integers(min_value=0, max_value=5), st.integers(min_value=0, max_value=5))
def test_indices_are_gamma_monotone(x, bump, extra):
    y = sorted([v + bump for v in x] + [0] * extra, reverse=True)
    assert gamma_leq(x, y)
    for kind in ("sum", "h", "g", "w", "h2", "maxprod"):
        assert impact_index(kind, x) <= impact_index(kind, y)


@given(records, st.integers(min_value=1, max_value=10))
def test_indices_ignore_trailing_zeros(x, zeros):
    padded = x + [0] * zeros
    for kind in ("sum", "h", "g", "w", "h2", "maxprod"):
        assert impact_index(kind, x) == impact_index(kind, padded)


def test_index_examples():
    assert h_index(Y_RECORD) == 4
    assert g_index(Y_RECORD) == 10
    assert w_index((2, 2, 2)) == 2
    assert w_index((3, 2, 1)) == 3
    assert h2_index((9, 4, 4)) == 2
    assert maxprod_index((5, 4, 4)) == 12.0
    assert impact_index("sum", Y_RECORD) == 104.0
    with pytest.raises(DomainError):
        h_index((3, -1))
    with pytest.raises(ValueError):
        impact_index("i10", Y_RECORD)


@pytest.mark.parametrize("n", [1, 2, 7])
def test_indices_of_square_records(n):
    x = [n] * n
    assert h_index(x) == n
    assert maxprod_index(x) == n * n


@pytest.mark.parametrize("record,expected", [
    (Y_RECORD, (104.0, 228.0, 76.7)),
    (Z_RECORD, (104.0, 1050.0, 36.9)),
])
def test_choquet_impact_with_transformed_measures(record, expected):
    values = [universal_impact(ImpactSpec(measure_transform=t), record) for t in ("identity", "square", "sqrt")]
    assert values[0] == pytest.approx(expected[0])
    assert values[1] == pytest.approx(expected[1])
    assert values[2] == pytest.approx(expected[2], abs=0.05)


@given(records)
def test_classical_indices_are_universal_integrals(x):
    padded = x + [0] * (len(x) + 60)
    assert universal_impact(ImpactSpec(phi="floor", integral="sugeno"), x) == h_index(x)
    assert universal_impact(ImpactSpec(phi="sqrt_floor", integral="sugeno"), x) == h2_index(x)
    assert universal_impact(ImpactSpec(phi="w_transform", integral="sugeno"), x) == w_index(x)
    assert universal_impact(ImpactSpec(integral="shilkret"), x) == maxprod_index(x)
    assert universal_impact(ImpactSpec(phi="g_transform", integral="sugeno"), padded) == g_index(x)


def test_universal_impact_validation():
    with pytest.raises(DomainError):
        ImpactSpec(phi="nosuch")
    with pytest.raises(DomainError):
        ImpactSpec(integral="lebesgue")
    with pytest.raises(DomainError):
        universal_impact(ImpactSpec(phi=lambda v: v[::-1]), (3, 2, 1))
    with pytest.raises(DomainError):
        universal_impact(ImpactSpec(phi=lambda v: v - 10), (3, 2, 1))
    assert universal_impact(ImpactSpec(eta="sqrt", measure_transform="square"), (4, 0)) == pytest.approx(2.0)


def test_read_producers(tmp_path):
    path = tmp_path / "records.csv"
    path.write_text("1,5,3\n\n2\n")
    out = read_producers(str(path))
    assert [r.values for r in out] == [(5.0, 3.0, 1.0), (2.0,)]

    path = tmp_path / "records.json"
    path.write_text("[[4, 2], [7]]")
    assert [r.values for r in read_producers(str(path))] == [(4.0, 2.0), (7.0,)]

    path.write_text("[[4, 2], [7]")
    with pytest.raises(InputFormatError):
        read_producers(str(path))

    path = tmp_path / "bad.csv"
    path.write_text("1,x\n")
    with pytest.raises(InputFormatError) as err:
        read_producers(str(path))
    assert (err.value.line, err.value.column) == (1, 2)
