import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionkit.errors import DimensionError, DomainError, InputFormatError
from fusionkit.strings import (
    EditCosts, as_symbols, centroid_penalty, closest_string_ga, damerau_levenshtein, dinu_order,
    dinu_rank, hamming, hamming_median, jaccard_qgram, lcs_dist, lcs_length, lev_centroid2,
    levenshtein, median_string_ga, median_string_perturb, osa, qgram_dist, qgram_profile,
    read_strings, set_medoid, to_text,
)

short_text = st.text(alphabet="abcd", max_size=7)


def test_symbols():
    assert as_symbols("ab") == (97, 98)
    assert as_symbols([3, 1]) == (3, 1)
    assert to_text(as_symbols("héllo")) == "héllo"
    with pytest.raises(DomainError):
        as_symbols([1, -2])
    with pytest.raises(DomainError):
        EditCosts(replace=0)


def test_hamming():
    assert hamming("karolin", "kathrin") == 3
    assert hamming("abc", "ab") == math.inf


def test_levenshtein_examples():
    assert levenshtein("function", "fiction") == 2
    assert levenshtein("", "abc") == 3
    assert levenshtein("kitten", "sitting") == 3
    assert isinstance(levenshtein("a", "b"), int)


def test_weighted_levenshtein_is_asymmetric_in_costs():
    costs = EditCosts(insert=1, delete=5, replace=10)
    # "ab" -> "abc" needs one insertion, the reverse one deletion
    assert levenshtein("ab", "abc", costs) == 1
    assert levenshtein("abc", "ab", costs) == 5


@given(short_text, short_text)
def test_levenshtein_with_expensive_replacement_is_lcs_distance(u, v):
    assert levenshtein(u, v, EditCosts(1, 1, 2)) == lcs_dist(u, v)


@given(short_text, short_text)
def test_distance_ordering(u, v):
    dl = damerau_levenshtein(u, v)
    assert dl <= osa(u, v) <= levenshtein(u, v) <= lcs_dist(u, v)
    assert levenshtein(u, v) == levenshtein(v, u)
    assert dl == damerau_levenshtein(v, u)


def test_lcs():
    assert lcs_length("ABCBDAB", "BDCABA") == 4
    assert lcs_dist("ABCBDAB", "BDCABA") == 5


def test_transposition_distances():
    assert damerau_levenshtein("ba", "acb") == 2
    assert osa("ba", "acb") == 3
    assert damerau_levenshtein("ba", "ab") == 1
    assert osa("ba", "ab") == 1
    assert damerau_levenshtein("ca", "abc") == 2


def test_qgrams():
    assert set(qgram_profile("ACTG", 2)) == {tuple(map(ord, g)) for g in ("AC", "CT", "TG")}
    assert qgram_profile("aaabaa", 2)[(97, 97)] == 3
    assert qgram_dist("abaa", "aaba", 2) == 0
    assert qgram_dist("ab", "abc", 2) == 1
    with pytest.raises(DomainError):
        qgram_profile("abc", 0)


def test_jaccard_qgram():
    assert jaccard_qgram("abc", "abd", 2) == pytest.approx(2 / 3)
    assert jaccard_qgram("abc", "abc", 2) == 0.0
    with pytest.raises(DomainError):
        jaccard_qgram("ab", "abcd", 3)


def test_dinu():
    assert dinu_order((2, 1, 1, 3, 3, 4, 1)) == [2, 3, 7, 1, 4, 5, 6]
    assert dinu_rank("ab", "ba") == 2
    assert dinu_rank("abc", "abc") == 0
    # unmatched symbols cost their position
    assert dinu_rank("a", "ab") == 2


def test_hamming_median(hamming_strings):
    res = hamming_median(hamming_strings)
    assert res.penalty == 9
    assert res.candidates == [(1,), (1, 2), (0,)]
    assert sorted(res.solutions()) == [(1, 1, 0), (1, 2, 0)]
    for s in res.solutions():
        assert sum(hamming(s, x) for x in hamming_strings) == 9
    with pytest.raises(DimensionError):
        hamming_median(["ab", "abc"])
    with pytest.raises(DomainError):
        hamming_median([])


def test_closest_string_ga(hamming_strings):
    res = closest_string_ga(hamming_strings, iterations=300, seed=1)
    assert res.fitness == 2
    assert max(hamming(res.string, x) for x in hamming_strings) == 2
    assert res.string in res.best_found
    again = closest_string_ga(hamming_strings, iterations=300, seed=1)
    assert again.string == res.string


def test_closest_string_ga_stops_on_exact_match():
    res = closest_string_ga(["abc", "abc"], iterations=50, seed=0)
    assert res.fitness == 0
    assert res.string == as_symbols("abc")


@given(short_text, short_text)
def test_lev_centroid2_lies_halfway(u, v):
    y = lev_centroid2(u, v)
    total = levenshtein(u, v)
    du, dv = levenshtein(u, y), levenshtein(y, v)
    assert du + dv == total
    assert min(du, dv) == total // 2


def test_centroid_penalty_and_medoid():
    X = ["abc", "abd", "xyz"]
    assert centroid_penalty(X, "abc") == 0 + 1 + 3
    assert centroid_penalty(X, "abc", p=2) == 0 + 1 + 9
    assert set_medoid(X) == 0
    with pytest.raises(DomainError):
        centroid_penalty(X, "abc", p=3)


def test_perturbation_improves_on_the_medoid():
    X = ["kitten", "sitten", "sittin", "mitten"]
    medoid = as_symbols(X[set_medoid(X)])
    string, penalty = median_string_perturb(X)
    assert penalty <= centroid_penalty(X, medoid)
    assert penalty == centroid_penalty(X, string)


def test_median_ga_of_two_strings_costs_their_distance():
    res = median_string_ga(["function", "fiction"], iterations=30, seed=5)
    assert res.fitness == levenshtein("function", "fiction")


def test_median_ga_is_reproducible_and_no_worse_than_inputs():
    X = ["ACGTAC", "ACGTTC", "AGGTAC", "ACGAAC", "TCGTAC"]
    res = median_string_ga(X, iterations=40, seed=9, perturb_seed=True)
    assert res.fitness <= min(centroid_penalty(X, x) for x in X)
    assert res.fitness == centroid_penalty(X, res.string)
    again = median_string_ga(X, iterations=40, seed=9, perturb_seed=True)
    assert again.string == res.string


def test_read_strings(tmp_path):
    path = tmp_path / "plain.txt"
    path.write_text("abc\n\nxyz\n", encoding="utf-8")
    assert read_strings(str(path)) == [as_symbols("abc"), as_symbols("xyz")]

    path = tmp_path / "seqs.fasta"
    path.write_text(">one\nACG\nTT\n>two\nGG\n", encoding="utf-8")
    assert read_strings(str(path)) == [as_symbols("ACGTT"), as_symbols("GG")]

    path.write_text("ACG\n>one\nTT\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as err:
        read_strings(str(path))
    assert err.value.line == 1

    path.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(InputFormatError):
        read_strings(str(path))
