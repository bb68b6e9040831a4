"""
String Distances and Consensus

Edit distances (Hamming, Levenshtein, LCS, OSA, Damerau-Levenshtein), q-gram
distances, the Dinu rank distance and consensus strings: the exact Hamming
median, a genetic closest string, the two-string Levenshtein centroid and a
genetic median string. Strings are tuples of nonnegative integers; Python
str inputs are mapped to code points.
"""

import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError, InputFormatError
from .fusion_config import get_fusion_config

logger = logging.getLogger(__name__)

HAMMING_INFINITY = math.inf

Symbols = Tuple[int, ...]
StringLike = Union[str, Sequence[int]]


def as_symbols(s: StringLike) -> Symbols:
    if isinstance(s, str):
        return tuple(ord(ch) for ch in s)
    out = tuple(int(c) for c in s)
    if any(c < 0 for c in out):
        raise DomainError("Symbols must be nonnegative integers")
    return out


def to_text(s: Sequence[int]) -> str:
    return "".join(chr(c) for c in s)


@dataclass(frozen=True)
class EditCosts:
    insert: float = 1.0
    delete: float = 1.0
    replace: float = 1.0

    def __post_init__(self):
        if min(self.insert, self.delete, self.replace) <= 0:
            raise DomainError("Edit costs must be positive")


UNIT_COSTS = EditCosts()


# ---------------------------------------------------------------------------
# Distances


def hamming(u: StringLike, v: StringLike) -> float:
    u, v = as_symbols(u), as_symbols(v)
    if len(u) != len(v):
        return HAMMING_INFINITY
    return sum(a != b for a, b in zip(u, v))


def levenshtein(u: StringLike, v: StringLike, costs: EditCosts = UNIT_COSTS) -> float:
    """Weighted Levenshtein distance with two DP rows"""
    u, v = as_symbols(u), as_symbols(v)
    ins, dele, rep = costs.insert, costs.delete, costs.replace
    if len(v) > len(u):
        # keep the shorter string along the row; roles of insert/delete swap
        u, v = v, u
        ins, dele = dele, ins
    last = [j * ins for j in range(len(v) + 1)]
    for i in range(1, len(u) + 1):
        cur = [i * dele] + [0.0] * len(v)
        a = u[i - 1]
        for j in range(1, len(v) + 1):
            cur[j] = min(last[j - 1] + (0.0 if a == v[j - 1] else rep),
                         cur[j - 1] + ins,
                         last[j] + dele)
        last = cur
    d = last[len(v)]
    return int(d) if float(d).is_integer() and costs == UNIT_COSTS else d


def lcs_length(u: StringLike, v: StringLike) -> int:
    u, v = as_symbols(u), as_symbols(v)
    last = [0] * (len(v) + 1)
    for a in u:
        cur = [0] * (len(v) + 1)
        for j in range(1, len(v) + 1):
            cur[j] = last[j - 1] + 1 if a == v[j - 1] else max(cur[j - 1], last[j])
        last = cur
    return last[-1]


def lcs_dist(u: StringLike, v: StringLike) -> int:
    u, v = as_symbols(u), as_symbols(v)
    return len(u) + len(v) - 2 * lcs_length(u, v)


def osa(u: StringLike, v: StringLike) -> int:
    """Optimal string alignment: Levenshtein plus adjacent transpositions, no substring edited twice"""
    u, v = as_symbols(u), as_symbols(v)
    n1, n2 = len(u), len(v)
    D = [[0] * (n2 + 1) for _ in range(n1 + 1)]
    for i in range(n1 + 1):
        D[i][0] = i
    for j in range(n2 + 1):
        D[0][j] = j
    for i in range(1, n1 + 1):
        for j in range(1, n2 + 1):
            cost = 0 if u[i - 1] == v[j - 1] else 1
            D[i][j] = min(D[i - 1][j] + 1, D[i][j - 1] + 1, D[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and u[i - 1] == v[j - 2] and u[i - 2] == v[j - 1]:
                D[i][j] = min(D[i][j], D[i - 2][j - 2] + 1)
    return D[n1][n2]


def damerau_levenshtein(u: StringLike, v: StringLike) -> int:
    """Unrestricted Damerau-Levenshtein distance"""
    u, v = as_symbols(u), as_symbols(v)
    n1, n2 = len(u), len(v)
    big = n1 + n2
    # D is offset by one row/column holding the sentinel
    D = [[big] * (n2 + 2) for _ in range(n1 + 2)]
    for i in range(n1 + 1):
        D[i + 1][1] = i
    for j in range(n2 + 1):
        D[1][j + 1] = j
    last_row: Dict[int, int] = {}
    for i in range(1, n1 + 1):
        last_col = 0
        for j in range(1, n2 + 1):
            i1 = last_row.get(v[j - 1], 0)
            j1 = last_col
            cost = 1
            if u[i - 1] == v[j - 1]:
                cost = 0
                last_col = j
            D[i + 1][j + 1] = min(
                D[i][j] + cost,
                D[i + 1][j] + 1,
                D[i][j + 1] + 1,
                D[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1),
            )
        last_row[u[i - 1]] = i
    return D[n1 + 1][n2 + 1]


def qgram_profile(u: StringLike, q: int) -> Counter:
    """Counts of each q-gram (as a tuple of symbols)"""
    if q < 1:
        raise DomainError("q must be at least 1")
    u = as_symbols(u)
    return Counter(u[i:i + q] for i in range(len(u) - q + 1))


def qgram_dist(u: StringLike, v: StringLike, q: int) -> int:
    pu, pv = qgram_profile(u, q), qgram_profile(v, q)
    return sum(abs(pu[g] - pv[g]) for g in set(pu) | set(pv))


def jaccard_qgram(u: StringLike, v: StringLike, q: int) -> float:
    u, v = as_symbols(u), as_symbols(v)
    if q > min(len(u), len(v)):
        raise DomainError("Jaccard q-gram dissimilarity requires q <= min(|u|, |v|)")
    gu, gv = set(qgram_profile(u, q)), set(qgram_profile(v, q))
    return 1.0 - len(gu & gv) / len(gu | gv)


def dinu_order(u: StringLike) -> List[int]:
    """1-based positions of symbols listed in stable sorted order"""
    u = as_symbols(u)
    return [i + 1 for i in sorted(range(len(u)), key=lambda i: u[i])]


def dinu_rank(u: StringLike, v: StringLike) -> int:
    """Dinu rank distance by merging stable orderings of both strings"""
    u, v = as_symbols(u), as_symbols(v)
    ou, ov = dinu_order(u), dinu_order(v)
    d = 0
    iu = iv = 0
    while iu < len(u) and iv < len(v):
        a, b = u[ou[iu] - 1], v[ov[iv] - 1]
        if a == b:
            d += abs(ou[iu] - ov[iv])
            iu += 1
            iv += 1
        elif a < b:
            d += ou[iu]
            iu += 1
        else:
            d += ov[iv]
            iv += 1
    d += sum(ou[iu:]) + sum(ov[iv:])
    return d


DISTANCES = {
    "hamming": hamming,
    "levenshtein": levenshtein,
    "lcs": lcs_dist,
    "osa": osa,
    "dl": damerau_levenshtein,
    "dinu": dinu_rank,
}


# ---------------------------------------------------------------------------
# Consensus


@dataclass
class HammingMedian:
    candidates: List[Tuple[int, ...]]
    string: Symbols
    penalty: int

    def solutions(self) -> List[Symbols]:
        """All median strings; the product of the per-position candidate sets"""
        out: List[Symbols] = [()]
        for options in self.candidates:
            out = [s + (c,) for s in out for c in options]
        return out


def _equal_length(X: Sequence[StringLike]) -> List[Symbols]:
    strings = [as_symbols(s) for s in X]
    if not strings:
        raise DomainError("At least one string is required")
    if len({len(s) for s in strings}) != 1:
        raise DimensionError("All strings must have equal length")
    return strings


def hamming_median(X: Sequence[StringLike]) -> HammingMedian:
    """Exact Hamming median: the most frequent symbols at each position"""
    strings = _equal_length(X)
    n = len(strings)
    candidates = []
    penalty = 0
    for column in zip(*strings):
        counts = Counter(column)
        top = max(counts.values())
        candidates.append(tuple(sorted(c for c, k in counts.items() if k == top)))
        penalty += n - top
    best = tuple(c[0] for c in candidates)
    return HammingMedian(candidates, best, penalty)


@dataclass
class GAResult:
    string: Symbols
    fitness: float
    iterations: int
    best_found: List[Symbols] = field(default_factory=list)
    converged: bool = True
    message: str = ""


def _ga_defaults(iterations, mutation_rate, seed):
    cfg = get_fusion_config()
    ga = cfg.get_ga_config()
    return (ga["iterations"] if iterations is None else iterations,
            ga["mutation_rate"] if mutation_rate is None else mutation_rate,
            cfg.get_default_seed() if seed is None else seed,
            ga["population_factor"])


def closest_string_ga(X: Sequence[StringLike], population: Optional[int] = None,
                      iterations: Optional[int] = None, mutation_rate: Optional[float] = None,
                      seed: Optional[int] = None) -> GAResult:
    """Genetic search for the string minimizing the maximal Hamming distance"""
    strings = _equal_length(X)
    iterations, mutation_rate, seed, factor = _ga_defaults(iterations, mutation_rate, seed)
    Xm = np.array(strings, dtype=np.int64).T        # d x n
    d, n = Xm.shape
    if d == 0:
        return GAResult((), 0, 0, [()])
    k = factor * n * d if population is None else population
    if k < 2:
        raise DomainError("Population size must be at least 2")
    rng = np.random.default_rng(seed)
    alphabet = np.unique(Xm)
    lam = max(1.0, k * d * mutation_rate)

    def fitness(P):
        return np.max(np.sum(P[:, :, None] != Xm[:, None, :], axis=0), axis=1)

    P = rng.choice(alphabet, size=(d, k))
    seeded = min(n, k)
    P[:, rng.choice(k, seeded, replace=False)] = Xm[:, rng.choice(n, seeded, replace=False)]
    f = fitness(P)
    best_f = int(f.min())
    best_set = {tuple(int(c) for c in P[:, i]) for i in np.flatnonzero(f == best_f)}

    for it in range(1, iterations + 1):
        if best_f == 0:
            break
        prob = (d - f + 1.0) ** 3
        parents = P[:, rng.choice(k, size=2 * k, replace=True, p=prob / prob.sum())]
        children = parents[:, :k].copy()
        # uniform crossover: half of the positions come from the second parent
        swap = np.argsort(rng.random((d, k)), axis=0) < d // 2
        children[swap] = parents[:, k:][swap]
        count = min(k * d, int(rng.poisson(lam)))
        if count:
            cells = rng.choice(k * d, size=count, replace=False)
            children.reshape(-1)[cells] = rng.choice(alphabet, size=count)
        P = children
        f = fitness(P)
        if f.min() < best_f:
            best_f = int(f.min())
            best_set = {tuple(int(c) for c in P[:, i]) for i in np.flatnonzero(f == best_f)}
            logger.debug(f"Closest string GA iteration {it}: max distance {best_f}")

    found = sorted(best_set)
    logger.info(f"Closest string GA: max distance {best_f}")
    return GAResult(found[0], best_f, iterations, found)


def lev_centroid2(u: StringLike, v: StringLike) -> Symbols:
    """A string halfway between u and v along an optimal Levenshtein edit path"""
    s1, s2 = as_symbols(u), as_symbols(v)
    if s2 < s1:
        s1, s2 = s2, s1
    n1, n2 = len(s1), len(s2)
    D = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    T = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    D[1:, 0] = np.arange(1, n1 + 1)
    T[1:, 0] = 4
    D[0, 1:] = np.arange(1, n2 + 1)
    T[0, 1:] = 2
    for i in range(1, n1 + 1):
        for j in range(1, n2 + 1):
            if s1[i - 1] == s2[j - 1]:
                D[i, j] = D[i - 1, j - 1]
                continue
            sub, ins, dele = D[i - 1, j - 1] + 1, D[i, j - 1] + 1, D[i - 1, j] + 1
            best = min(sub, ins, dele)
            D[i, j] = best
            T[i, j] = (1 if sub == best else 0) | (2 if ins == best else 0) | (4 if dele == best else 0)

    maxd = int(D[n1, n2]) // 2
    if maxd <= 0:
        return s1
    x, y = n1, n2
    suffix: List[int] = []
    longest = max(n1, n2)
    done = 0
    while done < maxd:
        t = int(T[x, y])
        if t == 0:
            suffix.insert(0, s1[x - 1])
            x -= 1
            y -= 1
            continue
        done += 1
        if t & 1:
            suffix.insert(0, s2[y - 1])
            x -= 1
            y -= 1
        elif t & 2 and (not t & 4 or x + len(suffix) < longest):
            suffix.insert(0, s2[y - 1])
            y -= 1
        else:
            x -= 1
    return s1[:x] + tuple(suffix)


def centroid_penalty(X: Sequence[StringLike], y: StringLike, p: int = 1) -> float:
    """Sum of Levenshtein distances (p=1) or their squares (p=2)"""
    if p not in (1, 2):
        raise DomainError("centroid_penalty supports p in {1, 2}")
    return sum(levenshtein(x, y) ** p for x in X)


def set_medoid(X: Sequence[StringLike]) -> int:
    """Index of the input with the least Levenshtein penalty; ties to the smallest index"""
    strings = [as_symbols(s) for s in X]
    if not strings:
        raise DomainError("At least one string is required")
    totals = [0.0] * len(strings)
    for i in range(len(strings)):
        for j in range(i + 1, len(strings)):
            d = levenshtein(strings[i], strings[j])
            totals[i] += d
            totals[j] += d
    return int(np.argmin(totals))


def _alphabet(strings: Sequence[Symbols]) -> List[int]:
    return sorted({c for s in strings for c in s})


def _neighbours(s: Symbols, alphabet: Sequence[int]):
    for i in range(len(s) + 1):
        for c in alphabet:
            yield s[:i] + (c,) + s[i:]
        if i < len(s):
            yield s[:i] + s[i + 1:]
            for c in alphabet:
                if c != s[i]:
                    yield s[:i] + (c,) + s[i + 1:]


def median_string_perturb(X: Sequence[StringLike], max_rounds: int = 1000) -> Tuple[Symbols, float]:
    """Local search from the set medoid over single-symbol edits; first improvement wins"""
    strings = [as_symbols(s) for s in X]
    current = strings[set_medoid(strings)]
    best = centroid_penalty(strings, current)
    alphabet = _alphabet(strings)
    for _ in range(max_rounds):
        improved = False
        for candidate in _neighbours(current, alphabet):
            score = centroid_penalty(strings, candidate)
            if score < best:
                current, best, improved = candidate, score, True
                break
        if not improved:
            break
    return current, best


def _mutate(s: Symbols, alphabet: Sequence[int], rng: np.random.Generator) -> Symbols:
    op = int(rng.integers(0, 3)) if s else 0
    if op == 0:
        i = int(rng.integers(0, len(s) + 1))
        return s[:i] + (int(rng.choice(alphabet)),) + s[i:]
    i = int(rng.integers(0, len(s)))
    if op == 1:
        return s[:i] + s[i + 1:]
    return s[:i] + (int(rng.choice(alphabet)),) + s[i + 1:]


def median_string_ga(X: Sequence[StringLike], population: Optional[int] = None,
                     iterations: Optional[int] = None, mutation_rate: Optional[float] = None,
                     seed: Optional[int] = None, perturb_seed: bool = False) -> GAResult:
    """Genetic search for a Levenshtein median string"""
    strings = [as_symbols(s) for s in X]
    if not strings:
        raise DomainError("At least one string is required")
    iterations, mutation_rate, seed, factor = _ga_defaults(iterations, mutation_rate, seed)
    rng = np.random.default_rng(seed)
    alphabet = _alphabet(strings)
    longest = max(len(s) for s in strings)
    shortest = min(len(s) for s in strings)
    k = max(2, factor * max(1, longest)) if population is None else population
    if k < 2:
        raise DomainError("Population size must be at least 2")
    if not alphabet:
        return GAResult((), 0.0, 0, [()])

    cache: Dict[Symbols, float] = {}

    def penalty(s: Symbols) -> float:
        if s not in cache:
            cache[s] = centroid_penalty(strings, s)
        return cache[s]

    # half inputs (medoid first), half random strings
    pop: List[Symbols] = [strings[set_medoid(strings)]]
    if perturb_seed:
        pop.append(median_string_perturb(strings)[0])
    half = k // 2
    for _ in range(len(pop), half):
        pop.append(strings[int(rng.integers(0, len(strings)))])
    while len(pop) < k:
        length = int(rng.integers(shortest, longest + 1))
        pop.append(tuple(int(c) for c in rng.choice(alphabet, size=length)))
    pop = pop[:k]

    f = np.array([penalty(s) for s in pop])
    best_f = float(f.min())
    best = min(pop[i] for i in np.flatnonzero(f == best_f))
    lam = max(1.0, k * longest * mutation_rate)

    for it in range(1, iterations + 1):
        weights = (f.max() - f + 1.0) ** 3
        chosen = rng.choice(k, size=2 * k, replace=True, p=weights / weights.sum())
        pop = [lev_centroid2(pop[chosen[i]], pop[chosen[i + k]]) for i in range(k)]
        for _ in range(min(k, int(rng.poisson(lam)))):
            j = int(rng.integers(0, k))
            pop[j] = _mutate(pop[j], alphabet, rng)
        f = np.array([penalty(s) for s in pop])
        if f.min() < best_f:
            best_f = float(f.min())
            best = min(pop[i] for i in np.flatnonzero(f == best_f))
            logger.debug(f"Median string GA iteration {it}: penalty {best_f}")

    logger.info(f"Median string GA: penalty {best_f}")
    return GAResult(best, best_f, iterations, [best])


# ---------------------------------------------------------------------------
# Input files


def read_strings(path: str) -> List[Symbols]:
    """Newline-delimited UTF-8 strings, or FASTA-like records with '>' headers"""
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except UnicodeDecodeError as e:
        raise InputFormatError(f"File is not valid UTF-8: {e}")
    if any(line.startswith(">") for line in lines):
        records: List[str] = []
        current: Optional[List[str]] = None
        for lineno, line in enumerate(lines, start=1):
            if line.startswith(">"):
                if current is not None:
                    records.append("".join(current))
                current = []
            elif line.strip():
                if current is None:
                    raise InputFormatError("Sequence data before the first '>' header", line=lineno)
                current.append(line.strip())
        if current is not None:
            records.append("".join(current))
        return [as_symbols(r) for r in records]
    return [as_symbols(line) for line in lines if line != ""]
