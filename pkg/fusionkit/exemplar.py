"""
Exemplar Search in Finite Semimetric Spaces

Finds the element of a finite set that minimizes a fold of its
dissimilarities to all other elements (medoid for sums, seboid for maxima).
Exhaustive, pruned and k-nearest-neighbour descent searches are provided;
every call to the dissimilarity callback is counted.
"""

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError, InputFormatError
from .fusion_config import get_fusion_config
from .multivariate import MetricSpec, PointCloud
from .strings import DISTANCES, StringLike, as_symbols

logger = logging.getLogger(__name__)

SYMMETRY_SPOT_CHECKS = 32


class SemimetricSpace:
    """n objects with a symmetric dissimilarity that vanishes on the diagonal"""

    def __init__(self, n: int, dist: Callable[[int, int], float], cache: bool = False):
        if n < 1:
            raise DomainError("A semimetric space needs at least one object")
        limit = get_fusion_config().get_exemplar_config()["cache_limit"]
        if cache and n > limit:
            raise DomainError(f"Distance caching is limited to n <= {limit}")
        self.n = n
        self._dist = dist
        self._cache: Optional[Dict[Tuple[int, int], float]] = {} if cache else None
        self.calls = 0

    def dist(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        if self._cache is not None and key in self._cache:
            return self._cache[key]
        self.calls += 1
        d = float(self._dist(i, j))
        if d < 0:
            raise DomainError(f"Negative dissimilarity between {i} and {j}")
        if self._cache is not None:
            self._cache[key] = d
        return d

    def reset_calls(self) -> None:
        self.calls = 0

    def spot_check(self, samples: int = SYMMETRY_SPOT_CHECKS, seed: Optional[int] = None) -> bool:
        """Symmetry on random pairs; uncounted"""
        rng = np.random.default_rng(seed)
        for _ in range(samples if self.n > 1 else 0):
            i, j = (int(v) for v in rng.integers(0, self.n, size=2))
            if self._dist(i, j) != self._dist(j, i):
                return False
        return True

    @classmethod
    def from_matrix(cls, matrix, cache: bool = False) -> "SemimetricSpace":
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise DimensionError("Distance matrix must be square and nonempty")
        if np.any(np.diag(M) != 0):
            raise DomainError("Distance matrix must have a zero diagonal")
        if not np.array_equal(M, M.T):
            raise DomainError("Distance matrix must be symmetric")
        if np.any(M < 0):
            raise DomainError("Distances must be nonnegative")
        return cls(M.shape[0], lambda i, j: M[i, j], cache)

    @classmethod
    def from_points(cls, X: Union[PointCloud, np.ndarray], metric: Optional[MetricSpec] = None,
                    cache: bool = False) -> "SemimetricSpace":
        cloud = X if isinstance(X, PointCloud) else PointCloud(X)
        metric = metric or MetricSpec()
        pts = cloud.points()
        return cls(cloud.n, lambda i, j: metric.distance(pts[i], pts[j]), cache)

    @classmethod
    def from_strings(cls, strings: Sequence[StringLike], distance: str = "levenshtein",
                     cache: bool = False) -> "SemimetricSpace":
        if distance not in DISTANCES:
            raise DomainError(f"Unknown string distance '{distance}'")
        fn = DISTANCES[distance]
        symbols = [as_symbols(s) for s in strings]
        return cls(len(symbols), lambda i, j: fn(symbols[i], symbols[j]), cache)

    @classmethod
    def from_csv(cls, path: str, cache: bool = False) -> "SemimetricSpace":
        rows: List[List[float]] = []
        with open(path, newline="") as f:
            for lineno, row in enumerate(csv.reader(f), start=1):
                if not row:
                    continue
                values = []
                for col, cell in enumerate(row, start=1):
                    try:
                        values.append(float(cell))
                    except ValueError:
                        raise InputFormatError(f"Not a number: '{cell}'", line=lineno, column=col)
                rows.append(values)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InputFormatError("Distance matrix CSV must be square")
        return cls.from_matrix(rows, cache)


class FoldKind(Enum):
    SUM = "sum"
    MAX = "max"
    SUM_SQ = "sum_sq"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FoldSpec:
    """Nondecreasing accumulation D(acc, d) with neutral element e"""
    kind: FoldKind = FoldKind.SUM
    binary: Optional[Callable[[float, float], float]] = None
    neutral: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FoldKind(self.kind))
        if self.kind == FoldKind.CUSTOM and self.binary is None:
            raise DomainError("Custom fold requires a binary function")

    def step(self, acc: float, d: float) -> float:
        if self.kind == FoldKind.SUM:
            return acc + d
        if self.kind == FoldKind.MAX:
            return max(acc, d)
        if self.kind == FoldKind.SUM_SQ:
            return acc + d * d
        return self.binary(acc, d)

    @property
    def identity(self) -> float:
        return self.neutral if self.kind == FoldKind.CUSTOM else 0.0


@dataclass
class ExemplarResult:
    index: int
    penalty: float
    dist_calls: int
    method: str
    converged: bool = True
    message: str = ""


def _fold(fold) -> FoldSpec:
    return fold if isinstance(fold, FoldSpec) else FoldSpec(FoldKind(fold))


def exemplar_exact(space: SemimetricSpace, fold: Union[FoldSpec, str] = "sum") -> ExemplarResult:
    """All n(n-1)/2 pairs; ties go to the smallest index"""
    fold = _fold(fold)
    start = space.calls
    n = space.n
    acc = [fold.identity] * n
    for i in range(n - 1):
        for j in range(i + 1, n):
            d = space.dist(i, j)
            acc[i] = fold.step(acc[i], d)
            acc[j] = fold.step(acc[j], d)
    best = min(range(n), key=lambda i: (acc[i], i))
    return ExemplarResult(best, acc[best], space.calls - start, "exact")


def exemplar_pruned(space: SemimetricSpace, fold: Union[FoldSpec, str] = "sum") -> ExemplarResult:
    """Candidate scans stop as soon as the partial penalty reaches the best so far"""
    fold = _fold(fold)
    start = space.calls
    best_d, best_i = np.inf, -1
    for i in range(space.n):
        cur = fold.identity
        for j in range(space.n):
            if j == i:
                continue
            cur = fold.step(cur, space.dist(i, j))
            if cur >= best_d:
                break
        if cur < best_d:
            best_d, best_i = cur, i
    return ExemplarResult(best_i, best_d, space.calls - start, "pruned")


def _scan(space: SemimetricSpace, fold: FoldSpec, i: int, k: int) -> Tuple[float, List[int]]:
    """Full penalty of candidate i and its k nearest neighbours, nearest first"""
    acc = fold.identity
    row = []
    for j in range(space.n):
        if j == i:
            continue
        d = space.dist(i, j)
        acc = fold.step(acc, d)
        row.append((d, j))
    row.sort()
    return acc, [j for _, j in row[:k]]


def exemplar_approx(space: SemimetricSpace, fold: Union[FoldSpec, str] = "sum", k: Optional[int] = None,
                    restarts: Optional[int] = None, seed: Optional[int] = None) -> ExemplarResult:
    """Descent over k-nearest-neighbour moves from random starts sharing one visited set"""
    fold = _fold(fold)
    cfg = get_fusion_config()
    ex = cfg.get_exemplar_config()
    k = ex["k"] if k is None else k
    restarts = ex["restarts"] if restarts is None else restarts
    seed = cfg.get_default_seed() if seed is None else seed
    if k < 1 or restarts < 1:
        raise DomainError("k and restarts must be positive")
    if space.n <= ex["exhaustive_below"]:
        result = exemplar_pruned(space, fold)
        result.method = "approx"
        result.message = "small instance solved exactly"
        return result

    start_calls = space.calls
    rng = np.random.default_rng(seed)
    visited = np.zeros(space.n, dtype=bool)
    neighbours: Dict[int, List[int]] = {}
    best_i, best_d = -1, np.inf

    for r in range(restarts):
        unvisited = np.flatnonzero(~visited)
        if unvisited.size == 0:
            break
        ci = int(rng.choice(unvisited))
        bd, neighbours[ci] = _scan(space, fold, ci, k)
        bi = ci
        visited[ci] = True
        changed = True
        while changed:
            changed = False
            for ui in neighbours[ci]:
                if visited[ui]:
                    continue
                ud, neighbours[ui] = _scan(space, fold, ui, k)
                visited[ui] = True
                if ud < bd:
                    bi, bd, changed = ui, ud, True
            ci = bi
        logger.debug(f"Exemplar restart {r}: index {bi}, penalty {bd:.6g}")
        if bd < best_d or (bd == best_d and bi < best_i):
            best_i, best_d = bi, bd

    calls = space.calls - start_calls
    logger.info(f"Approximate exemplar: index {best_i}, {calls} distance calls")
    return ExemplarResult(best_i, best_d, calls, "approx",
                          message=f"{int(visited.sum())} candidates evaluated")
