"""
Informetric Aggregation

Nonincreasingly sorted vectors of varying lengths (e.g. citation records of
producers): the M1/M2 length-penalized metrics, centroid and 1-median of a
set of such vectors, the gamma ordering, and impact indices including the
universal-integral family.
"""

import csv
import json
import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, InputFormatError
from .integrals import MonotoneMeasure, choquet, shilkret, sugeno

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SortedVarVector:
    values: Tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError("Sorted vectors need at least one element")
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("Sorted vectors must hold finite values")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise DomainError("Values must be nonincreasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, values: Sequence[float], sort: bool = True) -> "SortedVarVector":
        """Build from any sequence; sorts nonincreasingly unless sort=False"""
        vals = [float(v) for v in values]
        if sort:
            vals.sort(reverse=True)
        return cls(tuple(vals))

    def __len__(self) -> int:
        return len(self.values)

    def padded(self, d: int) -> np.ndarray:
        out = np.zeros(max(d, len(self.values)))
        out[:len(self.values)] = self.values
        return out

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


VectorLike = Union[SortedVarVector, Sequence[float]]


def _coerce(x: VectorLike) -> SortedVarVector:
    return x if isinstance(x, SortedVarVector) else SortedVarVector.of(x)


def _coerce_all(X: Sequence[VectorLike]) -> List[SortedVarVector]:
    vectors = [_coerce(x) for x in X]
    if not vectors:
        raise DomainError("At least one vector is required")
    return vectors


def _check_pr(p: float, r: float) -> None:
    if not (p > 0 and r > 0):
        raise DomainError("Length penalty parameters p and r must be positive")


class Variant(Enum):
    M1 = "M1"
    M2 = "M2"


def dpr_dist(variant: Union[Variant, str], p: float, r: float, x: VectorLike, y: VectorLike) -> float:
    """l1 (M1) or l2 (M2) distance of zero-padded vectors plus p*|dx^r - dy^r|"""
    _check_pr(p, r)
    variant = Variant(variant)
    x, y = _coerce(x), _coerce(y)
    d = max(len(x), len(y))
    diff = x.padded(d) - y.padded(d)
    base = float(np.sum(np.abs(diff))) if variant == Variant.M1 else float(np.sqrt(np.sum(diff ** 2)))
    return base + p * abs(len(x) ** r - len(y) ** r)


def dpr2_penalty(X: Sequence[VectorLike], y: VectorLike, p: float, r: float) -> float:
    """Sum of squared-M2 penalties between y and each vector in X"""
    _check_pr(p, r)
    y = _coerce(y)
    total = 0.0
    for x in _coerce_all(X):
        d = max(len(x), len(y))
        total += float(np.sum((x.padded(d) - y.padded(d)) ** 2)) + p * abs(len(x) ** r - len(y) ** r)
    return total


def dpr2_centroid_candidates(X: Sequence[VectorLike], p: float, r: float) -> List[Tuple[float, np.ndarray]]:
    """Best sorted vector of each length j=1..d with its total penalty"""
    _check_pr(p, r)
    vectors = _coerce_all(X)
    d = max(len(x) for x in vectors)
    means = sum(x.padded(d) for x in vectors) / len(vectors)

    y = np.zeros(d)
    blocks: List[List[int]] = []   # [first, last] index pairs, most recent last
    out = []
    for j in range(d):
        blocks.append([j, j])
        y[j] = means[j]
        # pool adjacent violators until the prefix is nonincreasing again
        while len(blocks) > 1 and y[blocks[-1][0]] > y[blocks[-2][1]]:
            top, below = blocks[-1], blocks[-2]
            n_top = top[1] - top[0] + 1
            n_below = below[1] - below[0] + 1
            value = (y[top[1]] * n_top + y[below[1]] * n_below) / (n_top + n_below)
            y[below[0]:top[1] + 1] = value
            below[1] = top[1]
            blocks.pop()
        candidate = y[:j + 1].copy()
        out.append((dpr2_penalty(vectors, candidate, p, r), candidate))
    return out


def dpr2_centroid(X: Sequence[VectorLike], p: float, r: float) -> SortedVarVector:
    """Centroid under the squared M2 penalty; ties in length go to the shortest"""
    candidates = dpr2_centroid_candidates(X, p, r)
    best_penalty, best = candidates[0]
    for penalty, y in candidates[1:]:
        if penalty < best_penalty:
            best_penalty, best = penalty, y
    logger.debug(f"dpr2 centroid: length {best.size}, penalty {best_penalty:.6g}")
    return SortedVarVector(tuple(best))


def m1_median(X: Sequence[VectorLike], p: float, r: float) -> SortedVarVector:
    """1-median under the M1 metric for nonnegative vectors"""
    _check_pr(p, r)
    vectors = _coerce_all(X)
    if any(v < 0 for x in vectors for v in x.values):
        raise DomainError("m1_median requires nonnegative vectors")
    d = max(len(x) for x in vectors)
    med = np.median(np.vstack([x.padded(d) for x in vectors]), axis=0)
    best, best_penalty = None, math.inf
    for j in range(1, d + 1):
        candidate = SortedVarVector(tuple(med[:j]))
        penalty = sum(dpr_dist(Variant.M1, p, r, x, candidate) for x in vectors)
        if penalty < best_penalty:
            best, best_penalty = candidate, penalty
    return best


def gamma_leq(x: VectorLike, y: VectorLike) -> bool:
    """x is dominated by y: no longer than y and elementwise below on x's support"""
    x, y = _coerce(x), _coerce(y)
    if len(x) > len(y):
        return False
    return all(a <= b for a, b in zip(x.values, y.values))


# ---------------------------------------------------------------------------
# Impact indices


class IndexKind(Enum):
    SUM = "sum"
    H = "h"
    G = "g"
    W = "w"
    H2 = "h2"
    MAXPROD = "maxprod"


def _nonnegative(x: VectorLike) -> np.ndarray:
    values = _coerce(x).as_array()
    if np.any(values < 0):
        raise DomainError("Impact indices require nonnegative inputs")
    return values


def h_index(x: VectorLike) -> int:
    values = _nonnegative(x)
    return int(sum(1 for i, v in enumerate(values, start=1) if v >= i))


def g_index(x: VectorLike) -> int:
    """Largest g with the top-g sum at least g^2; the record is padded with zeros"""
    values = _nonnegative(x)
    cum = np.cumsum(values)
    g = 0
    for i, s in enumerate(cum, start=1):
        if s >= i * i:
            g = i
        else:
            return g
    total = float(cum[-1])
    beyond = math.isqrt(int(math.floor(total)))
    return max(g, beyond)


def w_index(x: VectorLike) -> int:
    values = _nonnegative(x)
    best = 0
    for w in range(1, values.size + 1):
        if all(values[i - 1] >= w - i + 1 for i in range(1, w + 1)):
            best = w
        else:
            break
    return best


def h2_index(x: VectorLike) -> int:
    values = _nonnegative(x)
    return int(sum(1 for i, v in enumerate(values, start=1) if v >= i * i))


def maxprod_index(x: VectorLike) -> float:
    values = _nonnegative(x)
    return float(np.max(values * np.arange(1, values.size + 1)))


def impact_index(kind: Union[IndexKind, str], x: VectorLike) -> float:
    kind = IndexKind(kind)
    if kind == IndexKind.SUM:
        return float(np.sum(_nonnegative(x)))
    return {
        IndexKind.H: h_index,
        IndexKind.G: g_index,
        IndexKind.W: w_index,
        IndexKind.H2: h2_index,
        IndexKind.MAXPROD: maxprod_index,
    }[kind](x)


# ---------------------------------------------------------------------------
# Universal-integral impact functions


def g_transform(values: np.ndarray) -> np.ndarray:
    i = np.arange(1, values.size + 1)
    return np.floor(np.maximum(0.0, np.minimum.accumulate(np.cumsum(values) - i * i + i)))


def w_transform(values: np.ndarray) -> np.ndarray:
    i = np.arange(1, values.size + 1)
    return np.floor(np.minimum.accumulate(values + i - 1))


PHI_TRANSFORMS = {
    "identity": lambda v: v,
    "floor": np.floor,
    "sqrt_floor": lambda v: np.floor(np.sqrt(v)),
    "sqrt": np.sqrt,
    "log1p": np.log1p,
    "g_transform": g_transform,
    "w_transform": w_transform,
}

MEASURE_TRANSFORMS = {
    "identity": lambda k: k,
    "square": lambda k: k * k,
    "sqrt": math.sqrt,
}

ETA_TRANSFORMS = {
    "identity": lambda v: v,
    "sqrt": math.sqrt,
}

INTEGRALS = {
    "choquet": choquet,
    "sugeno": sugeno,
    "shilkret": shilkret,
}


@dataclass(frozen=True)
class ImpactSpec:
    """phi(x) -> integral w.r.t. the symmetric measure phi_mu(|A|) -> eta"""
    phi: Union[str, Callable[[np.ndarray], np.ndarray]] = "identity"
    measure_transform: Union[str, Callable[[float], float]] = "identity"
    integral: str = "choquet"
    eta: Union[str, Callable[[float], float]] = "identity"

    def __post_init__(self):
        for value, table, label in ((self.phi, PHI_TRANSFORMS, "phi"),
                                    (self.measure_transform, MEASURE_TRANSFORMS, "measure transform"),
                                    (self.eta, ETA_TRANSFORMS, "eta")):
            if isinstance(value, str) and value not in table:
                raise DomainError(f"Unknown {label} '{value}'")
        if self.integral not in INTEGRALS:
            raise DomainError(f"Unknown integral '{self.integral}'")

    def _resolve(self, value, table):
        return table[value] if isinstance(value, str) else value

    def measure(self, d: int) -> MonotoneMeasure:
        phi_mu = self._resolve(self.measure_transform, MEASURE_TRANSFORMS)
        return MonotoneMeasure.symmetric([float(phi_mu(k)) for k in range(d + 1)])


def universal_impact(spec: ImpactSpec, x: VectorLike) -> float:
    """eta(I(mu, <phi(x)>)) with the measure truncated at the record length"""
    values = _nonnegative(x)
    phi = spec._resolve(spec.phi, PHI_TRANSFORMS)
    eta = spec._resolve(spec.eta, ETA_TRANSFORMS)
    transformed = np.asarray(phi(values), dtype=float)
    if transformed.shape != values.shape or np.any(transformed < 0):
        raise DomainError("phi must map the record to a nonnegative vector of equal length")
    if np.any(np.diff(transformed) > 0):
        raise DomainError("phi must preserve the nonincreasing order")
    result = INTEGRALS[spec.integral](spec.measure(values.size), transformed)
    return float(eta(result))


# ---------------------------------------------------------------------------
# Input


def read_producers(path: str) -> List[SortedVarVector]:
    """Producer records from a ragged CSV (one per line) or a JSON array of arrays"""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if path.lower().endswith(".json") or text.lstrip().startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputFormatError(f"Invalid JSON: {e.msg}", line=e.lineno, column=e.colno)
        if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
            raise InputFormatError("Expected a JSON array of arrays")
        return [SortedVarVector.of(r) for r in raw]
    records = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        cells = [c.strip() for c in row if c.strip() != ""]
        if not cells:
            continue
        values = []
        for col, cell in enumerate(cells, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise InputFormatError(f"Not a number: '{cell}'", line=lineno, column=col)
        records.append(SortedVarVector.of(values))
    return records
