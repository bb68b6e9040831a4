"""
Monotone Measures and Fuzzy Integrals

Discrete monotone measures (full table, symmetric, additive) together with the
Choquet, Sugeno and Shilkret integrals, weighted lattice polynomial functions
and the weighted/ordered weighted maximum and minimum.
"""

import json
import math
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import ArrayLike, as_vector, ordering_permutation
from .errors import DimensionError, DomainError

logger = logging.getLogger(__name__)

MAX_TABLE_SIZE = 24
INFINITY = math.inf


class MeasureKind(Enum):
    TABLE = "table"
    SYMMETRIC = "symmetric"
    ADDITIVE = "additive"


def _mul(t: float, m: float) -> float:
    """t * m with 0 * inf = 0"""
    if t == 0.0 or m == 0.0:
        return 0.0
    return t * m


class MonotoneMeasure:
    """Monotone set function on subsets of {0..n-1}; subsets are bitmasks"""

    def __init__(self, n: int, kind: MeasureKind, data: Sequence[float]):
        if n < 1:
            raise DomainError("Measure ground set must be nonempty")
        self.n = n
        self.kind = kind
        self.data = np.asarray(data, dtype=float)
        self._validate()

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_table(cls, n: int, table) -> "MonotoneMeasure":
        """Full table indexed by bitmask; accepts a sequence of length 2^n or a dict"""
        if n > MAX_TABLE_SIZE:
            raise DomainError(f"Full-table measures are limited to n <= {MAX_TABLE_SIZE}")
        if isinstance(table, dict):
            values = np.zeros(1 << n)
            seen = set()
            for key, value in table.items():
                mask = int(key)
                if not 0 <= mask < (1 << n):
                    raise DomainError(f"Subset mask {mask} out of range for n={n}")
                values[mask] = float(value)
                seen.add(mask)
            missing = (1 << n) - 1 - len(seen - {0})
            if missing:
                raise DomainError(f"Measure table is missing {missing} nonempty subsets")
            return cls(n, MeasureKind.TABLE, values)
        return cls(n, MeasureKind.TABLE, table)

    @classmethod
    def symmetric(cls, phi: Sequence[float]) -> "MonotoneMeasure":
        """mu(U) = phi(|U|); phi has n+1 entries starting at phi(0)=0"""
        return cls(len(phi) - 1, MeasureKind.SYMMETRIC, phi)

    @classmethod
    def additive(cls, weights: Sequence[float]) -> "MonotoneMeasure":
        return cls(len(weights), MeasureKind.ADDITIVE, weights)

    @classmethod
    def counting(cls, n: int) -> "MonotoneMeasure":
        return cls.symmetric(list(range(n + 1)))

    # -- validation -----------------------------------------------------

    def _validate(self) -> None:
        d = self.data
        if np.any(np.isnan(d)) or np.any(d < 0):
            raise DomainError("Measure values must be nonnegative")
        if self.kind == MeasureKind.TABLE:
            if d.size != (1 << self.n):
                raise DimensionError(f"Measure table needs {1 << self.n} entries, got {d.size}")
            if d[0] != 0:
                raise DomainError("Measure of the empty set must be 0")
            for i in range(self.n):
                bit = 1 << i
                for mask in range(1 << self.n):
                    if not mask & bit and d[mask | bit] < d[mask]:
                        raise DomainError(f"Measure not monotone: mu({mask | bit}) < mu({mask})")
        elif self.kind == MeasureKind.SYMMETRIC:
            if d[0] != 0:
                raise DomainError("Symmetric measure needs phi(0) = 0")
            if np.any(np.diff(d) < 0):
                raise DomainError("Symmetric measure generator must be nondecreasing")
        elif np.any(np.isinf(d)):
            raise DomainError("Additive measure weights must be finite")
        if self.total() <= 0:
            raise DomainError("Measure of the whole ground set must be positive")

    # -- evaluation -----------------------------------------------------

    def of_mask(self, mask: int) -> float:
        if self.kind == MeasureKind.TABLE:
            return float(self.data[mask])
        if self.kind == MeasureKind.SYMMETRIC:
            return float(self.data[bin(mask).count("1")])
        return float(sum(self.data[i] for i in range(self.n) if mask >> i & 1))

    def of_set(self, indices: Sequence[int]) -> float:
        mask = 0
        for i in indices:
            mask |= 1 << i
        return self.of_mask(mask)

    def total(self) -> float:
        return self.of_mask((1 << self.n) - 1)

    def is_normalized(self) -> bool:
        return abs(self.total() - 1.0) <= 1e-12

    def owa_weights(self) -> np.ndarray:
        """Weights of the OWA operator equal to the Choquet integral of a symmetric measure"""
        if self.kind != MeasureKind.SYMMETRIC:
            raise DomainError("Only symmetric measures induce OWA weights")
        n = self.n
        # weight of the i-th smallest input is phi(n-i+1) - phi(n-i)
        return np.array([self.data[n - i + 1] - self.data[n - i] for i in range(1, n + 1)])

    def upper_sets(self, x: np.ndarray) -> Tuple[np.ndarray, List[float]]:
        """Sorted inputs and mu({sigma(i),...,sigma(n)}) for each level"""
        sigma = ordering_permutation(x)
        mask = (1 << self.n) - 1
        levels = []
        for idx in sigma:
            levels.append(self.of_mask(mask))
            mask &= ~(1 << int(idx))
        return x[sigma], levels

    # -- serialization --------------------------------------------------

    def to_table(self) -> np.ndarray:
        return np.array([self.of_mask(m) for m in range(1 << self.n)])

    def to_json(self) -> str:
        table = self.to_table()
        return json.dumps({str(m): ("inf" if math.isinf(v) else v) for m, v in enumerate(table)},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MonotoneMeasure":
        raw: Dict[str, object] = json.loads(text)
        size = len(raw)
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise DomainError(f"Measure JSON must hold 2^n entries, got {size}")
        return cls.from_table(n, {k: (INFINITY if v == "inf" else v) for k, v in raw.items()})

    def __repr__(self) -> str:
        return f"MonotoneMeasure(n={self.n}, kind={self.kind.value})"


def _integrand(mu: MonotoneMeasure, x: ArrayLike) -> np.ndarray:
    values = as_vector(x)
    if values.size != mu.n:
        raise DimensionError(f"Input has length {values.size}, measure has n={mu.n}")
    if np.any(values < 0):
        raise DomainError("Integrals require nonnegative inputs")
    return values


def choquet(mu: MonotoneMeasure, x: ArrayLike) -> float:
    """Discrete Choquet integral"""
    xs, levels = mu.upper_sets(_integrand(mu, x))
    total = 0.0
    prev = 0.0
    for xi, m in zip(xs, levels):
        total += _mul(xi - prev, m)
        prev = xi
    return float(total)


def sugeno(mu: MonotoneMeasure, x: ArrayLike) -> float:
    """Discrete Sugeno integral"""
    xs, levels = mu.upper_sets(_integrand(mu, x))
    return float(max(min(xi, m) for xi, m in zip(xs, levels)))


def shilkret(mu: MonotoneMeasure, x: ArrayLike) -> float:
    """Discrete Shilkret integral"""
    xs, levels = mu.upper_sets(_integrand(mu, x))
    return float(max(_mul(xi, m) for xi, m in zip(xs, levels)))


def sugeno_bruteforce(mu: MonotoneMeasure, x: ArrayLike) -> float:
    """Sugeno integral by subset enumeration; exponential, for cross-checks"""
    values = _integrand(mu, x)
    best = 0.0
    for size in range(1, mu.n + 1):
        for subset in combinations(range(mu.n), size):
            best = max(best, min(float(np.min(values[list(subset)])), mu.of_set(subset)))
    return best


@dataclass(frozen=True)
class LatticePolySpec:
    """Families A_1..A_k of nonempty index sets with thresholds v_1..v_k"""
    families: Tuple[Tuple[int, ...], ...]
    thresholds: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(tuple(int(i) for i in a) for a in self.families))
        object.__setattr__(self, "thresholds", tuple(float(v) for v in self.thresholds))
        if not self.families:
            raise DomainError("Lattice polynomial needs at least one family")
        if len(self.families) != len(self.thresholds):
            raise DimensionError("One threshold per family is required")
        if any(len(a) == 0 for a in self.families):
            raise DomainError("Lattice polynomial families must be nonempty")


def wlpf(spec: LatticePolySpec, x: ArrayLike) -> float:
    """Weighted lattice polynomial function: max_j (v_j ^ min_{i in A_j} x_i)"""
    values = as_vector(x)
    if any(i < 0 or i >= values.size for a in spec.families for i in a):
        raise DimensionError(f"Family index out of range for n={values.size}")
    return float(max(min(v, float(np.min(values[list(a)])))
                     for a, v in zip(spec.families, spec.thresholds)))


def _pair(v: ArrayLike, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    vv = as_vector(v)
    xv = as_vector(x)
    if vv.size != xv.size:
        raise DimensionError(f"Length mismatch: {vv.size} vs {xv.size}")
    return vv, xv


def wmax(v: ArrayLike, x: ArrayLike) -> float:
    vv, xv = _pair(v, x)
    return float(np.max(np.minimum(vv, xv)))


def wmin(v: ArrayLike, x: ArrayLike, b: Optional[float] = None) -> float:
    """Weighted minimum with b the upper bound of the input interval (default max v)"""
    vv, xv = _pair(v, x)
    top = float(np.max(vv)) if b is None else b
    return float(np.min(np.maximum(top - vv, xv)))


def owmax(v: ArrayLike, x: ArrayLike) -> float:
    vv, xv = _pair(v, x)
    if np.any(np.diff(vv) > 0):
        raise DomainError("owmax requires nonincreasing v")
    return float(np.max(np.minimum(vv, np.sort(xv))))


def owmin(v: ArrayLike, x: ArrayLike, b: Optional[float] = None) -> float:
    vv, xv = _pair(v, x)
    if np.any(np.diff(vv) < 0):
        raise DomainError("owmin requires nondecreasing v")
    top = float(np.max(vv)) if b is None else b
    return float(np.min(np.maximum(top - vv, np.sort(xv))))


def owmax_measure(v: ArrayLike) -> MonotoneMeasure:
    """Symmetric measure whose Sugeno integral is owmax(v, .)"""
    vv = as_vector(v)
    n = vv.size
    return MonotoneMeasure.symmetric([0.0] + [float(vv[n - k]) for k in range(1, n + 1)])
