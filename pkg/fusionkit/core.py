"""
Univariate Fusion Functions

Means, OWA operators, quasi-arithmetic means, fuzzy logic connectives,
ordering utilities and randomized property falsifiers.
"""

import math
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-12
IDEMPOTENCE_RTOL = math.sqrt(np.finfo(float).eps)

ArrayLike = Union[Sequence[float], np.ndarray, "RealVector"]


@dataclass(frozen=True)
class RealVector:
    """Finite real tuple with an optional domain interval"""
    values: Tuple[float, ...]
    domain: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise DomainError("RealVector must have at least one element")
        if not all(math.isfinite(v) for v in values):
            raise DomainError("RealVector elements must be finite")
        if self.domain is not None:
            a, b = self.domain
            if a > b:
                raise DomainError(f"Invalid domain [{a}, {b}]")
            if any(v < a or v > b for v in values):
                raise DomainError(f"RealVector elements must lie in [{a}, {b}]")

    def __len__(self) -> int:
        return len(self.values)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def as_vector(x: ArrayLike, allow_empty: bool = False) -> np.ndarray:
    """Convert input to a validated 1-d float array"""
    if isinstance(x, RealVector):
        return x.to_array()
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0 and not allow_empty:
        raise DomainError("Empty input vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Input vector contains non-finite values")
    return arr


def as_weights(w: ArrayLike, n: Optional[int] = None) -> np.ndarray:
    """Validate a weighting vector: nonnegative, summing to 1"""
    arr = as_vector(w)
    if n is not None and arr.size != n:
        raise DimensionError(f"Weight vector has length {arr.size}, expected {n}")
    if np.any(arr < -WEIGHT_TOL):
        raise DomainError("Weights must be nonnegative")
    total = math.fsum(arr)
    if abs(total - 1.0) > WEIGHT_TOL * max(1, arr.size):
        raise DomainError(f"Weights must sum to 1, got {total!r}")
    return np.clip(arr, 0.0, None)


def _check_unit_interval(x: np.ndarray, what: str) -> None:
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{what} requires arguments in [0, 1]")


# ---------------------------------------------------------------------------
# Summation and ordering


def kahan_sum(x: ArrayLike) -> float:
    """Compensated (Kahan-Babuska) summation"""
    values = as_vector(x)
    total = 0.0
    compensation = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            compensation += (total - t) + v
        else:
            compensation += (v - t) + total
        total = t
    return total + compensation


def ordering_permutation(x: ArrayLike) -> np.ndarray:
    """Stable 0-based permutation that sorts x nondecreasingly"""
    return np.argsort(as_vector(x), kind="stable")


def random_permutation(n: int, seed: Optional[int] = None) -> np.ndarray:
    """Fisher-Yates shuffle of 0..n-1"""
    if n < 0:
        raise DomainError("Permutation size must be nonnegative")
    rng = np.random.default_rng(seed)
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def is_comonotonic(x: ArrayLike, y: ArrayLike) -> Tuple[bool, Optional[np.ndarray]]:
    """Check whether one permutation sorts both vectors; return it if so"""
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != yv.size:
        raise DimensionError(f"Length mismatch: {xv.size} vs {yv.size}")
    # primary key x, ties resolved by y, then by index
    sigma = np.lexsort((np.arange(xv.size), yv, xv))
    if np.all(np.diff(yv[sigma]) >= 0):
        return True, sigma
    return False, None


def fold(binary: Callable[[float, float], float], x: ArrayLike) -> float:
    """Left fold of a binary function over x"""
    values = as_vector(x)
    result = float(values[0])
    for v in values[1:]:
        result = binary(result, float(v))
    return result


# ---------------------------------------------------------------------------
# Means


class MeanKind(Enum):
    AMEAN = "amean"
    QMEAN = "qmean"
    HMEAN = "hmean"
    GMEAN = "gmean"
    PMEAN = "pmean"
    EMEAN = "emean"
    MEDIAN = "median"
    MIN = "min"
    MAX = "max"
    SUM = "sum"
    PROD = "prod"
    LUKASIEWICZ_TNORM = "lukasiewicz_tnorm"
    LUKASIEWICZ_TCONORM = "lukasiewicz_tconorm"
    DRASTIC_TCONORM = "drastic_tconorm"
    MODE = "mode"
    THREE_PI = "three_pi"
    OS = "os"


_PARAMETRIZED = {MeanKind.PMEAN, MeanKind.EMEAN, MeanKind.OS}
_SPEC_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*$")


@dataclass(frozen=True)
class MeanSpec:
    """Fusion function selector with its parameter"""
    kind: MeanKind
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind in _PARAMETRIZED and self.param is None:
            raise DomainError(f"{self.kind.value} requires a parameter")
        if self.kind == MeanKind.PMEAN and self.param == 0:
            raise DomainError("pmean exponent must be nonzero")
        if self.kind == MeanKind.EMEAN and self.param == 0:
            raise DomainError("emean parameter must be nonzero")
        if self.kind == MeanKind.OS and (self.param < 1 or int(self.param) != self.param):
            raise DomainError("os(k) requires a positive integer k")

    @classmethod
    def parse(cls, text: str) -> "MeanSpec":
        """Parse strings such as 'amean', 'pmean(2)' or 'os(3)'"""
        match = _SPEC_PATTERN.match(text)
        if not match:
            raise DomainError(f"Cannot parse mean specification: {text!r}")
        name, param = match.groups()
        try:
            kind = MeanKind(name)
        except ValueError:
            raise DomainError(f"Unknown mean kind: {name}")
        return cls(kind, float(param) if param is not None else None)


def median(x: ArrayLike) -> float:
    values = np.sort(as_vector(x))
    n = values.size
    return 0.5 * (values[(n + 1) // 2 - 1] + values[(n + 2) // 2 - 1])


def mode(x: ArrayLike) -> float:
    """Most frequent value; ties go to the smallest one"""
    values, counts = np.unique(as_vector(x), return_counts=True)
    return float(values[np.argmax(counts)])


def three_pi(x: ArrayLike) -> float:
    values = as_vector(x)
    _check_unit_interval(values, "three_pi")
    p = float(np.prod(values))
    q = float(np.prod(1.0 - values))
    if p + q == 0.0:
        return 0.0
    return p / (p + q)


def log_sum_exp(x: ArrayLike) -> float:
    """log(sum(exp(x))), evaluated stably"""
    values = as_vector(x)
    top = float(np.max(values))
    return top + math.log(math.fsum(np.exp(values - top)))


def aggregate(spec: Union[MeanSpec, str], x: ArrayLike) -> float:
    """Evaluate a fusion function given by its MeanSpec"""
    if isinstance(spec, str):
        spec = MeanSpec.parse(spec)
    values = as_vector(x)
    n = values.size
    kind = spec.kind

    if kind == MeanKind.AMEAN:
        return kahan_sum(values) / n
    if kind == MeanKind.QMEAN:
        return math.sqrt(kahan_sum(values ** 2) / n)
    if kind == MeanKind.HMEAN:
        if np.any(values <= 0):
            raise DomainError("hmean requires positive inputs")
        return n / kahan_sum(1.0 / values)
    if kind == MeanKind.GMEAN:
        if np.any(values <= 0):
            raise DomainError("gmean requires positive inputs")
        return math.exp(kahan_sum(np.log(values)) / n)
    if kind == MeanKind.PMEAN:
        r = spec.param
        if np.any(values < 0) or (r < 0 and np.any(values == 0)):
            raise DomainError(f"pmean({r}) requires {'positive' if r < 0 else 'nonnegative'} inputs")
        return (kahan_sum(values ** r) / n) ** (1.0 / r)
    if kind == MeanKind.EMEAN:
        gamma = spec.param
        return (log_sum_exp(gamma * values) - math.log(n)) / gamma
    if kind == MeanKind.MEDIAN:
        return median(values)
    if kind == MeanKind.MIN:
        return float(np.min(values))
    if kind == MeanKind.MAX:
        return float(np.max(values))
    if kind == MeanKind.SUM:
        return kahan_sum(values)
    if kind == MeanKind.PROD:
        return float(np.prod(values))
    if kind == MeanKind.LUKASIEWICZ_TNORM:
        _check_unit_interval(values, "lukasiewicz_tnorm")
        return max(0.0, kahan_sum(values) - n + 1.0)
    if kind == MeanKind.LUKASIEWICZ_TCONORM:
        _check_unit_interval(values, "lukasiewicz_tconorm")
        return min(1.0, kahan_sum(values))
    if kind == MeanKind.DRASTIC_TCONORM:
        _check_unit_interval(values, "drastic_tconorm")
        return float(np.max(values)) if np.count_nonzero(values) <= 1 else 1.0
    if kind == MeanKind.MODE:
        return mode(values)
    if kind == MeanKind.THREE_PI:
        return three_pi(values)
    if kind == MeanKind.OS:
        k = int(spec.param)
        if k > n:
            raise DomainError(f"os({k}) requires at least {k} inputs")
        return float(np.sort(values)[k - 1])
    raise DomainError(f"Unsupported mean kind: {kind}")


# ---------------------------------------------------------------------------
# Quasi-arithmetic means


@dataclass(frozen=True)
class Generator:
    """Generator of a quasi-arithmetic mean: phi, its inverse and the inverse's derivative"""
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    inverse_derivative: Callable[[np.ndarray], np.ndarray]
    domain_check: Callable[[np.ndarray], bool]
    domain_text: str

    def validate(self, x: np.ndarray) -> None:
        if not self.domain_check(np.asarray(x, dtype=float)):
            raise DomainError(f"Generator {self.name} requires {self.domain_text}")


def get_generator(name: str, param: Optional[float] = None) -> Generator:
    """Build one of the standard quasi-arithmetic mean generators"""
    if name == "identity":
        return Generator("identity", lambda x: x, lambda z: z, lambda z: np.ones_like(z),
                         lambda x: True, "real inputs")
    if name == "square":
        return Generator("square", lambda x: x ** 2, np.sqrt, lambda z: 0.5 / np.sqrt(z),
                         lambda x: bool(np.all(x >= 0)), "nonnegative inputs")
    if name == "reciprocal":
        return Generator("reciprocal", lambda x: 1.0 / x, lambda z: 1.0 / z, lambda z: -1.0 / z ** 2,
                         lambda x: bool(np.all(x > 0)), "positive inputs")
    if name == "log":
        return Generator("log", np.log, np.exp, np.exp,
                         lambda x: bool(np.all(x > 0)), "positive inputs")
    if name == "power":
        if param is None or param == 0:
            raise DomainError("power generator requires a nonzero exponent")
        r = float(param)
        check = (lambda x: bool(np.all(x > 0))) if r < 0 else (lambda x: bool(np.all(x >= 0)))
        return Generator(f"power({r:g})", lambda x: x ** r, lambda z: z ** (1.0 / r),
                         lambda z: (1.0 / r) * z ** (1.0 / r - 1.0), check,
                         "positive inputs" if r < 0 else "nonnegative inputs")
    if name == "exp":
        if param is None or param == 0:
            raise DomainError("exp generator requires a nonzero parameter")
        g = float(param)
        return Generator(f"exp({g:g})", lambda x: np.exp(g * x), lambda z: np.log(z) / g,
                         lambda z: 1.0 / (g * z), lambda x: True, "real inputs")
    raise DomainError(f"Unknown generator: {name}")


def wqam(phi: Union[Generator, str], w: ArrayLike, x: ArrayLike) -> float:
    """Weighted quasi-arithmetic mean phi^-1(sum w_i phi(x_i))"""
    gen = get_generator(phi) if isinstance(phi, str) else phi
    values = as_vector(x)
    weights = as_weights(w)
    if weights.size != values.size:
        raise DimensionError(f"Length mismatch: {weights.size} weights for {values.size} inputs")
    gen.validate(values)
    return float(gen.inverse(np.dot(weights, gen.phi(values))))


def owa(w: ArrayLike, x: ArrayLike) -> float:
    """Ordered weighted average; w_i multiplies the i-th smallest input"""
    values = as_vector(x)
    weights = as_weights(w)
    if weights.size != values.size:
        raise DimensionError(f"Length mismatch: {weights.size} weights for {values.size} inputs")
    return float(np.dot(weights, np.sort(values, kind="stable")))


def _check_trim(k: int, n: int) -> None:
    if k < 0 or k > n // 2 - 1:
        raise DomainError(f"Trimming count k={k} out of range for n={n}")


def trimmed_mean(k: int, x: ArrayLike) -> float:
    values = np.sort(as_vector(x))
    n = values.size
    _check_trim(k, n)
    return kahan_sum(values[k:n - k]) / (n - 2 * k)


def winsorized_mean(k: int, x: ArrayLike) -> float:
    values = np.sort(as_vector(x))
    n = values.size
    _check_trim(k, n)
    # O(n) via the sum of the kept block plus the replicated boundary values
    return (kahan_sum(values[k:n - k]) + k * values[k] + k * values[n - k - 1]) / n


def quantile(qtype: int, alpha: float, x: ArrayLike) -> float:
    """Sample quantile of the given type (1..9)"""
    if qtype not in range(1, 10):
        raise DomainError(f"Quantile type must be in 1..9, got {qtype}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    values = np.sort(as_vector(x))
    n = values.size

    def order_stat(j: int) -> float:
        # 1-based, clamped to Min/Max
        return float(values[min(max(j, 1), n) - 1])

    na = n * alpha
    if qtype <= 3:
        m = -0.5 if qtype == 3 else 0.0
        j = math.floor(na + m)
        g = na + m - j
        if qtype == 1:
            gamma = 1.0 if g > 0 else 0.0
        elif qtype == 2:
            gamma = 1.0 if g > 0 else 0.5
        else:
            gamma = 0.0 if (g == 0 and j % 2 == 0) else 1.0
    else:
        m = {4: 0.0, 5: 0.5, 6: alpha, 7: 1.0 - alpha,
             8: (alpha + 1.0) / 3.0, 9: alpha / 4.0 + 3.0 / 8.0}[qtype]
        j = math.floor(na + m)
        gamma = na + m - j
    if gamma == 0.0:
        return order_stat(j)
    return (1.0 - gamma) * order_stat(j) + gamma * order_stat(j + 1)


def gini_mean(p: float, q: float, w: ArrayLike, x: ArrayLike) -> float:
    """Weighted Gini mean with exponents p and q"""
    values = as_vector(x)
    weights = as_weights(w)
    if weights.size != values.size:
        raise DimensionError(f"Length mismatch: {weights.size} weights for {values.size} inputs")
    if np.any(values <= 0):
        raise DomainError("gini_mean requires positive inputs")
    if p != q:
        num = kahan_sum(weights * values ** p)
        den = kahan_sum(weights * values ** q)
        return (num / den) ** (1.0 / (p - q))
    wp = weights * values ** p
    return math.exp(kahan_sum(wp * np.log(values)) / kahan_sum(wp))


# ---------------------------------------------------------------------------
# Weighting triangles


@dataclass(frozen=True)
class CoefSequence:
    """Triangle row from a coefficient sequence: w_i = c_i / sum_{j<=n} c_j"""
    coefficients: Union[Sequence[float], Callable[[int], float]]


@dataclass(frozen=True)
class GeneratorFn:
    """Triangle row from a nondecreasing w on [0,1]: w(i/n) - w((i-1)/n)"""
    fn: Callable[[float], float]


def _triangle_preset(name: str, n: int) -> np.ndarray:
    if name == "uniform":
        return np.full(n, 1.0 / n)
    if name == "pascal":
        row = np.array([math.comb(n - 1, i) for i in range(n)], dtype=float)
        return row / 2.0 ** (n - 1)
    if name == "median":
        row = np.zeros(n)
        if n % 2:
            row[n // 2] = 1.0
        else:
            row[n // 2 - 1] = row[n // 2] = 0.5
        return row
    raise DomainError(f"Unknown weighting triangle preset: {name}")


def weighting_triangle(scheme: Union[CoefSequence, GeneratorFn, str], n: int) -> np.ndarray:
    """Row n of a weighting triangle"""
    if n < 1:
        raise DomainError("Triangle row index must be positive")
    if isinstance(scheme, str):
        return _triangle_preset(scheme, n)

    if isinstance(scheme, CoefSequence):
        coefs = scheme.coefficients
        c = np.array([coefs(i) for i in range(1, n + 1)] if callable(coefs) else list(coefs)[:n], dtype=float)
        if c.size < n:
            raise DomainError(f"Coefficient sequence shorter than n={n}")
        if np.any(c < 0):
            raise DomainError("Triangle coefficients must be nonnegative")
        first_two = c[:2].sum() if n >= 2 else c[0]
        if first_two <= 0:
            raise DomainError("Triangle coefficients need c_1 + c_2 > 0")
        return c / c.sum()

    if isinstance(scheme, GeneratorFn):
        grid = np.array([scheme.fn(i / n) for i in range(n + 1)], dtype=float)
        if abs(grid[0]) > WEIGHT_TOL or abs(grid[-1] - 1.0) > WEIGHT_TOL:
            raise DomainError("Triangle generator must satisfy w(0)=0 and w(1)=1")
        row = np.diff(grid)
        if np.any(row < -WEIGHT_TOL):
            raise DomainError("Triangle generator must be nondecreasing")
        return np.clip(row, 0.0, None)

    raise DomainError(f"Unsupported weighting triangle scheme: {scheme!r}")


def extended_owa(scheme: Union[CoefSequence, GeneratorFn, str], x: ArrayLike) -> float:
    """OWA operator for inputs of any length, weights from a triangle row"""
    values = as_vector(x)
    return owa(weighting_triangle(scheme, values.size), values)


# ---------------------------------------------------------------------------
# Connectives


class ConnectiveFamily(Enum):
    TNORM = "tnorm"
    TCONORM = "tconorm"
    COPULA = "copula"
    IMPLICATION = "implication"
    UNINORM = "uninorm"


def _drastic_t(x, y):
    return min(x, y) if (x == 1.0 or y == 1.0) else 0.0


def _drastic_s(x, y):
    return max(x, y) if (x == 0.0 or y == 0.0) else 1.0


def _clayton(theta):
    def c(x, y):
        if theta > 0 and (x == 0.0 or y == 0.0):
            return 0.0
        base = max(x ** -theta + y ** -theta - 1.0, 0.0)
        if base == 0.0:
            return 0.0
        return base ** (-1.0 / theta)
    return c


def _gumbel(theta):
    def c(x, y):
        if x == 0.0 or y == 0.0:
            return 0.0
        s = (-math.log(x)) ** theta + (-math.log(y)) ** theta
        return math.exp(-s ** (1.0 / theta))
    return c


def _frank(theta):
    def c(x, y):
        num = math.expm1(-theta * x) * math.expm1(-theta * y)
        return -math.log1p(num / math.expm1(-theta)) / theta
    return c


def _three_pi2(x, y):
    p = x * y
    q = (1.0 - x) * (1.0 - y)
    return 0.0 if p + q == 0.0 else p / (p + q)


_TNORMS = {
    "min": min,
    "prod": lambda x, y: x * y,
    "lukasiewicz": lambda x, y: max(x + y - 1.0, 0.0),
    "drastic": _drastic_t,
    "fodor": lambda x, y: min(x, y) if x + y > 1.0 else 0.0,
}

_TCONORMS = {
    "max": max,
    "prod": lambda x, y: x + y - x * y,
    "lukasiewicz": lambda x, y: min(x + y, 1.0),
    "drastic": _drastic_s,
    "fodor": lambda x, y: 1.0 if x + y >= 1.0 else max(x, y),
}

_IMPLICATIONS = {
    "minimal": lambda x, y: 1.0 if (x == 0.0 or y == 1.0) else 0.0,
    "maximal": lambda x, y: 0.0 if (x == 1.0 and y == 0.0) else 1.0,
    "kleene_dienes": lambda x, y: max(1.0 - x, y),
    "lukasiewicz": lambda x, y: min(1.0 - x + y, 1.0),
    "reichenbach": lambda x, y: 1.0 - x + x * y,
    "fodor": lambda x, y: 1.0 if x <= y else max(1.0 - x, y),
    "goguen": lambda x, y: 1.0 if x <= y else y / x,
    "goedel": lambda x, y: 1.0 if x <= y else y,
    "rescher": lambda x, y: 1.0 if x <= y else 0.0,
    "weber": lambda x, y: 1.0 if x < 1.0 else y,
    "yager": lambda x, y: 1.0 if (x == 0.0 and y == 0.0) else y ** x,
}


@dataclass(frozen=True)
class ConnectiveSpec:
    """Fuzzy logic connective selector"""
    family: ConnectiveFamily
    name: str
    theta: Optional[float] = None

    def __post_init__(self):
        if self.family == ConnectiveFamily.COPULA:
            if self.name not in ("clayton", "gumbel", "frank"):
                raise DomainError(f"Unknown copula: {self.name}")
            t = self.theta
            if t is None:
                raise DomainError(f"Copula {self.name} requires theta")
            if self.name == "clayton" and (t < -1 or t == 0):
                raise DomainError("Clayton copula requires theta >= -1, theta != 0")
            if self.name == "gumbel" and t < 1:
                raise DomainError("Gumbel copula requires theta >= 1")
            if self.name == "frank" and t == 0:
                raise DomainError("Frank copula requires theta != 0")
        else:
            table = self._table()
            if self.name not in table:
                raise DomainError(f"Unknown {self.family.value}: {self.name}")

    def _table(self) -> Dict[str, Callable[[float, float], float]]:
        return {
            ConnectiveFamily.TNORM: _TNORMS,
            ConnectiveFamily.TCONORM: _TCONORMS,
            ConnectiveFamily.IMPLICATION: _IMPLICATIONS,
            ConnectiveFamily.UNINORM: {"three_pi": _three_pi2},
        }.get(self.family, {})

    def binary(self) -> Callable[[float, float], float]:
        if self.family == ConnectiveFamily.COPULA:
            return {"clayton": _clayton, "gumbel": _gumbel, "frank": _frank}[self.name](float(self.theta))
        return self._table()[self.name]

    @property
    def associative(self) -> bool:
        return self.family in (ConnectiveFamily.TNORM, ConnectiveFamily.TCONORM, ConnectiveFamily.UNINORM)


def connective(spec: ConnectiveSpec, x: float, y: float) -> float:
    """Evaluate a binary connective on [0,1]^2"""
    for v in (x, y):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"Connective arguments must lie in [0, 1], got {v}")
    return float(spec.binary()(float(x), float(y)))


def connective_nary(spec: ConnectiveSpec, x: ArrayLike) -> float:
    """n-ary extension of an associative connective by left fold"""
    if not spec.associative:
        raise DomainError(f"{spec.family.value} {spec.name} is not associative")
    values = as_vector(x)
    _check_unit_interval(values, spec.name)
    return fold(spec.binary(), values)


# ---------------------------------------------------------------------------
# Randomized property falsification


class Property(Enum):
    NONDECREASING = "nondecreasing"
    IDEMPOTENT = "idempotent"
    STRONGLY_IDEMPOTENT = "strongly_idempotent"
    INTERNAL = "internal"
    SYMMETRIC = "symmetric"
    TRANSLATION_EQUIVARIANT = "translation_equivariant"
    SCALE_EQUIVARIANT = "scale_equivariant"
    WEAKLY_MONOTONE = "weakly_monotone"
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


@dataclass(frozen=True)
class Sampler:
    """Input generator for property checks"""
    n: int = 3
    low: float = 0.0
    high: float = 1.0
    integer: bool = False

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        if self.integer:
            return rng.integers(int(self.low), int(self.high) + 1, size=self.n).astype(float)
        return rng.uniform(self.low, self.high, size=self.n)


@dataclass
class PropertyCase:
    """Concrete inputs for one property check"""
    x: List[float]
    other: Optional[List[float]] = None
    shift: Optional[float] = None


@dataclass
class Verdict:
    """Outcome of a falsification run"""
    prop: Property
    trials: int
    counterexample: Optional[PropertyCase] = None

    @property
    def holds(self) -> bool:
        return self.counterexample is None


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= IDEMPOTENCE_RTOL * max(1.0, abs(a), abs(b))


def check_case(fn: Callable[[np.ndarray], float], prop: Property, case: PropertyCase) -> bool:
    """Evaluate a property on a concrete case; True if the property holds there"""
    x = np.asarray(case.x, dtype=float)
    fx = fn(x)
    if prop == Property.NONDECREASING:
        return fn(np.asarray(case.other, dtype=float)) >= fx - IDEMPOTENCE_RTOL * max(1.0, abs(fx))
    if prop == Property.IDEMPOTENT:
        return _close(fx, float(x[0]))
    if prop == Property.STRONGLY_IDEMPOTENT:
        return all(_close(fn(np.tile(x, k)), fx) for k in (2, 3))
    if prop == Property.INTERNAL:
        slack = IDEMPOTENCE_RTOL * max(1.0, float(np.max(np.abs(x))))
        return float(np.min(x)) - slack <= fx <= float(np.max(x)) + slack
    if prop == Property.SYMMETRIC:
        return _close(fn(np.asarray(case.other, dtype=float)), fx)
    if prop == Property.TRANSLATION_EQUIVARIANT:
        return _close(fn(x + case.shift), fx + case.shift)
    if prop == Property.SCALE_EQUIVARIANT:
        return _close(fn(x * case.shift), fx * case.shift)
    if prop == Property.WEAKLY_MONOTONE:
        return fn(x + case.shift) >= fx - IDEMPOTENCE_RTOL * max(1.0, abs(fx))
    if prop == Property.CONJUNCTIVE:
        return fx <= float(np.min(x)) + IDEMPOTENCE_RTOL * max(1.0, abs(fx))
    if prop == Property.DISJUNCTIVE:
        return fx >= float(np.max(x)) - IDEMPOTENCE_RTOL * max(1.0, abs(fx))
    raise DomainError(f"Unsupported property: {prop}")


def _make_case(prop: Property, sampler: Sampler, rng: np.random.Generator) -> PropertyCase:
    x = sampler.draw(rng)
    span = sampler.high - sampler.low
    if prop == Property.NONDECREASING:
        other = x.copy()
        i = int(rng.integers(0, sampler.n))
        bump = rng.uniform(0.0, sampler.high - x[i])
        other[i] += math.ceil(bump) if sampler.integer else bump
        return PropertyCase(x.tolist(), other.tolist())
    if prop == Property.IDEMPOTENT:
        c = float(sampler.draw(rng)[0])
        return PropertyCase([c] * sampler.n)
    if prop == Property.SYMMETRIC:
        return PropertyCase(x.tolist(), x[rng.permutation(sampler.n)].tolist())
    if prop in (Property.TRANSLATION_EQUIVARIANT, Property.WEAKLY_MONOTONE):
        return PropertyCase(x.tolist(), shift=float(rng.uniform(0.0, span)))
    if prop == Property.SCALE_EQUIVARIANT:
        return PropertyCase(x.tolist(), shift=float(rng.uniform(0.0, 2.0)))
    return PropertyCase(x.tolist())


def falsify_property(fn: Callable[[np.ndarray], float], prop: Union[Property, str],
                     sampler: Optional[Sampler] = None, trials: int = 1000,
                     seed: Optional[int] = None) -> Verdict:
    """Search for a counterexample to a property by random sampling"""
    if isinstance(prop, str):
        prop = Property(prop)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    sampler = sampler or Sampler()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        case = _make_case(prop, sampler, rng)
        try:
            ok = check_case(fn, prop, case)
        except (DomainError, ValueError, ZeroDivisionError, OverflowError) as e:
            logger.debug(f"Skipping case outside the function's domain: {e}")
            continue
        if not ok:
            logger.info(f"Property {prop.value} falsified after {t + 1} trials")
            return Verdict(prop, t + 1, case)
    return Verdict(prop, trials)
