"""
Numerical Characteristics

Spread measures and the spread preorder, relative spread, shape measures,
Lorenz dominance, orness/andness/average orness estimated by Monte Carlo,
weighting-vector entropy, an empirical breakdown probe and the circular mean.
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .core import ArrayLike, as_vector, as_weights, is_comonotonic, median, quantile
from .errors import DimensionError, DomainError
from .fusion_config import get_fusion_config

logger = logging.getLogger(__name__)

MAD_SCALE = 1.4826
SUBSET_SCAN_LIMIT = 20
COMPARE_TOL = 1e-12


@dataclass
class Comparison:
    """Outcome of a relation check; truthy when the relation holds"""
    holds: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


# ---------------------------------------------------------------------------
# Spread


class SpreadKind(Enum):
    VAR = "var"
    SD = "sd"
    RANGE = "range"
    IQR = "iqr"
    MAD = "mad"
    MEAN_ERROR = "mean_error"
    GINI_MD = "gini_md"
    WD2WAM = "wd2wam"
    WD1WAM = "wd1wam"
    WDINFWAM = "wdinfwam"
    NWD2WAM = "nwd2wam"
    NWD1WAM = "nwd1wam"


WEIGHTED_KINDS = {SpreadKind.WD2WAM, SpreadKind.WD1WAM, SpreadKind.WDINFWAM,
                  SpreadKind.NWD2WAM, SpreadKind.NWD1WAM}


@dataclass(frozen=True)
class SpreadSpec:
    kind: SpreadKind
    weights: Optional[Tuple[float, ...]] = None
    bounds: Tuple[float, float] = (0.0, 1.0)
    qtype: int = 7

    def __post_init__(self):
        object.__setattr__(self, "kind", SpreadKind(self.kind))
        if self.kind in WEIGHTED_KINDS:
            if self.weights is None:
                raise DomainError(f"Spread kind '{self.kind.value}' requires weights")
            object.__setattr__(self, "weights", tuple(as_weights(self.weights)))
        if not self.bounds[0] < self.bounds[1]:
            raise DomainError("Spread bounds must satisfy a < b")


def nwd_normalizer(w: ArrayLike) -> Tuple[float, Tuple[int, ...], bool]:
    """Largest subset weight sum not exceeding 1/2, its subset and whether it is exact"""
    ww = as_weights(w)
    n = ww.size
    if n <= SUBSET_SCAN_LIMIT:
        reachable = {0.0: ()}
        for i, wi in enumerate(ww):
            for s, subset in list(reachable.items()):
                t = s + wi
                if t <= 0.5 + COMPARE_TOL and t not in reachable:
                    reachable[t] = subset + (i,)
        p = max(reachable)
        return min(p, 0.5), reachable[p], True
    logger.warning(f"nwd normalizer: greedy subset for n={n}, value is approximate")
    total, chosen = 0.0, []
    for i in np.argsort(-ww, kind="stable"):
        if total + ww[i] <= 0.5 + COMPARE_TOL:
            total += ww[i]
            chosen.append(int(i))
    return min(total, 0.5), tuple(sorted(chosen)), False


def _gini_md(x: np.ndarray) -> float:
    n = x.size
    if n < 2:
        return 0.0
    xs = np.sort(x)
    # sum over pairs of |x_i - x_k| via sorted ranks
    coef = 2 * np.arange(1, n + 1) - n - 1
    return float(2 * np.sum(coef * xs) / (n * (n - 1)))


def spread(spec: Union[SpreadSpec, str], x: ArrayLike) -> float:
    if isinstance(spec, str):
        spec = SpreadSpec(SpreadKind(spec))
    values = as_vector(x)
    n = values.size
    kind = spec.kind
    if kind in (SpreadKind.VAR, SpreadKind.SD) and n < 2:
        raise DomainError(f"{kind.value} requires at least two values")
    if kind == SpreadKind.VAR:
        return float(np.var(values, ddof=1))
    if kind == SpreadKind.SD:
        return float(np.std(values, ddof=1))
    if kind == SpreadKind.RANGE:
        return float(np.max(values) - np.min(values))
    if kind == SpreadKind.IQR:
        return quantile(spec.qtype, 0.75, values) - quantile(spec.qtype, 0.25, values)
    if kind == SpreadKind.MAD:
        return MAD_SCALE * median(np.abs(values - median(values)))
    if kind == SpreadKind.MEAN_ERROR:
        return float(math.sqrt(math.pi / 2) * np.mean(np.abs(values - np.mean(values))))
    if kind == SpreadKind.GINI_MD:
        return _gini_md(values)

    w = np.asarray(spec.weights)
    if w.size != n:
        raise DimensionError(f"Weights have length {w.size}, input has {n}")
    dev = values - float(np.dot(w, values))
    if kind == SpreadKind.WD2WAM:
        return float(np.dot(w, dev ** 2))
    if kind == SpreadKind.WD1WAM:
        return float(np.dot(w, np.abs(dev)))
    if kind == SpreadKind.WDINFWAM:
        return float(np.max(np.abs(dev)))

    a, b = spec.bounds
    if np.any(values < a) or np.any(values > b):
        raise DomainError(f"Normalized spread requires inputs in [{a}, {b}]")
    p, _, _ = nwd_normalizer(w)
    if p <= 0:
        return 0.0
    if kind == SpreadKind.NWD2WAM:
        return float(math.sqrt(max(0.0, np.dot(w, dev ** 2))) / ((b - a) * math.sqrt(p * (1 - p))))
    return float(np.dot(w, np.abs(dev)) / (2 * p * (1 - p) * (b - a)))


def diff_sorted(x: ArrayLike) -> np.ndarray:
    values = as_vector(x)
    return np.diff(np.sort(values))


def cumsum(x: ArrayLike) -> np.ndarray:
    return np.cumsum(as_vector(x))


def spread_leq(x: ArrayLike, y: ArrayLike) -> bool:
    """x has no greater absolute spread than y: comonotonic, with dominated gaps"""
    xv, yv = as_vector(x), as_vector(y)
    if xv.size != yv.size:
        raise DimensionError(f"Length mismatch: {xv.size} vs {yv.size}")
    ok, sigma = is_comonotonic(xv, yv)
    if not ok:
        return False
    dx, dy = np.diff(xv[sigma]), np.diff(yv[sigma])
    scale = max(1.0, float(np.max(np.abs(xv))), float(np.max(np.abs(yv))))
    return bool(np.all(dx <= dy + COMPARE_TOL * scale))


def gen_spread_pair(n: int, seed: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Random pair x, y in [0, 1]^n with x of no greater spread than y"""
    if n < 1:
        raise DomainError("n must be positive")
    rng = np.random.default_rng(seed)
    gaps_y = rng.random(n - 1)
    if n > 1:
        gaps_y *= rng.random() / max(1.0, float(np.sum(gaps_y)))
    gaps_x = gaps_y * rng.random(n - 1)
    start_y = rng.random() * (1.0 - float(np.sum(gaps_y)))
    start_x = rng.random() * (1.0 - float(np.sum(gaps_x)))
    sorted_y = np.cumsum(np.concatenate(([start_y], gaps_y)))
    sorted_x = np.cumsum(np.concatenate(([start_x], gaps_x)))
    sigma = rng.permutation(n)
    x, y = np.empty(n), np.empty(n)
    x[sigma] = sorted_x
    y[sigma] = sorted_y
    return x, y


class RelativeKind(Enum):
    GINI = "gini"
    CV = "cv"


def relative(kind: Union[RelativeKind, str], x: ArrayLike) -> float:
    """Unit-free spread: Gini coefficient or coefficient of variation"""
    kind = RelativeKind(kind)
    values = as_vector(x)
    mean = float(np.mean(values))
    if mean == 0:
        raise DomainError("Relative spread requires a nonzero mean")
    if kind == RelativeKind.GINI:
        return _gini_md(values) / (2 * mean)
    if values.size < 2:
        raise DomainError("Coefficient of variation requires at least two values")
    return float(np.std(values, ddof=1)) / mean


def shape(kind: str, x: ArrayLike) -> float:
    values = as_vector(x)
    if values.size < 2:
        raise DomainError("Shape measures require at least two values")
    dev = values - np.mean(values)
    m2 = float(np.mean(dev ** 2))
    if m2 == 0:
        raise DomainError("Shape measures require nonzero variance")
    if kind == "skewness":
        s2 = float(np.sum(dev ** 2)) / (values.size - 1)
        return float(np.mean(dev ** 3)) / s2 ** 1.5
    if kind == "kurtosis":
        return float(np.mean(dev ** 4)) / m2 ** 2 - 3.0
    raise DomainError(f"Unknown shape measure '{kind}'")


def lorenz_leq(x: ArrayLike, y: ArrayLike) -> Comparison:
    """Lorenz majorization of x by y; both need equal length and equal means"""
    xv, yv = as_vector(x), as_vector(y)
    if xv.size != yv.size:
        raise DimensionError(f"Length mismatch: {xv.size} vs {yv.size}")
    if abs(float(np.mean(xv)) - float(np.mean(yv))) > 1e-9:
        return Comparison(False, "means differ")
    cx = np.cumsum(np.sort(xv)[::-1])
    cy = np.cumsum(np.sort(yv)[::-1])
    scale = max(1.0, float(np.max(np.abs(cy))))
    if np.all(cx <= cy + 1e-12 * scale):
        return Comparison(True)
    return Comparison(False, "partial sums exceed")


# ---------------------------------------------------------------------------
# Orness


@dataclass
class MonteCarloEstimate:
    value: float
    stderr: float
    samples: int


def _mc_draws(fn: Callable[[np.ndarray], float], n: int, m: Optional[int], seed: Optional[int]):
    if n < 1:
        raise DomainError("n must be positive")
    if m is None:
        m = get_fusion_config().get_monte_carlo_config()["samples"]
    if m < 2:
        raise DomainError("At least two Monte Carlo samples are required")
    rng = np.random.default_rng(seed)
    X = rng.random((m, n))
    return X, np.array([fn(row) for row in X], dtype=float)


def _estimate(values: np.ndarray) -> MonteCarloEstimate:
    return MonteCarloEstimate(float(np.mean(values)),
                              float(np.std(values, ddof=1) / math.sqrt(values.size)),
                              values.size)


def average_value(fn: Callable[[np.ndarray], float], n: int, m: Optional[int] = None,
                  seed: Optional[int] = None) -> MonteCarloEstimate:
    """Expected value of fn over the uniform distribution on [0, 1]^n"""
    _, values = _mc_draws(fn, n, m, seed)
    return _estimate(values)


def owa_orness(w: ArrayLike) -> float:
    """Exact orness of an OWA operator; w[0] weighs the smallest input"""
    ww = as_weights(w)
    n = ww.size
    if n < 2:
        raise DomainError("Orness needs n >= 2")
    return float(np.dot(np.arange(n) / (n - 1), ww))


def orness(fn: Callable[[np.ndarray], float], n: int, m: Optional[int] = None,
           seed: Optional[int] = None) -> MonteCarloEstimate:
    """Monte Carlo orness: (E[F] - 1/(n+1)) / ((n-1)/(n+1))"""
    if n < 2:
        raise DomainError("Orness needs n >= 2")
    est = average_value(fn, n, m, seed)
    scale = (n - 1) / (n + 1)
    value = (est.value - 1 / (n + 1)) / scale
    logger.debug(f"orness estimate {value:.6f} (n={n}, m={est.samples})")
    return MonteCarloEstimate(value, est.stderr / scale, est.samples)


def andness(value: float) -> float:
    return 1.0 - value


def aveorness_mc(fn: Callable[[np.ndarray], float], n: int, m: Optional[int] = None,
                 seed: Optional[int] = None) -> MonteCarloEstimate:
    """Average orness, E[(F - Min) / (Max - Min)] with 0/0 = 0"""
    X, values = _mc_draws(fn, n, m, seed)
    lo, hi = X.min(axis=1), X.max(axis=1)
    width = hi - lo
    ratio = np.divide(values - lo, width, out=np.zeros_like(values), where=width > 0)
    return _estimate(ratio)


def entropy(w: ArrayLike) -> float:
    ww = as_weights(w)
    nz = ww[ww > 0]
    return float(-np.sum(nz * np.log(nz)))


# ---------------------------------------------------------------------------
# Robustness and circular data


def breakdown_probe(fn: Callable[[np.ndarray], object], X: ArrayLike,
                    magnitude: Optional[float] = None) -> float:
    """Smallest fraction m/n of replaced observations that drives fn away

    Observations are columns of a d x n array (or entries of a vector). The
    first m of them are replaced by +magnitude; the output breaks down when it
    moves by more than sqrt(magnitude).
    """
    if magnitude is None:
        magnitude = get_fusion_config().get_monte_carlo_config()["breakdown_magnitude"]
    data = np.asarray(X, dtype=float)
    if data.size == 0:
        raise DomainError("Breakdown probe needs data")
    n = data.shape[-1]
    base = np.atleast_1d(np.asarray(fn(data), dtype=float))
    threshold = math.sqrt(magnitude)
    for m in range(1, n + 1):
        corrupted = data.copy()
        corrupted[..., :m] = magnitude
        moved = np.atleast_1d(np.asarray(fn(corrupted), dtype=float))
        if not np.all(np.isfinite(moved)) or float(np.linalg.norm(moved - base)) > threshold:
            return m / n
    return 1.0


def circ_mean(theta: ArrayLike) -> float:
    """Mean direction of angles in [-pi, pi)"""
    values = as_vector(theta)
    s, c = float(np.mean(np.sin(values))), float(np.mean(np.cos(values)))
    if math.hypot(s, c) < 1e-12:
        raise DomainError("Circular mean undefined: zero resultant length")
    return math.atan2(s, c)
