"""
Multivariate Fusion

Fusion of point clouds in R^d: centroid, componentwise median, spatial
median (Weiszfeld), medoid, Euclidean 1-center, data depths (Tukey, Liu,
Oja), the Tukey median and the orthomedian, plus random orthogonal matrices.
Clouds are d x n matrices whose columns are observations.
"""

import csv
import math
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import as_weights
from .errors import DimensionError, DomainError, InputFormatError, SolveStatus, SolverError
from .fusion_config import get_fusion_config
from .optim import LpProblem, QpProblem, Relation, lp_solve, qp_solve

logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-12
ANGLE_TOL = 1e-9


@dataclass
class PointCloud:
    """d x n matrix of column observations"""
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError("PointCloud needs a nonempty d x n matrix")
        if not np.all(np.isfinite(arr)):
            raise DomainError("PointCloud entries must be finite")
        self.data = arr

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def points(self) -> List[np.ndarray]:
        return [self.data[:, i] for i in range(self.n)]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "PointCloud":
        return cls(np.asarray(rows, dtype=float).T)

    @classmethod
    def from_csv(cls, path: str, header: bool = False) -> "PointCloud":
        """One observation per row, d columns"""
        rows: List[List[float]] = []
        width = None
        with open(path, newline="") as f:
            for lineno, row in enumerate(csv.reader(f), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if header and lineno == 1:
                    continue
                if width is None:
                    width = len(row)
                elif len(row) != width:
                    raise InputFormatError(f"Expected {width} columns, got {len(row)}", line=lineno)
                try:
                    rows.append([float(cell) for cell in row])
                except ValueError:
                    bad = next(i for i, cell in enumerate(row, start=1) if not _is_number(cell))
                    raise InputFormatError(f"Not a number: {row[bad - 1]!r}", line=lineno, column=bad)
        if not rows:
            raise InputFormatError("Point cloud file has no rows", line=1)
        return cls.from_rows(rows)


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _cloud(X: Union[PointCloud, np.ndarray]) -> np.ndarray:
    return X.data if isinstance(X, PointCloud) else PointCloud(X).data


def _cloud2d(X) -> np.ndarray:
    data = _cloud(X)
    if data.shape[0] != 2:
        raise DimensionError(f"Operation requires d=2, got d={data.shape[0]}")
    return data


class MetricKind(Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    CHEBYSHEV = "chebyshev"
    MINKOWSKI = "minkowski"
    CALLBACK = "callback"


@dataclass(frozen=True)
class MetricSpec:
    kind: MetricKind = MetricKind.EUCLIDEAN
    p: float = 2.0
    callback: Optional[Callable[[np.ndarray, np.ndarray], float]] = None

    def __post_init__(self):
        if self.kind == MetricKind.MINKOWSKI and self.p < 1:
            raise DomainError("Minkowski metric requires p >= 1")
        if self.kind == MetricKind.CALLBACK and self.callback is None:
            raise DomainError("Callback metric requires a callable")

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        if self.kind == MetricKind.CALLBACK:
            return float(self.callback(a, b))
        diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if self.kind == MetricKind.EUCLIDEAN:
            return float(np.sqrt(np.sum(diff ** 2)))
        if self.kind == MetricKind.MANHATTAN:
            return float(np.sum(diff))
        if self.kind == MetricKind.CHEBYSHEV:
            return float(np.max(diff))
        return float(np.sum(diff ** self.p) ** (1.0 / self.p))


# ---------------------------------------------------------------------------
# Penalty-based medians


def centroid(X, w: Optional[Sequence[float]] = None) -> np.ndarray:
    data = _cloud(X)
    n = data.shape[1]
    weights = np.full(n, 1.0 / n) if w is None else as_weights(w, n)
    return data @ weights


def cw_median(X) -> np.ndarray:
    return np.median(_cloud(X), axis=1)


@dataclass
class WeiszfeldResult:
    point: np.ndarray
    iterations: int
    converged: bool
    message: str = ""


def weiszfeld_1median(X, w: Optional[Sequence[float]] = None, eps: float = 1e-9,
                      max_iter: Optional[int] = None) -> WeiszfeldResult:
    """Spatial median by Weiszfeld iterations started at the centroid"""
    data = _cloud(X)
    n = data.shape[1]
    weights = np.full(n, 1.0 / n) if w is None else as_weights(w, n)
    if max_iter is None:
        max_iter = get_fusion_config().get("solver", "max_iter")

    if np.all(data == data[:, :1]):
        return WeiszfeldResult(data[:, 0].copy(), 0, True, "all points coincide")

    scale = max(1.0, float(np.max(np.abs(data))))
    y = data @ weights
    for it in range(1, max_iter + 1):
        dist = np.linalg.norm(data - y[:, None], axis=0)
        k = int(np.argmin(dist))
        if dist[k] <= COLLISION_TOL * scale:
            # iterate sits on a data point: test optimality by the subgradient
            others = np.arange(n) != k
            pull = (weights[others] / dist[others]) @ (data[:, others] - y[:, None]).T
            norm = float(np.linalg.norm(pull))
            if norm <= weights[k]:
                return WeiszfeldResult(data[:, k].copy(), it, True, "optimal at a data point")
            coef = weights[others] / dist[others]
            target = data[:, others] @ coef / coef.sum()
            t = weights[k] / norm
            y_new = (1.0 - t) * target + t * data[:, k]
        else:
            coef = weights / dist
            y_new = data @ coef / coef.sum()
        step = float(np.linalg.norm(y_new - y))
        y = y_new
        logger.debug(f"Weiszfeld iteration {it}: step {step}")
        if step <= eps:
            return WeiszfeldResult(y, it, True, "step tolerance reached")

    logger.warning(f"Weiszfeld did not converge in {max_iter} iterations")
    return WeiszfeldResult(y, max_iter, False, "iteration limit reached")


def medoid(X, metric: Optional[MetricSpec] = None) -> int:
    """0-based index of the point with least total dissimilarity; ties to the smallest index"""
    metric = metric or MetricSpec()
    pts = PointCloud(_cloud(X)).points()
    n = len(pts)
    totals = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            d = metric.distance(pts[i], pts[j])
            totals[i] += d
            totals[j] += d
    return int(np.argmin(totals))


def seb_1center(X) -> Tuple[np.ndarray, float]:
    """Center and radius of the smallest enclosing Euclidean ball"""
    data = _cloud(X)
    n = data.shape[1]
    if n == 1:
        return data[:, 0].copy(), 0.0
    G = data.T @ data
    p = QpProblem(c=-np.diag(G), A=np.ones((1, n)), b=[1.0], relations=[Relation.EQ], D=2.0 * G)
    res = qp_solve(p)
    if res.status != SolveStatus.OPTIMAL:
        logger.error(f"1-center QP failed with status {res.status.value}")
        raise SolverError(f"1-center QP failed: {res.status.value}")
    v = np.clip(res.x, 0.0, None)
    center = data @ (v / v.sum())
    radius = float(np.max(np.linalg.norm(data - center[:, None], axis=0)))
    return center, radius


def in_convex_hull(y: Sequence[float], X) -> bool:
    """LP feasibility of y = X alpha, sum alpha = 1, alpha >= 0"""
    data = _cloud(X)
    y = np.asarray(y, dtype=float)
    n = data.shape[1]
    A = np.vstack([data, np.ones((1, n))])
    b = np.concatenate([y, [1.0]])
    res = lp_solve(LpProblem(c=np.zeros(n), A=A, b=b, relations=[Relation.EQ] * A.shape[0]))
    return res.status == SolveStatus.OPTIMAL


# ---------------------------------------------------------------------------
# Data depth


def _univariate_depth(proj: np.ndarray, level: float, tol: float) -> int:
    return int(min(np.sum(proj <= level + tol), np.sum(proj >= level - tol)))


def _exact_depth_2d(y: np.ndarray, data: np.ndarray) -> int:
    diff = data - y[:, None]
    scale = max(1.0, float(np.max(np.abs(data))))
    at_y = np.linalg.norm(diff, axis=0) <= COLLISION_TOL * scale
    rest = diff[:, ~at_y]
    if rest.shape[1] == 0:
        return data.shape[1]
    base = np.arctan2(rest[1], rest[0])
    crit = np.sort(np.mod(np.concatenate([base + math.pi / 2, base - math.pi / 2]), 2 * math.pi))
    # merge nearly equal critical angles
    merged = [crit[0]]
    for a in crit[1:]:
        if a - merged[-1] > ANGLE_TOL:
            merged.append(a)
    if len(merged) > 1 and merged[0] + 2 * math.pi - merged[-1] <= ANGLE_TOL:
        merged.pop()
    merged = np.array(merged)
    nxt = np.concatenate([merged[1:], [merged[0] + 2 * math.pi]])
    mids = 0.5 * (merged + nxt)
    depth = rest.shape[1] + int(np.sum(at_y))
    count_at_y = int(np.sum(at_y))
    for angle in mids:
        u = np.array([math.cos(angle), math.sin(angle)])
        depth = min(depth, count_at_y + int(np.sum(u @ rest > 0)))
    return depth


def tukey_depth(y: Sequence[float], X, mode: str = "exact2d", m: int = 2000,
                seed: Optional[int] = None) -> int:
    """Halfspace depth of y: exact for d=2, or a Monte Carlo upper bound"""
    data = _cloud(X)
    y = np.asarray(y, dtype=float)
    if y.size != data.shape[0]:
        raise DimensionError(f"Point has dimension {y.size}, cloud has d={data.shape[0]}")
    if mode == "exact2d":
        if data.shape[0] != 2:
            raise DimensionError("exact2d Tukey depth requires d=2")
        return _exact_depth_2d(y, data)
    if mode != "mc":
        raise DomainError(f"Unknown Tukey depth mode: {mode}")

    rng = np.random.default_rng(seed)
    d, n = data.shape
    tol = COLLISION_TOL * max(1.0, float(np.max(np.abs(data))))
    depth = n
    for _ in range(m):
        idx = rng.integers(0, n, size=d)
        sample = data[:, idx]
        # direction normal to the affine hull of the sample
        M = (sample[:, 1:] - sample[:, :1]).T if d > 1 else np.zeros((0, 1))
        if d > 1 and np.linalg.matrix_rank(M) < d - 1:
            continue
        if d == 1:
            u = np.ones(1)
        else:
            _, _, vt = np.linalg.svd(M)
            u = vt[-1]
        depth = min(depth, _univariate_depth(u @ data, float(u @ y), tol))
    return depth


def liu_depth(y: Sequence[float], X) -> float:
    """Fraction of closed triangles spanned by the cloud that contain y"""
    data = _cloud2d(X)
    y = np.asarray(y, dtype=float)
    n = data.shape[1]
    if n < 3:
        raise DomainError("Liu depth requires at least 3 points")
    tol = COLLISION_TOL * max(1.0, float(np.max(np.abs(data))), float(np.max(np.abs(y)))) ** 2
    inside = 0
    total = 0
    for i, j, k in combinations(range(n), 3):
        total += 1
        a, b, c = data[:, i], data[:, j], data[:, k]
        s1 = _cross(a, b, y)
        s2 = _cross(b, c, y)
        s3 = _cross(c, a, y)
        has_neg = min(s1, s2, s3) < -tol
        has_pos = max(s1, s2, s3) > tol
        if _cross(a, b, c) == 0:
            # degenerate triangle: y must lie on the segment hull
            if abs(s1) <= tol and abs(s2) <= tol and abs(s3) <= tol and _within_box(y, data[:, [i, j, k]], tol):
                inside += 1
            continue
        if not (has_neg and has_pos):
            inside += 1
    return inside / total


def _cross(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _within_box(y: np.ndarray, pts: np.ndarray, tol: float) -> bool:
    return bool(np.all(y >= pts.min(axis=1) - tol) and np.all(y <= pts.max(axis=1) + tol))


def triangle_area(a, b, c) -> float:
    """|det [[1,1,1],[a,b,c]]| / 2"""
    M = np.vstack([np.ones(3), np.column_stack([a, b, c])])
    return abs(float(np.linalg.det(M))) / 2.0


def oja_area_sum(y: Sequence[float], X) -> float:
    data = _cloud2d(X)
    y = np.asarray(y, dtype=float)
    return float(sum(triangle_area(y, data[:, i], data[:, j])
                     for i, j in combinations(range(data.shape[1]), 2)))


def oja_depth(y: Sequence[float], X) -> float:
    """1 / (1 + mean area of the triangles spanned by y and two data points)"""
    data = _cloud2d(X)
    n = data.shape[1]
    if n < 2:
        raise DomainError("Oja depth requires at least 2 points")
    return 1.0 / (1.0 + oja_area_sum(y, data) / math.comb(n, 2))


# ---------------------------------------------------------------------------
# Tukey median


@dataclass
class TukeyMedianResult:
    point: np.ndarray
    depth: int
    candidates: int
    flagged: bool = False
    message: str = ""


def convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Monotone chain hull; returns vertices counter-clockwise as rows"""
    pts = np.unique(np.round(points, 12), axis=0)
    if len(pts) <= 2:
        return pts

    def build(seq):
        chain: List[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def polygon_centroid(vertices: np.ndarray) -> np.ndarray:
    """Center of gravity of a polygon; degenerate hulls fall back to the vertex mean"""
    if len(vertices) < 3:
        return vertices.mean(axis=0)
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    if abs(area) <= COLLISION_TOL:
        return vertices.mean(axis=0)
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return np.array([cx, cy])


def _line_intersections(pts: np.ndarray) -> List[np.ndarray]:
    lines = list(combinations(range(len(pts)), 2))
    out = []
    for (a, b), (c, d) in combinations(lines, 2):
        p, r = pts[a], pts[b] - pts[a]
        q, s = pts[c], pts[d] - pts[c]
        denom = r[0] * s[1] - r[1] * s[0]
        if abs(denom) <= COLLISION_TOL:
            continue
        t = ((q[0] - p[0]) * s[1] - (q[1] - p[1]) * s[0]) / denom
        out.append(p + t * r)
    return out


def tukey_median_2d(X) -> TukeyMedianResult:
    """Center of gravity of the deepest Tukey region, over candidate vertices"""
    data = _cloud2d(X)
    pts = np.unique(data.T, axis=0)
    if len(pts) == 1:
        return TukeyMedianResult(pts[0].copy(), data.shape[1], 1)
    if len(pts) < data.shape[1]:
        logger.info(f"Tukey median: collapsed {data.shape[1] - len(pts)} duplicate points")

    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-10 * max(1.0, float(np.max(np.abs(pts))))) < 2:
        logger.warning("Tukey median: collinear input, returning the componentwise median")
        return TukeyMedianResult(cw_median(pts.T), 0, len(pts), True, "collinear input")

    candidates = np.array(list(pts) + _line_intersections(pts))
    cloud = pts.T
    depths = np.array([_exact_depth_2d(c, cloud) for c in candidates])
    best = int(depths.max())
    deepest = candidates[depths == best]
    hull = convex_hull_2d(deepest)
    point = polygon_centroid(hull)
    logger.info(f"Tukey median: depth {best} over {len(candidates)} candidates")
    return TukeyMedianResult(point, best, len(candidates))


# ---------------------------------------------------------------------------
# Orthogonalization


def rortho(d: int, seed: Optional[int] = None) -> np.ndarray:
    """Random orthogonal d x d matrix by successive Householder extensions"""
    if d < 2:
        raise DomainError("rortho requires d >= 2")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    b = 1.0 if rng.uniform() < 0.5 else -1.0
    A = np.array([[math.cos(theta), math.sin(theta)],
                  [-b * math.sin(theta), b * math.cos(theta)]])
    for i in range(3, d + 1):
        z = rng.normal(size=i)
        v = z / np.linalg.norm(z)
        x = -v
        x[0] += 1.0
        x /= np.linalg.norm(x)
        ext = np.eye(i)
        ext[1:, 1:] = A
        A = ext - 2.0 * np.outer(x, x @ ext)
    return A


def orthomedian_2d(X, directions: int = 360) -> np.ndarray:
    """Orthomedian approximated over equally spaced unit directions"""
    data = _cloud2d(X)
    if directions < 4:
        raise DomainError("orthomedian needs at least 4 directions")
    angles = 2.0 * math.pi * np.arange(directions) / directions
    A = np.vstack([np.cos(angles), np.sin(angles)])
    med = np.median(A.T @ data, axis=1)
    return 2.0 * (A * med).mean(axis=1)
