"""
Weight Fitting

Learns weights of weighted arithmetic and quasi-arithmetic means from
exemplars (X, Y) under least squares (LSE), least absolute deviation (LAD) and
least maximum deviation (LMD) criteria, with optional rank preservation,
regularization and power-mean exponent search.
"""

import csv
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import Generator, get_generator
from .errors import DimensionError, DomainError, InputFormatError, SolveStatus, SolverError
from .fusion_config import get_fusion_config
from .optim import (LpProblem, QpProblem, Relation, SolveResult, brent_minimize, lp_solve,
                    qn_minimize, qp_solve)

logger = logging.getLogger(__name__)


class Criterion(Enum):
    LSE = "lse"
    LAD = "lad"
    LMD = "lmd"


@dataclass
class FitData:
    """Exemplars: X is n x m (columns are inputs), Y has length m"""
    X: np.ndarray
    Y: np.ndarray
    importance: Optional[np.ndarray] = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.Y = np.asarray(self.Y, dtype=float).ravel()
        n, m = self.X.shape
        if self.Y.size != m:
            raise DimensionError(f"X has {m} exemplars but Y has {self.Y.size}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise DomainError("Fit data must be finite")
        if self.importance is not None:
            self.importance = np.asarray(self.importance, dtype=float).ravel()
            if self.importance.size != m or np.any(self.importance < 0):
                raise DomainError("Exemplar importance must be m nonnegative values")
        if m < n:
            logger.warning(f"Only {m} exemplars for {n} weights; the fit is underdetermined")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def ordered(self) -> "FitData":
        """Columns sorted nondecreasingly, so a WAM fit yields OWA weights"""
        return FitData(np.sort(self.X, axis=0), self.Y.copy(), self.importance)

    def transformed(self, gen: Generator) -> "FitData":
        gen.validate(self.X)
        gen.validate(self.Y)
        return FitData(gen.phi(self.X), gen.phi(self.Y), self.importance)

    def _scale(self, power: float) -> Tuple[np.ndarray, np.ndarray]:
        if self.importance is None:
            return self.X, self.Y
        s = self.importance ** power
        return self.X * s, self.Y * s

    @classmethod
    def from_csv(cls, path: str) -> "FitData":
        """m rows of n feature columns followed by the target; header required"""
        rows: List[List[float]] = []
        width = None
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if not header:
                raise InputFormatError("CSV file is empty", line=1)
            width = len(header)
            if width < 2:
                raise InputFormatError("CSV needs at least one feature and one target column", line=1)
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != width:
                    raise InputFormatError(f"Expected {width} columns, got {len(row)}", line=lineno)
                values = []
                for col, cell in enumerate(row, start=1):
                    try:
                        values.append(float(cell))
                    except ValueError:
                        raise InputFormatError(f"Not a number: {cell!r}", line=lineno, column=col)
                rows.append(values)
        if not rows:
            raise InputFormatError("CSV has no data rows", line=2)
        table = np.array(rows)
        return cls(table[:, :-1].T, table[:, -1])


@dataclass
class FitResult:
    weights: np.ndarray
    criterion: str
    l1: float
    l2: float
    linf: float
    tau: float
    converged: bool = True
    message: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "weights": self.weights.tolist(),
            "criterion": self.criterion,
            "errors": {"l1": self.l1, "l2": self.l2, "linf": self.linf},
            "kendall_tau": self.tau,
            "converged": self.converged,
            "message": self.message,
        }
        for key, value in self.details.items():
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
        return out


def kendall_tau(a: Sequence[float], b: Sequence[float]) -> float:
    """Kendall rank correlation by pair counting"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = a.size
    if m != b.size:
        raise DimensionError("kendall_tau needs equal lengths")
    if m < 2:
        return 1.0
    total = 0.0
    for i in range(m - 1):
        total += float(np.sum(np.sign(a[i + 1:] - a[i]) * np.sign(b[i + 1:] - b[i])))
    return total / (m * (m - 1) / 2)


def fit_errors(predicted: np.ndarray, Y: np.ndarray) -> Dict[str, float]:
    r = np.asarray(predicted) - np.asarray(Y)
    return {
        "l1": float(np.sum(np.abs(r))),
        "l2": float(math.sqrt(np.sum(r ** 2))),
        "linf": float(np.max(np.abs(r))),
        "tau": kendall_tau(Y, predicted),
    }


def _clean_weights(w: np.ndarray) -> np.ndarray:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    return w / w.sum()


def _result(data: FitData, w: np.ndarray, criterion: str, predicted: Optional[np.ndarray] = None,
            **details) -> FitResult:
    w = _clean_weights(w)
    pred = w @ data.X if predicted is None else predicted
    e = fit_errors(pred, data.Y)
    return FitResult(w, criterion, e["l1"], e["l2"], e["linf"], e["tau"], details=details)


def _require_optimal(res: SolveResult, what: str) -> SolveResult:
    if res.status != SolveStatus.OPTIMAL:
        logger.error(f"{what} fit failed with solver status {res.status.value}")
        raise SolverError(f"{what} fit failed: solver status {res.status.value}")
    return res


def _rank_differences(data: FitData) -> np.ndarray:
    """Columns x^(sigma(j+1)) - x^(sigma(j)) with sigma sorting Y nondecreasingly"""
    sigma = np.argsort(data.Y, kind="stable")
    Xs = data.X[:, sigma]
    return np.diff(Xs, axis=1)


# ---------------------------------------------------------------------------
# Weighted arithmetic means


def _lse_qp(data: FitData, reg: float = 0.0, rank_penalty: Optional[float] = None) -> SolveResult:
    X, Y = data._scale(0.5)
    n = data.n
    D = X @ X.T + reg * np.eye(n)
    c = -(X @ Y)
    if rank_penalty is None:
        p = QpProblem(c=c, A=np.ones((1, n)), b=[1.0], relations=[Relation.EQ], D=D)
        return qp_solve(p)

    diffs = _rank_differences(data)
    k = diffs.shape[1]
    Dfull = np.zeros((n + k, n + k))
    Dfull[:n, :n] = D
    Dfull[n:, n:] = rank_penalty * np.eye(k)
    A = np.vstack([np.concatenate([np.ones(n), np.zeros(k)]),
                   np.hstack([diffs.T, np.eye(k)])])
    b = np.zeros(k + 1)
    b[0] = 1.0
    p = QpProblem(c=np.concatenate([c, np.zeros(k)]), A=A, b=b,
                  relations=[Relation.EQ] + [Relation.GE] * k, D=Dfull)
    return qp_solve(p)


def fit_wam_lse(data: FitData) -> FitResult:
    """Least squares weights of a weighted arithmetic mean"""
    res = _require_optimal(_lse_qp(data), "LSE")
    result = _result(data, res.x, Criterion.LSE.value)
    logger.info(f"LSE fit: l2 error {result.l2:.6g}")
    return result


def _lad_lp(data: FitData, rank_penalty: Optional[float] = None) -> Tuple[SolveResult, int]:
    X, Y = data._scale(1.0)
    n, m = data.n, data.m
    k = 0 if rank_penalty is None else m - 1
    nv = n + 2 * m + k
    c = np.concatenate([np.zeros(n), np.ones(2 * m), np.full(k, rank_penalty or 0.0)])
    A = np.zeros((m + 1 + k, nv))
    # x_j'w - r+_j + r-_j = y_j
    A[:m, :n] = X.T
    A[:m, n:n + m] = -np.eye(m)
    A[:m, n + m:n + 2 * m] = np.eye(m)
    A[m, :n] = 1.0
    b = np.concatenate([Y, [1.0], np.zeros(k)])
    rels = [Relation.EQ] * (m + 1)
    if k:
        A[m + 1:, :n] = _rank_differences(data).T
        A[m + 1:, n + 2 * m:] = np.eye(k)
        rels += [Relation.GE] * k
    return lp_solve(LpProblem(c=c, A=A, b=b, relations=rels)), k


def fit_wam_lad(data: FitData) -> FitResult:
    """Least absolute deviation weights via the split-residual LP"""
    res, _ = _lad_lp(data)
    _require_optimal(res, "LAD")
    n, m = data.n, data.m
    result = _result(data, res.x[:n], Criterion.LAD.value,
                     r_plus=res.x[n:n + m], r_minus=res.x[n + m:n + 2 * m])
    logger.info(f"LAD fit: l1 error {result.l1:.6g}")
    return result


def fit_wam_lmd(data: FitData) -> FitResult:
    """Least maximum absolute deviation weights"""
    X, Y = data._scale(1.0)
    n, m = data.n, data.m
    c = np.concatenate([np.zeros(n), [1.0]])
    A = np.vstack([
        np.hstack([X.T, -np.ones((m, 1))]),   # x'w - t <= y
        np.hstack([X.T, np.ones((m, 1))]),    # x'w + t >= y
        np.concatenate([np.ones(n), [0.0]])[None, :],
    ])
    b = np.concatenate([Y, Y, [1.0]])
    rels = [Relation.LE] * m + [Relation.GE] * m + [Relation.EQ]
    res = _require_optimal(lp_solve(LpProblem(c=c, A=A, b=b, relations=rels)), "LMD")
    result = _result(data, res.x[:n], Criterion.LMD.value, t=float(res.x[n]))
    logger.info(f"LMD fit: linf error {result.linf:.6g}")
    return result


def fit_wam(data: FitData, criterion: Union[Criterion, str]) -> FitResult:
    criterion = Criterion(criterion)
    return {Criterion.LSE: fit_wam_lse, Criterion.LAD: fit_wam_lad, Criterion.LMD: fit_wam_lmd}[criterion](data)


def fit_wam_rank(data: FitData, criterion: Union[Criterion, str], p: float) -> FitResult:
    """LAD or LSE fit with a penalty on violated output orderings"""
    criterion = Criterion(criterion)
    if p <= 0:
        raise DomainError("Rank penalty p must be positive")
    n, m = data.n, data.m
    if criterion == Criterion.LAD:
        res, k = _lad_lp(data, rank_penalty=p)
        _require_optimal(res, "Rank-preserving LAD")
        q = res.x[n + 2 * m:]
    elif criterion == Criterion.LSE:
        res = _require_optimal(_lse_qp(data, rank_penalty=p), "Rank-preserving LSE")
        q = res.x[n:]
    else:
        raise DomainError("Rank preservation supports the lad and lse criteria")
    result = _result(data, res.x[:n], f"{criterion.value}_rank", penalty=p, q=q)
    logger.info(f"Rank-preserving {criterion.value} fit (p={p}): tau {result.tau:.4f}")
    return result


def fit_wam_regularized(data: FitData, lam: float) -> FitResult:
    """LSE fit with the penalty lam * ||w||^2"""
    res = _require_optimal(_lse_qp(data, reg=lam), "Regularized LSE")
    return _result(data, res.x, f"{Criterion.LSE.value}_regularized", regularization=lam)


# ---------------------------------------------------------------------------
# Weighted quasi-arithmetic means


def softmax(lam: np.ndarray) -> np.ndarray:
    z = np.exp(lam - np.max(lam))
    return z / z.sum()


def wqam_objective(data: FitData, gen: Generator, epsilon: Optional[float] = None):
    """Objective and gradient in the softmax parametrization.

    With epsilon None the objective is the squared error; otherwise it is the
    smoothed absolute error sum sqrt(r^2 + epsilon^2).
    """
    gen.validate(data.X)
    gen.validate(data.Y)
    phi_x = gen.phi(data.X)
    Y = data.Y
    v = np.ones(data.m) if data.importance is None else data.importance

    def residuals(lam):
        w = softmax(lam)
        Z = w @ phi_x
        return w, Z, gen.inverse(Z) - Y

    def f(lam):
        _, _, r = residuals(lam)
        if epsilon is None:
            return float(np.sum(v * r ** 2))
        return float(np.sum(v * np.sqrt(r ** 2 + epsilon ** 2)))

    def grad(lam):
        w, Z, r = residuals(lam)
        if epsilon is None:
            core = 2.0 * v * r
        else:
            core = v * r / np.sqrt(r ** 2 + epsilon ** 2)
        core = core * gen.inverse_derivative(Z)
        return w * ((phi_x - Z) @ core)

    return f, grad


def _resolve_generator(phi: Union[Generator, str]) -> Generator:
    return get_generator(phi) if isinstance(phi, str) else phi


def _wqam_result(data: FitData, gen: Generator, w: np.ndarray, criterion: str, **details) -> FitResult:
    w = _clean_weights(w)
    predicted = gen.inverse(w @ gen.phi(data.X))
    return _result(data, w, criterion, predicted=predicted, generator=gen.name, **details)


def fit_wqam_lse(data: FitData, phi: Union[Generator, str],
                 lam0: Optional[np.ndarray] = None) -> FitResult:
    """Squared-error fit of a weighted quasi-arithmetic mean by BFGS"""
    gen = _resolve_generator(phi)
    f, grad = wqam_objective(data, gen)
    start = np.zeros(data.n) if lam0 is None else np.asarray(lam0, dtype=float)
    res = qn_minimize(f, start, grad=grad)
    result = _wqam_result(data, gen, softmax(res.x), Criterion.LSE.value)
    result.converged, result.message = res.converged, res.message
    logger.info(f"WQAM LSE fit ({gen.name}): l2 error {result.l2:.6g}")
    return result


def fit_wqam_linearized(data: FitData, phi: Union[Generator, str],
                        criterion: Union[Criterion, str] = Criterion.LSE) -> FitResult:
    """WAM fit on transformed data phi(X), phi(Y)"""
    gen = _resolve_generator(phi)
    inner = fit_wam(data.transformed(gen), criterion)
    return _wqam_result(data, gen, inner.weights, f"{Criterion(criterion).value}_linearized")


def fit_wqam_lse_linearized(data: FitData, phi: Union[Generator, str]) -> FitResult:
    return fit_wqam_linearized(data, phi, Criterion.LSE)


def _epsilon_schedule(epsilon: float) -> List[float]:
    schedule = []
    e = 1e-3
    while e > epsilon:
        schedule.append(e)
        e *= 1e-3
    schedule.append(epsilon)
    return schedule


def fit_wqam_lad(data: FitData, phi: Union[Generator, str], epsilon: float = 1e-12,
                 restarts: Optional[int] = None, seed: Optional[int] = None) -> FitResult:
    """Smoothed LAD fit; each start tightens epsilon gradually, best l1 error wins"""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    cfg = get_fusion_config()
    restarts = cfg.get("solver", "lad_restarts") if restarts is None else restarts
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    seed = cfg.get_default_seed() if seed is None else seed
    gen = _resolve_generator(phi)
    rng = np.random.default_rng(seed)
    phi_x = gen.phi(data.X)
    schedule = _epsilon_schedule(epsilon)

    best: Optional[Tuple[float, np.ndarray, bool]] = None
    n_converged = 0
    for attempt in range(restarts):
        lam = np.zeros(data.n) if attempt == 0 else rng.normal(size=data.n)
        ok = True
        for eps in schedule:
            f, grad = wqam_objective(data, gen, eps)
            res = qn_minimize(f, lam, grad=grad, check_grad=(attempt == 0 and eps == schedule[0]))
            lam, ok = res.x, res.converged
        n_converged += ok
        w = softmax(lam)
        l1 = float(np.sum(np.abs(gen.inverse(w @ phi_x) - data.Y)))
        logger.debug(f"LAD restart {attempt}: l1 error {l1}")
        if best is None or l1 < best[0]:
            best = (l1, w, ok)

    result = _wqam_result(data, gen, best[1], Criterion.LAD.value, epsilon=epsilon, restarts=restarts)
    result.converged = n_converged > 0
    result.message = f"{n_converged} of {restarts} starts converged"
    if not result.converged:
        logger.warning("WQAM LAD fit: no start converged")
    logger.info(f"WQAM LAD fit ({gen.name}): l1 error {result.l1:.6g}")
    return result


def fit_powmean(data: FitData, p_min: float, p_max: float,
                tol: Optional[float] = None) -> Tuple[float, FitResult]:
    """Bi-level fit: Brent over the exponent, LSE weights for each exponent"""
    if not 0 < p_min < p_max:
        raise DomainError("fit_powmean requires 0 < p_min < p_max")
    if np.any(data.X < 0) or np.any(data.Y < 0):
        raise DomainError("fit_powmean requires nonnegative data")

    cache: Dict[float, FitResult] = {}

    def inner(p: float) -> float:
        if p not in cache:
            cache[p] = fit_wqam_lse(data, get_generator("power", p))
        return cache[p].l2 ** 2

    p_star, _ = brent_minimize(inner, p_min, p_max, tol=tol if tol is not None else 1e-6)
    inner(p_star)
    result = cache[p_star]
    result.details["p"] = p_star
    logger.info(f"Power mean fit: p* = {p_star:.6g}, l2 error {result.l2:.6g}")
    return p_star, result
