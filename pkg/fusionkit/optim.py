"""
Embedded Solvers

Small dense solvers used by the fitting and multivariate modules: a two-phase
primal simplex for linear programs, a primal active-set method for convex
quadratic programs, Brent's one-dimensional minimizer and a BFGS
quasi-Newton method with optional analytic gradient.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, DomainError, SolveStatus, SolverError
from .fusion_config import get_fusion_config

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


def _relations(relations: Optional[Sequence], m: int) -> Tuple[Relation, ...]:
    if relations is None:
        return tuple(Relation.LE for _ in range(m))
    rels = tuple(r if isinstance(r, Relation) else Relation(r) for r in relations)
    if len(rels) != m:
        raise DimensionError(f"Expected {m} relations, got {len(rels)}")
    return rels


def _bounds(values: Optional[Sequence[float]], n: int, default: float) -> np.ndarray:
    if values is None:
        return np.full(n, default)
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise DimensionError(f"Bound vector must have length {n}")
    return arr


@dataclass
class LpProblem:
    """min c'x + c0 subject to A x (<=|=|>=) b and l <= x <= u"""
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    relations: Tuple[Relation, ...] = ()
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    c0: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n) if np.size(self.A) else np.zeros((0, n))
        self.b = np.asarray(self.b, dtype=float).ravel()
        m = self.A.shape[0]
        if self.b.size != m:
            raise DimensionError(f"Constraint matrix has {m} rows but rhs has {self.b.size}")
        self.relations = _relations(self.relations or None, m)
        self.lower = _bounds(self.lower, n, 0.0)
        self.upper = _bounds(self.upper, n, math.inf)
        if np.any(self.lower > self.upper):
            raise DomainError("Lower bounds must not exceed upper bounds")

    @property
    def n(self) -> int:
        return self.c.size

    def constraint_violation(self, x: np.ndarray) -> float:
        """Largest violation of rows and bounds at x"""
        worst = 0.0
        if self.A.shape[0]:
            ax = self.A @ x
            for r, lhs, rhs in zip(self.relations, ax, self.b):
                if r == Relation.LE:
                    worst = max(worst, lhs - rhs)
                elif r == Relation.GE:
                    worst = max(worst, rhs - lhs)
                else:
                    worst = max(worst, abs(lhs - rhs))
        worst = max(worst, float(np.max(self.lower - x, initial=0.0)), float(np.max(x - self.upper, initial=0.0)))
        return worst


@dataclass
class QpProblem(LpProblem):
    """min 1/2 x'Dx + c'x + c0 under the same constraints as LpProblem"""
    D: Optional[np.ndarray] = None

    def __post_init__(self):
        super().__post_init__()
        n = self.n
        self.D = np.zeros((n, n)) if self.D is None else np.asarray(self.D, dtype=float)
        if self.D.shape != (n, n):
            raise DimensionError(f"D must be {n}x{n}")
        if np.max(np.abs(self.D - self.D.T), initial=0.0) > 1e-10:
            raise DomainError("D must be symmetric")

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.D @ x + self.c @ x + self.c0)


@dataclass
class SolveResult:
    status: SolveStatus
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    iterations: int = 0
    active: List[int] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL


@dataclass
class MinimizeResult:
    x: np.ndarray
    value: float
    converged: bool
    iterations: int
    message: str = ""


def _solver_defaults(feas_tol, opt_tol, max_iter):
    cfg = get_fusion_config().get_solver_config()
    return (cfg["feasibility_tol"] if feas_tol is None else feas_tol,
            cfg["optimality_tol"] if opt_tol is None else opt_tol,
            cfg["max_iter"] if max_iter is None else max_iter)


# ---------------------------------------------------------------------------
# Linear programming


class _StandardForm:
    """Maps an LpProblem to min c's, A_s s = b_s, s >= 0 and back"""

    def __init__(self, p: LpProblem):
        n = p.n
        columns: List[np.ndarray] = []
        costs: List[float] = []
        self.recover: List[Tuple[str, int, float]] = []
        extra_rows: List[Tuple[int, float]] = []
        base_b = p.b.astype(float).copy()
        offset = np.zeros(p.A.shape[0])
        self.c0 = p.c0

        for j in range(n):
            col = p.A[:, j]
            lo, hi = p.lower[j], p.upper[j]
            if math.isfinite(lo):
                # x_j = lo + s
                offset += col * lo
                self.c0 += p.c[j] * lo
                self.recover.append(("shift", len(columns), lo))
                if math.isfinite(hi):
                    extra_rows.append((len(columns), hi - lo))
                columns.append(col)
                costs.append(p.c[j])
            elif math.isfinite(hi):
                # x_j = hi - s
                offset += col * hi
                self.c0 += p.c[j] * hi
                self.recover.append(("mirror", len(columns), hi))
                columns.append(-col)
                costs.append(-p.c[j])
            else:
                self.recover.append(("split", len(columns), 0.0))
                columns.extend([col, -col])
                costs.extend([p.c[j], -p.c[j]])

        nvar = len(columns)
        m0 = p.A.shape[0]
        rows = m0 + len(extra_rows)
        A = np.zeros((rows, nvar))
        if nvar:
            A[:m0, :] = np.column_stack(columns) if m0 else np.zeros((0, nvar))
        b = np.concatenate([base_b - offset, [ub for _, ub in extra_rows]])
        rels = list(p.relations) + [Relation.LE] * len(extra_rows)
        for k, (col, _) in enumerate(extra_rows):
            A[m0 + k, col] = 1.0

        n_slack = sum(1 for r in rels if r != Relation.EQ)
        S = np.zeros((rows, n_slack))
        k = 0
        self.slack_of_row: Dict[int, int] = {}
        for i, r in enumerate(rels):
            if r == Relation.LE:
                S[i, k] = 1.0
            elif r == Relation.GE:
                S[i, k] = -1.0
            else:
                continue
            self.slack_of_row[i] = nvar + k
            k += 1

        self.A = np.hstack([A, S])
        self.b = b
        self.c = np.concatenate([np.asarray(costs, dtype=float), np.zeros(n_slack)])
        neg = self.b < 0
        self.A[neg] *= -1.0
        self.b[neg] *= -1.0
        self.n_structural = nvar
        self.n_original = n
        self.m_original = m0

    def to_original(self, s: np.ndarray) -> np.ndarray:
        x = np.zeros(self.n_original)
        for j, (how, col, ref) in enumerate(self.recover):
            if how == "shift":
                x[j] = ref + s[col]
            elif how == "mirror":
                x[j] = ref - s[col]
            else:
                x[j] = s[col] - s[col + 1]
        return x


def _pivot(T: np.ndarray, basis: List[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _simplex_loop(T: np.ndarray, basis: List[int], allowed: np.ndarray, tol: float,
                  max_iter: int, iterations: int) -> Tuple[SolveStatus, int]:
    """Bland's rule pivoting on a tableau whose last row holds reduced costs"""
    m = T.shape[0] - 1
    while True:
        if iterations >= max_iter:
            return SolveStatus.ITERATION_LIMIT, iterations
        reduced = T[m, :-1]
        entering = np.flatnonzero(allowed & (reduced < -tol))
        if entering.size == 0:
            return SolveStatus.OPTIMAL, iterations
        e = int(entering[0])
        col = T[:m, e]
        candidates = np.flatnonzero(col > tol)
        if candidates.size == 0:
            return SolveStatus.UNBOUNDED, iterations
        ratios = T[candidates, -1] / col[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        logger.debug(f"Pivot {iterations}: entering {e}, leaving {basis[r]}")
        _pivot(T, basis, r, e)
        iterations += 1


def lp_solve(p: LpProblem, feas_tol: Optional[float] = None, opt_tol: Optional[float] = None,
             max_iter: Optional[int] = None) -> SolveResult:
    """Two-phase primal simplex with Bland's anti-cycling rule"""
    feas_tol, opt_tol, max_iter = _solver_defaults(feas_tol, opt_tol, max_iter)
    sf = _StandardForm(p)
    m, N = sf.A.shape

    if m == 0:
        if np.any(sf.c < -opt_tol):
            return SolveResult(SolveStatus.UNBOUNDED)
        x = sf.to_original(np.zeros(N))
        return SolveResult(SolveStatus.OPTIMAL, x, float(p.c @ x + p.c0))

    # phase 1: artificial basis
    T = np.zeros((m + 1, N + m + 1))
    T[:m, :N] = sf.A
    T[:m, N:N + m] = np.eye(m)
    T[:m, -1] = sf.b
    T[m, :N] = -sf.A.sum(axis=0)
    T[m, -1] = -sf.b.sum()
    basis = list(range(N, N + m))
    allowed = np.ones(N + m, dtype=bool)
    status, iters = _simplex_loop(T, basis, allowed, opt_tol * 1e-2, max_iter, 0)
    if status == SolveStatus.ITERATION_LIMIT:
        return SolveResult(status, iterations=iters)
    if -T[m, -1] > feas_tol * max(1.0, float(np.max(np.abs(sf.b)))):
        logger.info(f"LP infeasible after {iters} phase-1 pivots")
        return SolveResult(SolveStatus.INFEASIBLE, iterations=iters)

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= N:
            nz = np.flatnonzero(np.abs(T[i, :N]) > feas_tol)
            if nz.size:
                _pivot(T, basis, i, int(nz[0]))
                keep.append(i)
        else:
            keep.append(i)
    T = np.vstack([T[keep][:, list(range(N)) + [N + m]], np.zeros((1, N + 1))])
    basis = [basis[i] for i in keep]
    m2 = len(keep)

    # phase 2
    T[m2, :N] = sf.c
    for i, bcol in enumerate(basis):
        T[m2] -= sf.c[bcol] * T[i]
    status, iters = _simplex_loop(T, basis, np.ones(N, dtype=bool), opt_tol * 1e-2, max_iter, iters)
    if status != SolveStatus.OPTIMAL:
        logger.info(f"LP finished with status {status.value} after {iters} pivots")
        return SolveResult(status, iterations=iters)

    s = np.zeros(N)
    for i, bcol in enumerate(basis):
        s[bcol] = max(T[i, -1], 0.0)
    x = sf.to_original(s)
    active = [i for i in range(sf.m_original)
              if i not in sf.slack_of_row or s[sf.slack_of_row[i]] <= feas_tol]
    value = float(p.c @ x + p.c0)
    logger.info(f"LP optimal after {iters} pivots, value {value}")
    return SolveResult(SolveStatus.OPTIMAL, x, value, iters, active)


# ---------------------------------------------------------------------------
# Quadratic programming


def _check_psd(D: np.ndarray) -> None:
    """Reject matrices that fail a slightly regularized Cholesky factorization"""
    n = D.shape[0]
    if n == 0:
        return
    scale = max(1.0, float(np.max(np.abs(D))))
    try:
        np.linalg.cholesky(D + 1e-10 * scale * np.eye(n))
    except np.linalg.LinAlgError:
        raise SolverError("QP matrix D is not positive semidefinite")


def _as_inequalities(p: LpProblem) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split constraints into E x = f and G x <= h, bounds included"""
    n = p.n
    E, f, G, h = [], [], [], []
    for row, rhs, rel in zip(p.A, p.b, p.relations):
        if rel == Relation.EQ:
            E.append(row)
            f.append(rhs)
        elif rel == Relation.LE:
            G.append(row)
            h.append(rhs)
        else:
            G.append(-row)
            h.append(-rhs)
    eye = np.eye(n)
    for j in range(n):
        if math.isfinite(p.lower[j]):
            G.append(-eye[j])
            h.append(-p.lower[j])
        if math.isfinite(p.upper[j]):
            G.append(eye[j])
            h.append(p.upper[j])
    as_mat = lambda rows: np.array(rows, dtype=float).reshape(-1, n)
    return as_mat(E), np.array(f, dtype=float), as_mat(G), np.array(h, dtype=float)


def _null_space(M: np.ndarray, n: int, tol: float) -> np.ndarray:
    if M.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(1.0, s[0]) if s.size else 0))
    return vt[rank:].T


def qp_solve(p: QpProblem, feas_tol: Optional[float] = None, opt_tol: Optional[float] = None,
             max_iter: Optional[int] = None) -> SolveResult:
    """Primal active-set method started from an LP feasibility phase"""
    feas_tol, opt_tol, max_iter = _solver_defaults(feas_tol, opt_tol, max_iter)
    _check_psd(p.D)
    n = p.n

    start = lp_solve(LpProblem(np.zeros(n), p.A, p.b, p.relations, p.lower, p.upper),
                     feas_tol, opt_tol, max_iter)
    if start.status != SolveStatus.OPTIMAL:
        return SolveResult(start.status, iterations=start.iterations)
    x = start.x.copy()

    E, f, G, h = _as_inequalities(p)
    working: List[int] = []
    for i in range(G.shape[0]):
        if abs(G[i] @ x - h[i]) <= feas_tol * max(1.0, abs(h[i])):
            candidate = np.vstack([E, G[working + [i]]])
            if np.linalg.matrix_rank(candidate) == candidate.shape[0]:
                working.append(i)

    iters = 0
    while iters < max_iter:
        iters += 1
        g = p.D @ x + p.c
        A_w = np.vstack([E, G[working]])
        Z = _null_space(A_w, n, 1e-12)

        step = np.zeros(n)
        ray = False
        if Z.shape[1]:
            H = Z.T @ p.D @ Z
            gz = Z.T @ g
            evals, evecs = np.linalg.eigh(H)
            coef = evecs.T @ gz
            flat = evals <= 1e-10 * max(1.0, float(np.max(np.abs(evals), initial=0.0)))
            if np.any(flat & (np.abs(coef) > opt_tol)):
                ray = True
                step = -Z @ (evecs[:, flat] @ coef[flat])
            else:
                curved = ~flat
                step = -Z @ (evecs[:, curved] @ (coef[curved] / evals[curved]))

        if not ray and np.linalg.norm(step) <= feas_tol * max(1.0, np.linalg.norm(x)):
            # multipliers of g + E'nu + G_w'mu = 0
            if A_w.shape[0] == 0:
                break
            lam, *_ = np.linalg.lstsq(A_w.T, -g, rcond=None)
            mu = lam[E.shape[0]:]
            if mu.size == 0 or mu.min() >= -opt_tol:
                break
            drop = working[int(np.argmin(mu))]
            logger.debug(f"QP iteration {iters}: releasing constraint {drop}")
            working.remove(drop)
            continue

        alpha = math.inf if ray else 1.0
        blocking = None
        for i in range(G.shape[0]):
            if i in working:
                continue
            gp = G[i] @ step
            if gp > 1e-14 * max(1.0, np.linalg.norm(step)):
                ratio = max((h[i] - G[i] @ x) / gp, 0.0)
                if ratio < alpha:
                    alpha, blocking = ratio, i
        if math.isinf(alpha):
            logger.info(f"QP unbounded after {iters} iterations")
            return SolveResult(SolveStatus.UNBOUNDED, iterations=iters)
        x = x + alpha * step
        if blocking is not None:
            working.append(blocking)
            logger.debug(f"QP iteration {iters}: adding constraint {blocking}")
    else:
        return SolveResult(SolveStatus.ITERATION_LIMIT, x, p.objective(x), iters)

    value = p.objective(x)
    logger.info(f"QP optimal after {iters} iterations, value {value}")
    return SolveResult(SolveStatus.OPTIMAL, x, value, iters, sorted(working))


# ---------------------------------------------------------------------------
# Unconstrained minimization

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def brent_minimize(f: Callable[[float], float], lo: float, hi: float,
                   tol: Optional[float] = None, max_iter: int = 500) -> Tuple[float, float]:
    """Brent's method: golden section search with parabolic interpolation"""
    if not lo < hi:
        raise DomainError(f"brent_minimize requires lo < hi, got [{lo}, {hi}]")
    if tol is None:
        tol = get_fusion_config().get("solver", "brent_tol")

    def fe(t: float) -> float:
        v = float(f(t))
        if not math.isfinite(v):
            raise SolverError(f"Objective is not finite at {t}")
        return v

    a, b = lo, hi
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = fe(x)
    d = e = 0.0
    for _ in range(max_iter):
        xm = 0.5 * (a + b)
        tol1 = tol + math.sqrt(EPS) * abs(x) * 1e-3
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            pp = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                pp = -pp
            q = abs(q)
            if abs(pp) < abs(0.5 * q * e) and a * q < x * q + pp < b * q:
                e, d = d, pp / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if xm >= x else -tol1
                use_golden = False
        if use_golden:
            e = (a - x) if x >= xm else (b - x)
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = fe(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    # the endpoints are not visited by the search itself
    for edge in (lo, hi):
        fedge = fe(edge)
        if fedge < fx:
            x, fx = edge, fedge
    return x, fx


def numeric_gradient(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Central differences with step cbrt(eps) * max(1, |x_i|)"""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        h = np.cbrt(EPS) * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def _line_search(f, x, fx, g, p, c1=1e-4):
    """Backtracking with a parabolic trial step; returns (alpha, f_new) or (0, fx)"""
    slope = float(g @ p)
    f1 = f(x + p)
    alpha, fa = 1.0, f1
    curv = f1 - fx - slope
    if curv > 0:
        trial = min(max(-slope / (2.0 * curv), 1e-4), 1e4)
        ft = f(x + trial * p)
        if math.isfinite(ft) and (not math.isfinite(f1) or ft <= f1):
            alpha, fa = trial, ft
    while alpha > 1e-20:
        if math.isfinite(fa) and fa <= fx + c1 * alpha * slope:
            return alpha, fa
        alpha *= 0.5
        fa = f(x + alpha * p)
    return 0.0, fx


def qn_minimize(f: Callable[[np.ndarray], float], x0: Sequence[float],
                grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                reltol: Optional[float] = None, maxiter: Optional[int] = None,
                gtol: float = 1e-10, check_grad: bool = True) -> MinimizeResult:
    """BFGS minimization; numeric gradient when grad is not given.

    Stops when the largest gradient component is at most gtol, or when one
    step changes f by no more than reltol relative to |f|.
    """
    cfg = get_fusion_config().get_solver_config()
    reltol = cfg["qn_reltol"] if reltol is None else reltol
    maxiter = cfg["qn_maxiter"] if maxiter is None else maxiter

    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise DomainError("Starting point must be finite")
    fun = lambda z: float(f(z))
    gradient = (lambda z: np.asarray(grad(z), dtype=float)) if grad else (lambda z: numeric_gradient(fun, z))

    if grad is not None and check_grad:
        analytic = gradient(x)
        numeric = numeric_gradient(fun, x)
        if np.max(np.abs(analytic - numeric)) > 1e-5 * max(1.0, float(np.max(np.abs(numeric)))):
            raise SolverError("Analytic gradient disagrees with finite differences at the starting point")

    n = x.size
    H = np.eye(n)
    fx = fun(x)
    g = gradient(x)
    if not math.isfinite(fx):
        raise SolverError("Objective is not finite at the starting point")

    message = "iteration limit reached"
    converged = False
    iterations = 0
    fresh = True
    while iterations < maxiter:
        if np.max(np.abs(g)) <= gtol:
            converged, message = True, "gradient tolerance reached"
            break
        p = -H @ g
        if g @ p >= 0:
            H = np.eye(n)
            p = -g
            fresh = True
        alpha, fnew = _line_search(fun, x, fx, g, p)
        if alpha == 0.0:
            if not fresh:
                # retry along the steepest descent direction
                H = np.eye(n)
                fresh = True
                continue
            converged, message = True, "no further decrease along the gradient"
            break
        fresh = False
        iterations += 1
        s = alpha * p
        x_new = x + s
        g_new = gradient(x_new)
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            V = np.eye(n) - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)
        small_change = abs(fx - fnew) <= reltol * (abs(fx) + reltol)
        x, fx, g = x_new, fnew, g_new
        logger.debug(f"BFGS iteration {iterations}: f={fx}")
        if small_change:
            converged, message = True, "relative tolerance reached"
            break

    if not converged:
        logger.warning(f"Quasi-Newton did not converge: {message}")
    return MinimizeResult(x, fx, converged, iterations, message)
