"""Certified linear programming, matrix games, and convex-hull membership.

Every optimum returned here has been re-checked outside the solver: primal
feasibility is recomputed from the data, and the duality gap is computed from
a dual vector assembled independently of the primal objective. Matrix games
are certified by evaluating both strategies against all pure replies.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

log = logging.getLogger(__name__)

FEAS_TOL = 1e-9
GAP_TOL = 1e-8
MEMBER_TOL = 1e-9
CERT_TOL = 1e-8


class LPNumericalError(RuntimeError):
    """The solver returned something that fails independent certification."""


@dataclass
class LinearProgram:
    """``min c.x`` subject to ``A[i].x (sense[i]) b[i]`` and per-variable bounds.

    Senses are ``"<="``, ``"="`` or ``">="``. ``bounds`` defaults to ``x >= 0``;
    use ``None`` for an infinite side.
    """

    c: np.ndarray
    A: np.ndarray
    senses: Sequence[str]
    b: np.ndarray
    bounds: list = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n) if np.size(self.A) else np.zeros((0, n))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if self.A.shape[0] != self.b.size or len(self.senses) != self.b.size or len(self.bounds) != n:
            raise ValueError("inconsistent LP dimensions")
        bad = set(self.senses) - {"<=", "=", ">="}
        if bad:
            raise ValueError(f"unknown constraint senses {bad}")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise ValueError("LP data must be finite")


@dataclass
class LPSolution:
    status: str
    x: np.ndarray = None
    dual: np.ndarray = None
    bound_dual: np.ndarray = None
    objective: float = float("nan")
    gap: float = float("nan")
    primal_residual: float = float("nan")
    message: str = ""


def _bounds_arrays(bounds):
    lo = np.array([-np.inf if b[0] is None else b[0] for b in bounds], dtype=float)
    hi = np.array([np.inf if b[1] is None else b[1] for b in bounds], dtype=float)
    return lo, hi


def primal_residual(p: LinearProgram, x: np.ndarray) -> float:
    r = p.A @ x - p.b
    viol = 0.0
    for s, ri in zip(p.senses, r):
        viol = max(viol, ri if s == "<=" else (-ri if s == ">=" else abs(ri)))
    lo, hi = _bounds_arrays(p.bounds)
    viol = max(viol, float(np.max(np.concatenate([[0.0], lo - x, x - hi]))))
    return float(viol)


def _dual_objective(p: LinearProgram, y: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    """Lagrangian bound ``b.y + sum(bound terms)`` and the stationarity residual."""
    lo, hi = _bounds_arrays(p.bounds)
    stat = p.c - p.A.T @ y - z
    bound_term = 0.0
    for zi, l, h in zip(z, lo, hi):
        if abs(zi) <= 1e-14:
            continue
        if zi > 0:
            bound_term += zi * l if np.isfinite(l) else np.inf
        elif zi < 0:
            bound_term += zi * h if np.isfinite(h) else -np.inf
    return float(p.b @ y + bound_term), float(np.abs(stat).max(initial=0.0))


def solve_lp(p: LinearProgram, methods=("highs-ds", "highs-ipm")) -> LPSolution:
    """Solve and certify; raise :class:`LPNumericalError` if no method certifies.

    ``dual[i]`` follows the convention ``c = A^T dual + bound_dual`` at the
    optimum (so ``dual <= 0`` on ``<=`` rows and ``>= 0`` on ``>=`` rows).
    """
    le = [i for i, s in enumerate(p.senses) if s == "<="]
    ge = [i for i, s in enumerate(p.senses) if s == ">="]
    eq = [i for i, s in enumerate(p.senses) if s == "="]
    ub_rows = le + ge
    sign = np.array([1.0] * len(le) + [-1.0] * len(ge))
    A_ub = p.A[ub_rows] * sign[:, None] if ub_rows else None
    b_ub = p.b[ub_rows] * sign if ub_rows else None
    A_eq = p.A[eq] if eq else None
    b_eq = p.b[eq] if eq else None
    failures = []
    for method in methods:
        res = linprog(p.c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=p.bounds, method=method)
        if res.status == 2:
            return LPSolution("infeasible", message=res.message)
        if res.status == 3:
            return LPSolution("unbounded", message=res.message)
        if res.status != 0:
            failures.append(f"{method}: {res.message}")
            continue
        x = np.asarray(res.x, dtype=float)
        y = np.zeros(len(p.senses))
        if ub_rows:
            y[ub_rows] = np.asarray(res.ineqlin.marginals) * sign
        if eq:
            y[eq] = np.asarray(res.eqlin.marginals)
        z = np.asarray(res.lower.marginals) + np.asarray(res.upper.marginals)
        obj = float(p.c @ x)
        dual_obj, stat = _dual_objective(p, y, z)
        gap = abs(obj - dual_obj)
        resid = primal_residual(p, x)
        if resid <= FEAS_TOL and gap <= GAP_TOL and stat <= GAP_TOL:
            return LPSolution("optimal", x, y, z, obj, gap, resid)
        failures.append(f"{method}: residual {resid:.3g}, gap {gap:.3g}, stationarity {stat:.3g}")
    raise LPNumericalError("LP could not be certified: " + "; ".join(failures))


# ---------------------------------------------------------------------------
# matrix games


@dataclass
class MatrixGameSolution:
    value: float
    row: np.ndarray
    col: np.ndarray
    gap: float
    upper: float = field(default=float("nan"))
    lower: float = field(default=float("nan"))


def _clean_simplex(w: np.ndarray) -> np.ndarray:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    s = w.sum()
    if s <= 0:
        raise LPNumericalError("strategy vector vanished")
    return w / s


def certify_game(M: np.ndarray, row: np.ndarray, col: np.ndarray) -> tuple[float, float, float]:
    """``(upper, lower, gap)`` with ``upper = max_j (row^T M)_j`` and ``lower = min_i (M col)_i``."""
    upper = float((row @ M).max())
    lower = float((M @ col).min())
    return upper, lower, upper - lower


def solve_matrix_game(M) -> MatrixGameSolution:
    """Value and optimal mixed strategies; the row player minimizes ``x^T M y``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("need a nonempty 2-D payoff matrix")
    m, n = M.shape
    if np.ptp(M) == 0.0:
        row, col = np.full(m, 1.0 / m), np.full(n, 1.0 / n)
        v = float(M[0, 0])
        return MatrixGameSolution(v, row, col, 0.0, v, v)
    # variables (x_1..x_m, v): min v  s.t.  (M^T x)_j - v <= 0,  sum x = 1
    A = np.hstack([M.T, -np.ones((n, 1))])
    A = np.vstack([A, np.append(np.ones(m), 0.0)])
    lp = LinearProgram(np.append(np.zeros(m), 1.0), A, ["<="] * n + ["="], np.append(np.zeros(n), 1.0),
                       [(0.0, None)] * m + [(None, None)])
    sol = solve_lp(lp)
    row = _clean_simplex(sol.x[:m])
    col = _clean_simplex(-sol.dual[:n])
    upper, lower, gap = certify_game(M, row, col)
    if gap > GAP_TOL:
        col = _column_strategy(M)
        upper, lower, gap = certify_game(M, row, col)
    if gap > GAP_TOL:
        raise LPNumericalError(f"matrix game gap {gap:.3g} exceeds {GAP_TOL}")
    return MatrixGameSolution(0.5 * (upper + lower), row, col, max(gap, 0.0), upper, lower)


def _column_strategy(M: np.ndarray) -> np.ndarray:
    m, n = M.shape
    # variables (y_1..y_n, w): max w  s.t.  w - (M y)_i <= 0,  sum y = 1
    A = np.hstack([-M, np.ones((m, 1))])
    A = np.vstack([A, np.append(np.ones(n), 0.0)])
    lp = LinearProgram(np.append(np.zeros(n), -1.0), A, ["<="] * m + ["="], np.append(np.zeros(m), 1.0),
                       [(0.0, None)] * n + [(None, None)])
    return _clean_simplex(solve_lp(lp).x[:n])


# ---------------------------------------------------------------------------
# convex hull membership


@dataclass
class SeparationCertificate:
    """``f`` with ``max|f| <= 1`` and ``<f, query> = min_j <f, v_j> - gap``."""

    f: np.ndarray
    gap: float

    def verify(self, query, vertices, tol: float = CERT_TOL) -> bool:
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        q = np.asarray(query, dtype=float)
        if np.abs(self.f).max() > 1.0 + 1e-12:
            return False
        return float(self.f @ q) <= float((V @ self.f).min()) - self.gap + tol


@dataclass
class MembershipResult:
    status: str  # "member" | "separated" | "undecided"
    distance: float
    weights: np.ndarray = None
    residual: float = float("nan")
    certificate: SeparationCertificate = None

    @property
    def member(self) -> bool:
        return self.status == "member"


def l1_projection(query, vertices) -> tuple[float, np.ndarray]:
    """Minimal ``||sum_j lam_j v_j - query||_1`` over the simplex, and the minimizer."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    q = np.asarray(query, dtype=float).reshape(-1)
    k, d = V.shape
    if d != q.size:
        raise ValueError(f"vertex dimension {d} != query dimension {q.size}")
    # variables (lam, s_plus, s_minus)
    A = np.hstack([V.T, np.eye(d), -np.eye(d)])
    A = np.vstack([A, np.concatenate([np.ones(k), np.zeros(2 * d)])])
    c = np.concatenate([np.zeros(k), np.ones(2 * d)])
    sol = solve_lp(LinearProgram(c, A, ["="] * (d + 1), np.append(q, 1.0)))
    lam = _clean_simplex(sol.x[:k])
    return float(np.abs(lam @ V - q).sum()), lam


def separating_functional(query, vertices) -> SeparationCertificate:
    """Solve ``max_{|f| <= 1} min_j <f, v_j> - <f, query>`` directly."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    q = np.asarray(query, dtype=float).reshape(-1)
    k, d = V.shape
    # variables (f, t): min <f, q> - t  s.t.  t - <f, v_j> <= 0
    A = np.hstack([-V, np.ones((k, 1))])
    c = np.append(q, -1.0)
    sol = solve_lp(LinearProgram(c, A, ["<="] * k, np.zeros(k), [(-1.0, 1.0)] * d + [(None, None)]))
    f = np.clip(sol.x[:d], -1.0, 1.0)
    gap = float((V @ f).min() - f @ q)
    return SeparationCertificate(f, gap)


def convex_membership(query, vertices, member_tol: float = MEMBER_TOL, cert_tol: float = CERT_TOL) -> MembershipResult:
    """Decide whether ``query`` is in the hull of ``vertices`` under the L1 norm.

    Returns simplex weights when the L1 distance is at most ``member_tol``, a
    verified :class:`SeparationCertificate` when it exceeds ``cert_tol``, and
    status ``"undecided"`` (weights only) in the band between them.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.shape[0] == 0:
        raise ValueError("need at least one vertex")
    dist, lam = l1_projection(query, V)
    if dist <= member_tol:
        return MembershipResult("member", dist, lam, dist)
    if dist <= cert_tol:
        return MembershipResult("undecided", dist, lam, dist)
    cert = separating_functional(query, V)
    if abs(cert.gap - dist) > CERT_TOL or not cert.verify(query, V):
        raise LPNumericalError(f"separation gap {cert.gap!r} disagrees with distance {dist!r}")
    return MembershipResult("separated", dist, lam, dist, cert)
