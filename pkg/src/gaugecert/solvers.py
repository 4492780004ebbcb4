"""Solvers for gauge-regularized linear inverse problems.

Four problems:

* equality-constrained primal      min J(x)  s.t.  A x = b0
* its dual                         max <b0, y>  s.t.  J°(A^T y) <= 1
* Tikhonov                         min 0.5 ||A x - b||^2 + mu J(x)
* Mozorov (noise-aware)            min J(x)  s.t.  ||A x - b|| <= delta

Polyhedral gauges route through verified LPs; the rest use Douglas-Rachford
splitting (primal), projected-subgradient ascent (dual), and proximal
gradient (Tikhonov).  Mozorov runs a bisection on mu through the Tikhonov
path, asserting the residual's monotonicity at runtime.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .cones import LpFailure, lp_solve

logger = logging.getLogger(__name__)

__all__ = [
    "SolveResult",
    "ResidualMonotonicityError",
    "solve_primal_eq",
    "solve_dual",
    "solve_tikhonov",
    "solve_mozorov",
    "duality_gap",
]

SPLIT_MAXITER = 100_000
SPLIT_MOVE_TOL = 1e-9
SPLIT_FEAS_TOL = 1e-8


class ResidualMonotonicityError(RuntimeError):
    """The Tikhonov residual failed to be monotone in mu during bisection."""


@dataclass
class SolveResult:
    """Outcome of one solve.

    status is 'optimal', 'maxiter', or 'infeasible'; at 'optimal' the
    residuals sit below the configured tolerances (1e-8 on LP paths, 1e-6 on
    splitting paths).  ``info`` carries solver-specific extras (e.g. the mu
    found by the Mozorov bisection).
    """

    point: np.ndarray
    value: float
    status: str
    residuals: dict
    iterations: int = 0
    note: str = ""
    info: dict = field(default_factory=dict)


def _shape(A, rhs):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    rhs = np.asarray(rhs, dtype=float).ravel()
    if rhs.size != A.shape[0]:
        raise ValueError(f"right-hand side has {rhs.size} entries, A has "
                         f"{A.shape[0]} rows")
    return A, rhs


def _wsl1_deltas(w):
    w = np.asarray(w, dtype=float)
    return w - np.concatenate([w[1:], [0.0]])


# ---------------------------------------------------------------------------
# primal
# ---------------------------------------------------------------------------

def solve_primal_eq(gauge, A, b0):
    """Minimize J(x) subject to A x = b0."""
    A, b0 = _shape(A, b0)
    if A.shape[1] != gauge.n:
        raise ValueError("A column count does not match the gauge dimension")
    kind = gauge.kind
    if kind == "l1":
        return _primal_l1(A, b0)
    if kind == "analysis_l1":
        return _primal_analysis(gauge.D, A, b0)
    if kind == "wsl1":
        return _primal_wsl1(gauge.w, A, b0)
    if kind == "nonneg_l1":
        return _primal_nonneg(A, b0)
    return _primal_splitting(gauge, A, b0)


def _from_lp(res, x, value):
    if res.status != "optimal":
        return SolveResult(point=None, value=math.nan, status=res.status,
                           residuals={})
    return SolveResult(point=x, value=value, status="optimal",
                       residuals={"feasibility": 0.0,
                                  "optimality": res.kkt_residual})


def _primal_l1(A, b0):
    m, n = A.shape
    c = np.ones(2 * n)
    A_eq = np.hstack([A, -A])
    res = lp_solve(c, A_eq=A_eq, b_eq=b0, bounds=[(0.0, None)] * (2 * n))
    if res.status != "optimal":
        return _from_lp(res, None, math.nan)
    x = res.x[:n] - res.x[n:]
    return _from_lp(res, x, float(res.value))


def _primal_analysis(D, A, b0):
    m, n = A.shape
    p = D.shape[1]
    # variables (x, u+, u-)
    nv = n + 2 * p
    c = np.zeros(nv)
    c[n:] = 1.0
    A_eq = np.zeros((p + m, nv))
    A_eq[:p, :n] = D.T
    A_eq[:p, n:n + p] = -np.eye(p)
    A_eq[:p, n + p:] = np.eye(p)
    A_eq[p:, :n] = A
    b_eq = np.concatenate([np.zeros(p), b0])
    bounds = [(None, None)] * n + [(0.0, None)] * (2 * p)
    res = lp_solve(c, A_eq=A_eq, b_eq=b_eq, bounds=bounds)
    if res.status != "optimal":
        return _from_lp(res, None, math.nan)
    return _from_lp(res, res.x[:n].copy(), float(res.value))


def _primal_wsl1(w, A, b0):
    m, n = A.shape
    d = _wsl1_deltas(w)
    ks = [k for k in range(n) if d[k] > 1e-15]  # k is 0-based: top (k+1) sum
    K = len(ks)
    # variables: x (n), v (n), t (K), xi (K*n)
    nv = 2 * n + K + K * n
    c = np.zeros(nv)
    for j, k in enumerate(ks):
        c[2 * n + j] = d[k] * (k + 1)
        c[2 * n + K + j * n:2 * n + K + (j + 1) * n] = d[k]
    rows = []
    rhs = []
    # |x| <= v
    for i in range(n):
        r = np.zeros(nv)
        r[i] = 1.0
        r[n + i] = -1.0
        rows.append(r)
        rhs.append(0.0)
        r = np.zeros(nv)
        r[i] = -1.0
        r[n + i] = -1.0
        rows.append(r)
        rhs.append(0.0)
    # v_i - t_j <= xi_{j,i}
    for j in range(K):
        for i in range(n):
            r = np.zeros(nv)
            r[n + i] = 1.0
            r[2 * n + j] = -1.0
            r[2 * n + K + j * n + i] = -1.0
            rows.append(r)
            rhs.append(0.0)
    A_eq = np.zeros((m, nv))
    A_eq[:, :n] = A
    bounds = ([(None, None)] * n + [(0.0, None)] * n + [(None, None)] * K
              + [(0.0, None)] * (K * n))
    res = lp_solve(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=A_eq,
                   b_eq=b0, bounds=bounds)
    if res.status != "optimal":
        return _from_lp(res, None, math.nan)
    return _from_lp(res, res.x[:n].copy(), float(res.value))


def _primal_nonneg(A, b0):
    m, n = A.shape
    res = lp_solve(np.ones(n), A_eq=A, b_eq=b0, bounds=[(0.0, None)] * n)
    if res.status != "optimal":
        return _from_lp(res, None, math.nan)
    return _from_lp(res, res.x.copy(), float(res.value))


def _primal_splitting(gauge, A, b0, maxiter=SPLIT_MAXITER):
    """Douglas-Rachford on J(x) + indicator{Ax=b0}.

    Alternates the pseudoinverse projection onto the affine set with the prox
    of J; the multiplier recovered from the fixed point is kept in ``info``
    for dual use.
    """
    pinvA = np.linalg.pinv(A)
    xls = pinvA @ b0
    scale = max(1.0, float(np.linalg.norm(b0)))
    if np.linalg.norm(A @ xls - b0) > 1e-8 * scale:
        return SolveResult(point=None, value=math.nan, status="infeasible",
                           residuals={}, note="b0 outside the range of A")
    z = xls.copy()
    x = xls.copy()
    y = xls.copy()
    move = math.inf
    it = 0
    for it in range(1, maxiter + 1):
        x = z - pinvA @ (A @ z - b0)
        y = gauge.prox(2.0 * x - z, 1.0)
        move = float(np.linalg.norm(y - x))
        z = z + y - x
        if move < SPLIT_MOVE_TOL:
            break
    feas = float(np.linalg.norm(A @ y - b0))
    status = "optimal" if (move < SPLIT_MOVE_TOL and feas < SPLIT_FEAS_TOL * scale) \
        else "maxiter"
    # fixed-point multiplier: x - z in dJ(x) ∩ -Im A^T  =>  dual candidate
    nu, *_ = np.linalg.lstsq(A.T, z - x, rcond=None)
    return SolveResult(point=y, value=float(gauge.value(y)), status=status,
                       residuals={"feasibility": feas, "optimality": move},
                       iterations=it, note="splitting path",
                       info={"multiplier": -nu})


# ---------------------------------------------------------------------------
# dual
# ---------------------------------------------------------------------------

def solve_dual(gauge, A, b0):
    """Maximize <b0, y> subject to J°(A^T y) <= 1."""
    A, b0 = _shape(A, b0)
    kind = gauge.kind
    if kind == "l1":
        m, n = A.shape
        A_ub = np.vstack([A.T, -A.T])
        res = lp_solve(-b0, A_ub=A_ub, b_ub=np.ones(2 * n))
        return _dual_from_lp(res)
    if kind == "nonneg_l1":
        res = lp_solve(-b0, A_ub=A.T, b_ub=np.ones(A.shape[1]))
        return _dual_from_lp(res)
    if kind == "analysis_l1":
        return _dual_analysis(gauge.D, A, b0)
    if kind == "wsl1":
        return _dual_wsl1(gauge.w, A, b0)
    return _dual_ascent(gauge, A, b0)


def _dual_from_lp(res, y=None):
    if res.status == "unbounded":
        return SolveResult(point=None, value=math.inf, status="unbounded",
                           residuals={}, note="primal infeasible")
    if res.status != "optimal":
        return SolveResult(point=None, value=math.nan, status=res.status,
                           residuals={})
    point = res.x if y is None else y
    return SolveResult(point=np.asarray(point, dtype=float),
                       value=float(-res.value), status="optimal",
                       residuals={"feasibility": 0.0,
                                  "optimality": res.kkt_residual})


def _dual_analysis(D, A, b0):
    m, n = A.shape
    p = D.shape[1]
    # variables (y, u): A^T y = D u, |u| <= 1
    nv = m + p
    c = np.zeros(nv)
    c[:m] = -b0
    A_eq = np.hstack([A.T, -D])
    bounds = [(None, None)] * m + [(-1.0, 1.0)] * p
    res = lp_solve(c, A_eq=A_eq, b_eq=np.zeros(n), bounds=bounds)
    if res.status != "optimal":
        return _dual_from_lp(res)
    return _dual_from_lp(res, y=res.x[:m].copy())


def _dual_wsl1(w, A, b0):
    m, n = A.shape
    W = np.cumsum(w)
    ks = [k for k in range(n) if W[k] > 0]
    K = len(ks)
    # variables: y (m), v (n), t (K), xi (K*n)
    nv = m + n + K + K * n
    c = np.zeros(nv)
    c[:m] = -b0
    rows = []
    rhs = []
    # +-(A^T y)_i <= v_i
    for i in range(n):
        r = np.zeros(nv)
        r[:m] = A[:, i]
        r[m + i] = -1.0
        rows.append(r)
        rhs.append(0.0)
        r = np.zeros(nv)
        r[:m] = -A[:, i]
        r[m + i] = -1.0
        rows.append(r)
        rhs.append(0.0)
    # v_i - t_j <= xi_{j,i};  (k+1) t_j + sum_i xi_{j,i} <= W_k
    for j, k in enumerate(ks):
        for i in range(n):
            r = np.zeros(nv)
            r[m + i] = 1.0
            r[m + n + j] = -1.0
            r[m + n + K + j * n + i] = -1.0
            rows.append(r)
            rhs.append(0.0)
        r = np.zeros(nv)
        r[m + n + j] = k + 1.0
        r[m + n + K + j * n:m + n + K + (j + 1) * n] = 1.0
        rows.append(r)
        rhs.append(W[k])
    bounds = ([(None, None)] * m + [(0.0, None)] * n + [(None, None)] * K
              + [(0.0, None)] * (K * n))
    res = lp_solve(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds)
    if res.status != "optimal":
        return _dual_from_lp(res)
    return _dual_from_lp(res, y=res.x[:m].copy())


def _polar_ball_project(gauge, z):
    """Euclidean projection onto {z : J°(z) <= 1} for the splitting kinds."""
    kind = gauge.kind
    if kind == "group_l12":
        z = z.copy()
        for idx in gauge.groups:
            nb = np.linalg.norm(z[idx])
            if nb > 1.0:
                z[idx] /= nb
        return z
    if kind == "nuclear":
        M = z.reshape(gauge.shape)
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        return (U @ np.diag(np.minimum(s, 1.0)) @ Vt).ravel()
    if kind == "sdp_trace":
        n = gauge.nmat
        Z = z.reshape(n, n)
        Z = 0.5 * (Z + Z.T)
        R = gauge.C - Z
        w, V = np.linalg.eigh(R)
        Rp = V @ np.diag(np.maximum(w, 0.0)) @ V.T
        return (gauge.C - Rp).ravel()
    raise ValueError(f"no polar-ball projection for kind {kind!r}")


def _dual_ascent(gauge, A, b0, iters=500):
    """Heuristic dual for the splitting kinds: start from the DR multiplier,
    then projected-subgradient ascent with the polar-ball projection pulled
    back through A^T by least squares; feasibility is restored by radial
    scaling (J° is positively homogeneous).  The duality gap against the
    primal value is the optimality residual; status is optimal only when it
    closes below 1e-6 (scaled)."""
    primal = solve_primal_eq(gauge, A, b0)
    if primal.status == "infeasible":
        # dual is unbounded when b0 has no preimage at all
        return SolveResult(point=None, value=math.inf, status="unbounded",
                           residuals={}, note="primal infeasible")
    m = A.shape[0]

    def feasify(y):
        p = gauge.polar(A.T @ y)
        if p > 1.0 and np.isfinite(p):
            return y / p
        return y if np.isfinite(p) else None

    best_y = np.zeros(m)
    best_val = 0.0
    y = primal.info.get("multiplier")
    if y is not None:
        y = feasify(np.asarray(y, dtype=float))
        if y is not None and b0 @ y > best_val:
            best_y, best_val = y, float(b0 @ y)
    y = best_y.copy()
    bnorm = max(1.0, float(np.linalg.norm(b0)))
    for it in range(1, iters + 1):
        y = y + (0.5 / (bnorm * math.sqrt(it))) * b0
        z = _polar_ball_project(gauge, A.T @ y)
        y, *_ = np.linalg.lstsq(A.T, z, rcond=None)
        yf = feasify(y)
        if yf is None:
            continue
        val = float(b0 @ yf)
        if val > best_val:
            best_y, best_val = yf, val
    scale = max(1.0, abs(primal.value))
    gap = primal.value - best_val if np.isfinite(primal.value) else math.inf
    status = "optimal" if (primal.status == "optimal" and gap <= 1e-6 * scale) \
        else "maxiter"
    return SolveResult(point=best_y, value=best_val, status=status,
                       residuals={"feasibility":
                                  max(0.0, gauge.polar(A.T @ best_y) - 1.0),
                                  "optimality": max(gap, 0.0)},
                       iterations=iters,
                       note="heuristic ascent; quality certified by the "
                            "duality gap")


# ---------------------------------------------------------------------------
# Tikhonov / Mozorov
# ---------------------------------------------------------------------------

def solve_tikhonov(gauge, A, b, mu, x_start=None, maxiter=SPLIT_MAXITER):
    """Minimize 0.5 ||Ax - b||^2 + mu J(x) by accelerated proximal gradient.

    Fixed step 1/sigma_max(A)^2 with Nesterov momentum, restarted whenever
    the objective rises (needed because small mu makes the plain iteration
    crawl).  Stops once the prox fixed-point residual falls below 1e-10 and
    the relative objective decrease below 1e-12.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    A, b = _shape(A, b)
    smax = float(np.linalg.norm(A, 2))
    L = max(smax ** 2, 1e-300)
    x = np.zeros(A.shape[1]) if x_start is None else \
        np.asarray(x_start, dtype=float).copy()

    def obj(x):
        return 0.5 * float(np.sum((A @ x - b) ** 2)) + mu * gauge.value(x)

    F = obj(x)
    y = x.copy()
    tk = 1.0
    it = 0
    status = "maxiter"
    step_move = 0.0
    for it in range(1, maxiter + 1):
        grad = A.T @ (A @ y - b)
        x_next = gauge.prox(y - grad / L, mu / L)
        F_next = obj(x_next)
        if F_next > F:
            # momentum overshot: restart from the last good iterate
            y = x.copy()
            tk = 1.0
            grad = A.T @ (A @ y - b)
            x_next = gauge.prox(y - grad / L, mu / L)
            F_next = obj(x_next)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
        y = x_next + ((tk - 1.0) / t_next) * (x_next - x)
        step_move = float(np.linalg.norm(x_next - x))
        x, tk, F_prev, F = x_next, t_next, F, F_next
        # fixed-point residual of the unaccelerated map at x
        fp = float(np.linalg.norm(
            gauge.prox(x - (A.T @ (A @ x - b)) / L, mu / L) - x))
        if fp < 1e-10 * max(1.0, float(np.linalg.norm(x))) \
                and F_prev - F < 1e-12 * max(1.0, abs(F_prev)):
            status = "optimal"
            break
    resid = float(np.linalg.norm(A @ x - b))
    return SolveResult(point=x, value=F, status=status,
                       residuals={"optimality": step_move,
                                  "data_misfit": resid},
                       iterations=it, info={"mu": float(mu)})


def solve_mozorov(gauge, A, b, delta, maxiter=200):
    """Minimize J(x) subject to ||Ax - b|| <= delta.

    Bisection on mu through solve_tikhonov until the residual matches delta
    within 1e-6; residual monotonicity in mu is asserted at runtime.  delta=0
    routes to the equality-constrained primal.
    """
    A, b = _shape(A, b)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        out = solve_primal_eq(gauge, A, b)
        out.info.setdefault("mu", 0.0)
        return out
    if float(np.linalg.norm(b)) <= delta:
        x = np.zeros(A.shape[1])
        return SolveResult(point=x, value=0.0, status="optimal",
                           residuals={"feasibility": 0.0},
                           note="zero is feasible", info={"mu": math.inf})
    xls, *_ = np.linalg.lstsq(A, b, rcond=None)
    if (not gauge.is_conic
            and float(np.linalg.norm(A @ xls - b)) > delta + 1e-12):
        # the unconstrained least-squares point already misses the ball
        return SolveResult(point=None, value=math.nan, status="infeasible",
                           residuals={},
                           note="delta below the distance from b to Im A")

    mu_hi = gauge.polar(A.T @ b)
    if not np.isfinite(mu_hi) or mu_hi <= 0:
        mu_hi = float(np.linalg.norm(A.T @ b)) + 1.0
    mu_lo = 1e-12
    history = []

    def residual_at(mu, warm):
        sol = solve_tikhonov(gauge, A, b, mu, x_start=warm)
        r = float(np.linalg.norm(A @ sol.point - b))
        for mu2, r2 in history:
            inverted = (mu2 < mu and r2 > r + 1e-6 * max(1.0, r2)) or \
                       (mu2 > mu and r2 < r - 1e-6 * max(1.0, r))
            if inverted:
                raise ResidualMonotonicityError(
                    f"residual not monotone in mu: ({mu2:.3e},{r2:.6e}) vs "
                    f"({mu:.3e},{r:.6e})")
        history.append((mu, r))
        return sol, r

    sol_lo, r_lo = residual_at(mu_lo, xls)
    if r_lo > delta + 1e-6:
        return SolveResult(point=None, value=math.nan, status="infeasible",
                           residuals={"feasibility": r_lo - delta},
                           note="delta below the attainable residual")
    sol_hi, r_hi = residual_at(mu_hi, sol_lo.point)
    best = sol_lo
    best_r = r_lo
    it = 0
    for it in range(1, maxiter + 1):
        if abs(best_r - delta) <= 1e-6:
            break
        mu_mid = math.sqrt(mu_lo * mu_hi) if mu_lo > 0 else 0.5 * (mu_lo + mu_hi)
        sol_mid, r_mid = residual_at(mu_mid, best.point)
        if r_mid <= delta:
            mu_lo, sol_lo, r_lo = mu_mid, sol_mid, r_mid
        else:
            mu_hi, sol_hi, r_hi = mu_mid, sol_mid, r_mid
        best, best_r = sol_lo, r_lo
        if mu_hi - mu_lo < 1e-15 * max(1.0, mu_hi):
            break
    status = "optimal" if abs(best_r - delta) <= 1e-6 or best_r <= delta \
        else "maxiter"
    mu_star = best.info.get("mu", mu_lo)
    return SolveResult(point=best.point, value=float(gauge.value(best.point)),
                       status=status,
                       residuals={"feasibility": max(0.0, best_r - delta),
                                  "discrepancy": abs(best_r - delta)},
                       iterations=it, info={"mu": mu_star,
                                            "residual": best_r})


def duality_gap(gauge, A, b0):
    """val(P_J) - val(D_J); both values are logged."""
    p = solve_primal_eq(gauge, A, b0)
    d = solve_dual(gauge, A, b0)
    logger.info("duality gap: primal %.12g dual %.12g", p.value, d.value)
    return float(p.value - d.value)
