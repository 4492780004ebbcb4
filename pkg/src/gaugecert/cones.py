"""Polyhedral/conic computation engine.

Everything the certification layer needs about cones lives here:

* ``lp_solve`` -- thin, verified wrapper around a dense LP backend;
* ``kernel_basis`` -- orthonormal null-space basis via SVD;
* ``ConeSpec`` -- a cone carried both as lifted inequalities (for exact LP
  work) and as a violation functional (for grid/subgradient probes);
* ``cone_trivial`` -- exact triviality test of ``cone ∩ span(K)``;
* ``sphere_min`` -- minimize a positively homogeneous convex function over
  the unit sphere of a subspace, with three engines (exact piecewise-linear,
  angular grid, multistart subgradient);
* ``min_conic_singular`` -- minimum of ||Ah|| over a cone's unit sphere;
* ``nsp_constant`` -- the null-space-property constant by sign enumeration.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.spatial import ConvexHull, QhullError

from . import config

__all__ = [
    "LpFailure",
    "LpResult",
    "lp_solve",
    "kernel_basis",
    "ConeSpec",
    "cone_trivial",
    "min_norm_point",
    "SphereMinResult",
    "sphere_min",
    "LinearMaxFn",
    "NormMapFn",
    "CallableFn",
    "min_conic_singular",
    "nsp_constant",
    "EnumerationCapExceeded",
]


class LpFailure(RuntimeError):
    """The LP backend failed (numerical trouble, iteration cap, bad KKT)."""


class EnumerationCapExceeded(RuntimeError):
    """An enumeration (sign patterns, vertices) would exceed its cap."""


@dataclass
class LpResult:
    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    x: np.ndarray = None
    value: float = math.nan
    kkt_residual: float = math.nan


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
             maxiter=None):
    """Solve ``min c @ x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, bounds``.

    Variables are free by default (unlike the scipy default of x >= 0).
    Optimal solutions are re-verified: primal feasibility and the duality
    gap computed from the returned marginals must sit below 1e-8 (scaled),
    otherwise LpFailure is raised.  Statuses other than
    optimal/infeasible/unbounded also raise.
    """
    c = np.asarray(c, dtype=float)
    nvar = c.size
    if bounds is None:
        bounds = [(None, None)] * nvar
    if maxiter is None:
        maxiter = config.lp_maxiter()
    res = scipy.optimize.linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
        method="highs-ds",
        options={"maxiter": maxiter,
                 "primal_feasibility_tolerance": 1e-9,
                 "dual_feasibility_tolerance": 1e-9},
    )
    if res.status == 2:
        return LpResult(status="infeasible")
    if res.status == 3:
        return LpResult(status="unbounded")
    if res.status != 0:
        raise LpFailure(f"LP backend failure (status {res.status}): {res.message}")

    x = np.asarray(res.x, dtype=float)
    scale = max(1.0, float(np.max(np.abs(c))) if nvar else 1.0)
    feas = 0.0
    if A_ub is not None:
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.asarray(b_ub, dtype=float).ravel()
        if A_ub.size:
            feas = max(feas, float(np.max(A_ub @ x - b_ub, initial=0.0)))
            scale = max(scale, float(np.max(np.abs(b_ub), initial=0.0)))
    if A_eq is not None:
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        if A_eq.size:
            feas = max(feas, float(np.max(np.abs(A_eq @ x - b_eq), initial=0.0)))
            scale = max(scale, float(np.max(np.abs(b_eq), initial=0.0)))
    for xi, (lo, hi) in zip(x, bounds):
        if lo is not None:
            feas = max(feas, lo - xi)
        if hi is not None:
            feas = max(feas, xi - hi)

    # duality gap from marginals (dual objective must meet the primal value)
    dual = 0.0
    if A_eq is not None and A_eq.size:
        dual += float(b_eq @ res.eqlin.marginals)
    if A_ub is not None and A_ub.size:
        dual += float(b_ub @ res.ineqlin.marginals)
    lower_m = np.asarray(res.lower.marginals, dtype=float)
    upper_m = np.asarray(res.upper.marginals, dtype=float)
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None:
            dual += lo * lower_m[i]
        if hi is not None:
            dual += hi * upper_m[i]
    gap = abs(dual - res.fun)
    scale = max(scale, abs(res.fun), 1.0)
    kkt = max(feas, gap) / scale
    if kkt > 1e-8:
        raise LpFailure(f"LP KKT verification failed: residual {kkt:.3e}")
    return LpResult(status="optimal", x=x, value=float(res.fun), kkt_residual=kkt)


def kernel_basis(A, rtol=None):
    """Orthonormal basis of Ker A as columns, shape (n, k).

    Rank is decided by singular values above ``rtol * sigma_max``
    (default 1e-10).  A zero or empty matrix yields the identity.
    """
    if rtol is None:
        rtol = config.RANK_TOL
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if m == 0 or not np.any(A):
        return np.eye(n)
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * s[0]))
    K = vt[rank:].T
    if K.size:
        resid = float(np.max(np.abs(A @ K)))
        if resid > 1e-9 * max(1.0, s[0]):
            raise LpFailure(f"kernel basis residual {resid:.3e} too large")
    return K


def range_basis(A, rtol=None):
    """Orthonormal basis of Im A as columns of an (m, r) array."""
    if rtol is None:
        rtol = config.RANK_TOL
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.any(A):
        return np.zeros((A.shape[0], 0))
    u, s, _ = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * s[0]))
    return u[:, :rank]


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

@dataclass
class ConeSpec:
    """A closed convex cone {h : exists u, G_h h + G_u u <= 0}.

    Non-polyhedral cones leave ``G_h`` as None and are described only by the
    ``violation`` functional (convex, positively homogeneous, zero exactly on
    the cone).  ``anchor`` is an optional strictly feasible direction used to
    polish near-boundary probe points.
    """

    n: int
    G_h: np.ndarray = None
    G_u: np.ndarray = None
    violation: callable = None
    violation_batch: callable = None
    violation_subgrad: callable = None
    anchor: np.ndarray = None
    note: str = ""

    @property
    def is_polyhedral(self):
        return self.G_h is not None

    @staticmethod
    def from_rows(G, anchor=None, note=""):
        """Pure inequality description {h : G h <= 0}."""
        G = np.atleast_2d(np.asarray(G, dtype=float))

        def violation(h):
            return float(max(0.0, np.max(G @ h, initial=0.0)))

        def violation_batch(H):
            vals = H @ G.T
            return np.maximum(vals.max(axis=1), 0.0)

        def violation_subgrad(h):
            vals = G @ h
            i = int(np.argmax(vals))
            if vals[i] <= 0.0:
                return np.zeros(G.shape[1])
            return G[i].copy()

        return ConeSpec(n=G.shape[1], G_h=G, G_u=np.zeros((G.shape[0], 0)),
                        violation=violation, violation_batch=violation_batch,
                        violation_subgrad=violation_subgrad, anchor=anchor,
                        note=note)

    @staticmethod
    def from_lift(G_h, G_u, violation, violation_batch, violation_subgrad=None,
                  anchor=None, note=""):
        G_h = np.atleast_2d(np.asarray(G_h, dtype=float))
        G_u = np.atleast_2d(np.asarray(G_u, dtype=float))
        return ConeSpec(n=G_h.shape[1], G_h=G_h, G_u=G_u, violation=violation,
                        violation_batch=violation_batch,
                        violation_subgrad=violation_subgrad, anchor=anchor,
                        note=note)

    @staticmethod
    def from_violation(n, violation, violation_batch, violation_subgrad=None,
                       anchor=None, note=""):
        return ConeSpec(n=n, violation=violation,
                        violation_batch=violation_batch,
                        violation_subgrad=violation_subgrad, anchor=anchor,
                        note=note)


def cone_trivial(cone, K, tol=1e-9):
    """Exact test whether ``cone ∩ span(K) = {0}``.

    Requires a polyhedral cone.  Runs 2k LPs maximizing each coordinate of
    the subspace parameterization over the lifted constraints intersected
    with a unit box; the intersection is trivial iff every optimum is zero.

    Returns ``(trivial, witness)`` with a nonzero unit witness direction in
    the cone when nontrivial.
    """
    if not cone.is_polyhedral:
        raise ValueError("cone_trivial needs a polyhedral (lifted) cone")
    K = np.atleast_2d(np.asarray(K, dtype=float))
    if K.ndim == 1:
        K = K[:, None]
    k = K.shape[1]
    if k == 0:
        return True, None
    GK = cone.G_h @ K
    q = cone.G_u.shape[1]
    nrow = GK.shape[0]
    A_ub = np.hstack([GK, cone.G_u]) if q else GK
    b_ub = np.zeros(nrow)
    bounds = [(-1.0, 1.0)] * k + [(None, None)] * q
    best = (0.0, None)
    for j in range(k):
        for sign in (1.0, -1.0):
            c = np.zeros(k + q)
            c[j] = -sign  # maximize sign * t_j
            res = lp_solve(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds)
            if res.status != "optimal":
                raise LpFailure(f"cone_trivial LP status {res.status}")
            opt = -res.value
            if opt > best[0]:
                best = (opt, res.x[:k].copy())
    if best[0] <= tol:
        return True, None
    t = best[1]
    h = K @ t
    return False, h / np.linalg.norm(h)


def min_norm_point(P, tol=1e-12, maxiter=2000):
    """Minimum-norm point of conv(rows of P) by Wolfe's algorithm."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    norms = np.einsum("ij,ij->i", P, P)
    scale = max(1.0, float(np.max(norms)))
    S = [int(np.argmin(norms))]
    lam = np.array([1.0])
    x = P[S[0]].copy()
    for _ in range(maxiter):
        dots = P @ x
        i = int(np.argmin(dots))
        if dots[i] >= x @ x - tol * scale:
            break
        if i in S:
            break
        S.append(i)
        lam = np.append(lam, 0.0)
        while True:
            B = P[S]
            s = len(S)
            # affine minimizer: KKT system for min ||B^T a||^2, sum a = 1
            M = np.zeros((s + 1, s + 1))
            M[:s, :s] = B @ B.T
            M[:s, s] = 1.0
            M[s, :s] = 1.0
            rhs = np.zeros(s + 1)
            rhs[s] = 1.0
            sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            a = sol[:s]
            if np.all(a > 1e-11):
                lam = a
                x = B.T @ lam
                break
            mask = a <= 1e-11
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask & (lam > a), lam / (lam - a), np.inf)
            theta = float(np.min(ratios))
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (a - lam)
            lam[lam < 1e-11] = 0.0
            keep = lam > 0.0
            if not np.any(keep):
                keep[int(np.argmax(a))] = True
                lam[keep] = 1.0
            S = [S[j] for j in range(s) if keep[j]]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = P[S].T @ lam
    return x


# ---------------------------------------------------------------------------
# sphere minimization
# ---------------------------------------------------------------------------

@dataclass
class SphereMinResult:
    value: float
    minimizer: np.ndarray
    engine: str
    certified: bool
    evals: int = 0
    note: str = ""


class LinearMaxFn:
    """f(h) = max_i <z_i, h> given the rows z_i."""

    def __init__(self, Z):
        self.Z = np.atleast_2d(np.asarray(Z, dtype=float))

    def value(self, h):
        return float(np.max(self.Z @ h))

    def value_batch(self, H):
        return _chunked_max(H, self.Z)

    def subgrad(self, h):
        return self.Z[int(np.argmax(self.Z @ h))].copy()

    def subgrad_batch(self, H):
        return self.Z[np.argmax(np.atleast_2d(H) @ self.Z.T, axis=1)]

    def pieces(self):
        return self.Z


class NormMapFn:
    """f(h) = ||A h||_2."""

    def __init__(self, A):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))

    def value(self, h):
        return float(np.linalg.norm(self.A @ h))

    def value_batch(self, H):
        return np.linalg.norm(H @ self.A.T, axis=1)

    def subgrad(self, h):
        r = self.A @ h
        nr = np.linalg.norm(r)
        if nr < 1e-15:
            return np.zeros(self.A.shape[1])
        return self.A.T @ (r / nr)

    def subgrad_batch(self, H):
        R = np.atleast_2d(H) @ self.A.T
        nr = np.maximum(np.linalg.norm(R, axis=1, keepdims=True), 1e-15)
        return (R / nr) @ self.A

    def pieces(self):
        return None


class CallableFn:
    """Adapter wrapping closures into the sphere-probe protocol."""

    def __init__(self, value, value_batch=None, subgrad=None, pieces=None):
        self._value = value
        self._batch = value_batch
        self._subgrad = subgrad
        self._pieces = pieces

    def value(self, h):
        return float(self._value(h))

    def value_batch(self, H):
        if self._batch is not None:
            return np.asarray(self._batch(H), dtype=float)
        return np.array([self._value(row) for row in H])

    def subgrad(self, h):
        if self._subgrad is None:
            raise ValueError("probe function has no subgradient access")
        return np.asarray(self._subgrad(h), dtype=float)

    def pieces(self):
        return self._pieces


def _chunked_max(H, Z):
    H = np.atleast_2d(np.asarray(H, dtype=float))
    out = np.empty(H.shape[0])
    step = max(1, int(4e6 / max(1, Z.shape[0])))
    for lo in range(0, H.shape[0], step):
        hi = min(H.shape[0], lo + step)
        out[lo:hi] = (H[lo:hi] @ Z.T).max(axis=1)
    return out


def sphere_min(f, K, cone=None, engine="auto", restarts=None, seed=0,
               grid_res=None):
    """Minimize a convex positively homogeneous f over the unit sphere of
    span(K), optionally restricted to a cone.

    Engine choice (``engine="auto"``): the exact piecewise-linear engine when
    f exposes its linear pieces and there is no cone restriction; the angular
    grid (certified) when the subspace dimension is at most 3; multistart
    subgradient descent (heuristic, labeled) otherwise.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim == 1:
        K = K[:, None]
    k = K.shape[1]
    if k == 0:
        raise ValueError("sphere_min over a zero-dimensional subspace")
    pieces = f.pieces()
    if engine == "auto":
        if pieces is not None and cone is None:
            engine = "exact-pl"
        elif k <= 3:
            engine = "angular-grid"
        else:
            engine = "multistart-subgradient"
    if engine == "exact-pl":
        if cone is not None:
            raise ValueError("exact-pl engine does not support cone restrictions")
        if pieces is None:
            raise ValueError("exact-pl engine needs the linear piece list")
        return _exact_pl(f, pieces, K)
    if engine == "angular-grid":
        if k > 3:
            raise ValueError("angular grid supports subspace dimension <= 3")
        return _angular_grid(f, K, cone, grid_res)
    if engine == "multistart-subgradient":
        return _multistart(f, K, cone, restarts, seed)
    raise ValueError(f"unknown engine {engine!r}")


def _finish(f, h, value, engine, certified, evals, note=""):
    # re-evaluate at the reported minimizer so value and point always agree
    val = f.value(h)
    return SphereMinResult(value=float(val), minimizer=h, engine=engine,
                           certified=certified, evals=evals, note=note)


def _exact_pl(f, Z, K):
    """Exact minimum of max_i <z_i, h> over the unit sphere of span(K).

    Writes the problem in subspace coordinates t (h = K t, C = Z K) and
    splits on the sign of the minimum:

    * recession cone {C t <= 0} trivial  =>  min > 0; then 0 lies in the
      interior of E = conv(C) and the minimum is the smallest facet distance
      of E from the origin (convex hull);
    * otherwise, if 0 in E the minimum is 0 (witness from the recession LP);
      if 0 outside E it is -dist(0, E) via the minimum-norm point.
    """
    C = np.atleast_2d(Z @ K)
    k = K.shape[1]
    evals = 0
    if k == 1:
        vplus = float(np.max(C[:, 0]))
        vminus = float(np.max(-C[:, 0]))
        if vplus <= vminus:
            return _finish(f, K[:, 0].copy(), vplus, "exact-pl", True, 2)
        return _finish(f, -K[:, 0], vminus, "exact-pl", True, 2)

    rec = ConeSpec.from_rows(C)
    trivial, witness_t = cone_trivial(rec, np.eye(k))
    if trivial:
        # 0 interior to E: minimum = closest facet distance
        Cu = np.unique(np.round(C, 12), axis=0)
        try:
            hull = ConvexHull(Cu)
        except QhullError as exc:  # pragma: no cover - guarded by sign test
            raise LpFailure(f"convex hull failure in exact-pl: {exc}")
        offsets = hull.equations[:, -1]
        normals = hull.equations[:, :-1]
        i = int(np.argmin(-offsets))
        t = normals[i] / np.linalg.norm(normals[i])
        return _finish(f, K @ t, -offsets[i], "exact-pl", True, evals)
    # nonpositive minimum: is 0 in conv(C)?
    N = C.shape[0]
    A_eq = np.vstack([C.T, np.ones((1, N))])
    b_eq = np.concatenate([np.zeros(k), [1.0]])
    res = lp_solve(np.zeros(N), A_eq=A_eq, b_eq=b_eq,
                   bounds=[(0.0, None)] * N)
    if res.status == "optimal":
        t = witness_t / np.linalg.norm(witness_t)
        return _finish(f, K @ t, 0.0, "exact-pl", True, evals)
    p = min_norm_point(C)
    np_norm = np.linalg.norm(p)
    if np_norm < 1e-12:
        t = witness_t / np.linalg.norm(witness_t)
        return _finish(f, K @ t, 0.0, "exact-pl", True, evals)
    t = -p / np_norm
    return _finish(f, K @ t, -np_norm, "exact-pl", True, evals)


def _unit_grid(k, res, center=None, span=None):
    """Unit vectors of S^{k-1} on an angular grid (columns)."""
    if k == 1:
        return np.array([[1.0, -1.0]])
    if k == 2:
        if center is None:
            th = np.arange(0.0, 2 * np.pi, res)
        else:
            th = np.arange(center[0] - span, center[0] + span + res, res)
        return np.vstack([np.cos(th), np.sin(th)])
    # k == 3: polar angle in [0, pi], azimuth in [0, 2 pi)
    if center is None:
        th = np.arange(0.0, np.pi + res, res)
        ph = np.arange(0.0, 2 * np.pi, res)
    else:
        th = np.arange(center[0] - span, center[0] + span + res, res)
        ph = np.arange(center[1] - span, center[1] + span + res, res)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    TH = TH.ravel()
    PH = PH.ravel()
    return np.vstack([np.sin(TH) * np.cos(PH),
                      np.sin(TH) * np.sin(PH),
                      np.cos(TH)])


def _angles_of(t):
    if t.size == 2:
        return np.array([math.atan2(t[1], t[0])])
    th = math.acos(min(1.0, max(-1.0, t[2])))
    ph = math.atan2(t[1], t[0])
    return np.array([th, ph])


def _angular_grid(f, K, cone, grid_res):
    k = K.shape[1]
    if grid_res is None:
        grid_res = config.GRID_RES if k <= 2 else config.GRID_RES_3D
    evals = 0
    if k == 1:
        T = _unit_grid(1, grid_res)
        H = (K @ T).T
        vals = f.value_batch(H)
        if cone is not None:
            viol = cone.violation_batch(H)
            feas = viol <= 1e-12
            if not np.any(feas):
                return SphereMinResult(value=math.inf, minimizer=None,
                                       engine="angular-grid", certified=True,
                                       evals=2, note="no feasible direction")
            vals = np.where(feas, vals, np.inf)
        i = int(np.argmin(vals))
        return _finish(f, H[i], vals[i], "angular-grid", True, 2)

    res = grid_res
    center = None
    span = None
    best_h = None
    best_t = None
    best_val = math.inf
    while True:
        T = _unit_grid(k, res, center, span)
        H = (K @ T).T
        vals = f.value_batch(H)
        evals += H.shape[0]
        if cone is not None:
            viol = cone.violation_batch(H)
            vscale = max(1.0, float(np.percentile(viol, 75)))
            band = 2.0 * res * vscale
            ok = viol <= band
            if not np.any(ok):
                # cone too thin for this stage: chase the least-violating point
                ok = viol <= np.min(viol) + band
            vals = np.where(ok, vals, np.inf)
        i = int(np.argmin(vals))
        if np.isfinite(vals[i]):
            # adopt the CURRENT stage's banded minimum: coarse stages use wide
            # cone bands whose minima undershoot, so cross-stage tracking of
            # the smallest value ever seen would freeze those artifacts in
            best_val = float(vals[i])
            best_h = H[i]
            best_t = T[:, i]
        if best_t is None:
            center = _angles_of(T[:, i])
        else:
            center = _angles_of(best_t)
        span = 3.0 * res
        if res <= config.GRID_REFINE_RES:
            break
        res = max(config.GRID_REFINE_RES, res / 32.0)
    if best_h is None:
        if cone is not None:
            return _cone_fallback(f, K, cone, "angular-grid", evals)
        return SphereMinResult(value=math.inf, minimizer=None,
                               engine="angular-grid", certified=True,
                               evals=evals, note="no finite value on grid")
    h = best_h
    note = ""
    certified = True
    viol = 0.0 if cone is None else cone.violation(h)
    if viol > 1e-11:
        # polishing must not drag the point away from the minimum (thin cones
        # can only be reached at the anchor itself, which is no minimizer)
        h2 = _polish_to_cone(cone, h, K)
        if h2 is not None and f.value(h2) <= best_val + 1e-5 * max(1.0, abs(best_val)):
            h = h2
            note = "boundary-polished"
        elif cone.is_polyhedral:
            trivial, _ = cone_trivial(cone, K)
            if trivial:
                return SphereMinResult(value=math.inf, minimizer=None,
                                       engine="angular-grid", certified=True,
                                       evals=evals, note="cone section trivial")
            note = f"thin section; minimizer within {viol:.1e} of the cone"
        else:
            certified = False
            note = f"minimizer within {viol:.1e} of the cone"
    if cone is None or cone.violation(h) <= 1e-11:
        # the grid alone leaves an O(res) gap at kinked minima; close it so
        # sign decisions near zero are not hostage to the mesh
        h, best_val, zevals = _angular_zoom(f, K, cone, h, 4.0 * config.GRID_REFINE_RES)
        evals += zevals
    return _finish(f, h, best_val, "angular-grid", certified, evals, note)


def _angular_zoom(f, K, cone, h, width, sweeps=3):
    """Local refinement of a feasible grid minimizer.

    Scans great circles through the incumbent along an orthonormal tangent
    frame, shrinking the angular window geometrically; infeasible samples are
    masked out, so the incumbent only ever moves to feasible improvements.
    Brings kinked (V-shaped) minima from grid accuracy down to ~1e-12.
    """
    t = K.T @ h
    t /= np.linalg.norm(t)
    v = float(f.value(K @ t))
    evals = 1
    for _ in range(sweeps):
        for _j in range(max(1, t.size - 1)):
            B = kernel_basis(t[None, :])
            if B.shape[1] == 0:
                break
            d = B[:, _j % B.shape[1]]
            w = width
            for _r in range(6):
                thetas = np.linspace(-w, w, 21)
                C = np.cos(thetas)[:, None] * t + np.sin(thetas)[:, None] * d
                Hc = C @ K.T
                vals = f.value_batch(Hc)
                evals += Hc.shape[0]
                if cone is not None:
                    vals = np.where(cone.violation_batch(Hc) <= 1e-11,
                                    vals, np.inf)
                i = int(np.argmin(vals))
                if np.isfinite(vals[i]) and vals[i] < v:
                    v = float(vals[i])
                    t = C[i] / np.linalg.norm(C[i])
                w /= 8.0
    return K @ t, v, evals


def _polish_to_cone(cone, h, K=None, iters=80):
    """Pull a near-feasible direction onto the cone along the segment to a
    strictly feasible anchor (requires cone.anchor).

    When ``K`` is given the candidates are re-projected onto span(K) at every
    step so the polished direction never leaves the subspace being probed.
    """
    if cone.anchor is None:
        return None
    a = cone.anchor / np.linalg.norm(cone.anchor)
    if cone.violation(a) > 0.0:
        return None

    def mix(s):
        cand = (1 - s) * h + s * a
        if K is not None:
            cand = K @ (K.T @ cand)
        nc = np.linalg.norm(cand)
        return (cand / nc) if nc > 1e-14 else None

    def feasible(s):
        cand = mix(s)
        return cand is not None and cone.violation(cand) <= 5e-12

    if not feasible(1.0):
        # the anchor leaves the subspace or its projection is infeasible
        return None
    # bisect for the smallest feasible mixing weight: lo infeasible, hi feasible
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    cand = mix(hi)
    return cand if cand is not None and cone.violation(cand) <= 1e-11 else None


def _cone_fallback(f, K, cone, engine, evals):
    """Honest endgame when the grid/descent never lands inside the cone.

    For polyhedral cones the section triviality is decidable exactly: a
    trivial section certifies the +inf minimum; otherwise the LP witness
    supplies a feasible direction whose value is an uncertified upper bound.
    """
    if cone.is_polyhedral:
        trivial, wit = cone_trivial(cone, K)
        if trivial:
            return SphereMinResult(value=math.inf, minimizer=None,
                                   engine=engine, certified=True, evals=evals,
                                   note="cone section trivial")
        return _finish(f, wit, f.value(wit), engine, False, evals,
                       note="thin cone section; witness value only")
    return SphereMinResult(value=math.inf, minimizer=None, engine=engine,
                           certified=False, evals=evals,
                           note="no feasible direction resolved")


def _probe_subgrads(f, H):
    sg_batch = getattr(f, "subgrad_batch", None)
    if sg_batch is not None:
        return np.asarray(sg_batch(H), dtype=float)
    return np.array([f.subgrad(h) for h in H])


def _penalty_subgrads(cone, H, bad):
    """Penalty subgradients for the infeasible rows of H (zeros elsewhere)."""
    G = np.zeros_like(H)
    if not np.any(bad):
        return G
    if cone.G_h is not None and cone.G_u.shape[1] == 0:
        rows = cone.G_h
        V = H[bad] @ rows.T
        G[bad] = rows[np.argmax(V, axis=1)]
    elif cone.violation_subgrad is not None:
        idx = np.where(bad)[0]
        for i in idx:
            G[i] = cone.violation_subgrad(H[i])
    return G


def _multistart(f, K, cone, restarts, seed):
    """Projected-subgradient descent run as one batched ensemble.

    All restarts advance in lockstep so the per-iteration work is a handful
    of matrix products rather than thousands of scalar probe calls.
    """
    if restarts is None:
        restarts = config.probe_restarts()
    k = K.shape[1]
    rng = np.random.default_rng(seed)
    evals = 0
    T0 = rng.standard_normal((16, k))
    T0 /= np.linalg.norm(T0, axis=1, keepdims=True)
    fscale = max(1.0, float(np.median(np.abs(f.value_batch(T0 @ K.T)))))
    rho = 100.0 * fscale
    T = rng.standard_normal((restarts, k))
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    for it in range(1, 301):
        H = T @ K.T
        G = _probe_subgrads(f, H)
        evals += H.shape[0]
        if cone is not None:
            bad = cone.violation_batch(H) > 0.0
            G = G + rho * _penalty_subgrads(cone, H, bad)
        Gt = G @ K
        Gt -= (Gt * T).sum(axis=1, keepdims=True) * T  # tangential component
        gn = np.linalg.norm(Gt, axis=1, keepdims=True)
        live = gn.ravel() > 1e-14
        if not np.any(live):
            break
        step = 0.5 / math.sqrt(it)
        T[live] -= step * Gt[live] / gn[live]
        T /= np.linalg.norm(T, axis=1, keepdims=True)
    H = T @ K.T
    vals = f.value_batch(H)
    evals += H.shape[0]
    best_h = None
    best_val = math.inf
    if cone is None:
        i = int(np.argmin(vals))
        best_h, best_val = H[i], float(vals[i])
    else:
        viols = cone.violation_batch(H)
        # consider candidates best-value first; polish the near-misses
        for i in np.argsort(vals):
            if not np.isfinite(vals[i]):
                break
            if best_val <= vals[i]:
                break  # polishing can only raise the value
            h = H[i]
            if viols[i] > 1e-11:
                h = _polish_to_cone(cone, h, K)
                if h is None:
                    continue
            val = f.value(h)
            if val < best_val:
                best_val = val
                best_h = h
    if best_h is None:
        if cone is not None:
            return _cone_fallback(f, K, cone, "multistart-subgradient", evals)
        return SphereMinResult(value=math.inf, minimizer=None,
                               engine="multistart-subgradient", certified=False,
                               evals=evals, note="no feasible point found")
    return _finish(f, best_h, best_val, "multistart-subgradient", False, evals,
                   note="heuristic")


def min_conic_singular(A, cone, engine="auto", restarts=None, seed=0):
    """Minimum of ||A h|| over unit vectors of the cone.

    Certified (angular grid) only in ambient dimension <= 3; otherwise a
    labeled multistart probe.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    f = NormMapFn(A)
    if engine == "auto":
        engine = "angular-grid" if n <= 3 else "multistart-subgradient"
    return sphere_min(f, np.eye(n), cone=cone, engine=engine,
                      restarts=restarts, seed=seed)


def nsp_constant(A, I, cap=None):
    """Null-space-property constant max_{h in Ker A, h != 0} ||h_I||_1/||h||_1.

    Enumerates the 2^|I| sign patterns, solving one LP each over the section
    ||h||_1 <= 1 of the kernel.  Returns 0 for a trivial kernel.  Raises
    EnumerationCapExceeded when |I| exceeds the cap (default 14).
    """
    if cap is None:
        cap = config.NSP_CAP
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    I = np.asarray(sorted(set(int(i) for i in I)), dtype=int)
    if I.size and (I.min() < 0 or I.max() >= n):
        raise ValueError("index set out of range")
    if I.size > cap:
        raise EnumerationCapExceeded(
            f"|I| = {I.size} exceeds the enumeration cap {cap}")
    K = kernel_basis(A)
    k = K.shape[1]
    if k == 0 or I.size == 0:
        return 0.0
    # variables (t, v): h = K t, |h| <= v, sum v <= 1
    A_ub = np.zeros((2 * n + 1, k + n))
    A_ub[:n, :k] = K
    A_ub[:n, k:] = -np.eye(n)
    A_ub[n:2 * n, :k] = -K
    A_ub[n:2 * n, k:] = -np.eye(n)
    A_ub[2 * n, k:] = 1.0
    b_ub = np.zeros(2 * n + 1)
    b_ub[2 * n] = 1.0
    bounds = [(None, None)] * k + [(0.0, None)] * n
    best = 0.0
    KI = K[I, :]
    for bits in range(1 << I.size):
        s = np.array([1.0 if (bits >> j) & 1 else -1.0 for j in range(I.size)])
        c = np.zeros(k + n)
        c[:k] = -(KI.T @ s)
        res = lp_solve(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds)
        if res.status != "optimal":
            raise LpFailure(f"nsp LP status {res.status}")
        best = max(best, -res.value)
    return float(min(best, 1.0))
