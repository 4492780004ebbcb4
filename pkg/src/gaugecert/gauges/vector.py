"""Vector-space gauges.

Kinds
-----
L1Gauge
    The l1 norm.
AnalysisL1Gauge
    J(x) = ||D^T x||_1 for a dictionary D with rows indexed by x.
SortedWeightedL1Gauge
    J(x) = sum_i w_i |x|_[i] with nonincreasing nonnegative weights
    (the sorted weighted l1 norm).
GroupL12Gauge
    Sum of Euclidean norms over a partition of the coordinates.
NonnegL1Gauge
    l1 norm plus the indicator of the nonnegative orthant (conic kind).
"""

import itertools
import math

import numpy as np

from .. import config
from ..cones import ConeSpec, lp_solve, range_basis
from .base import Gauge, SubdiffFace, VertexCapExceeded

__all__ = [
    "L1Gauge",
    "AnalysisL1Gauge",
    "SortedWeightedL1Gauge",
    "GroupL12Gauge",
    "NonnegL1Gauge",
]

_SUPP_TOL = 1e-12


def _support(x):
    return np.abs(x) > _SUPP_TOL * max(1.0, float(np.max(np.abs(x), initial=0.0)))


# ---------------------------------------------------------------------------
# l1
# ---------------------------------------------------------------------------

class L1Face(SubdiffFace):
    """∂||.||_1(x0): sign vector on the support, a box on the rest."""

    def __init__(self, x0):
        x0 = np.asarray(x0, dtype=float)
        self.support = np.where(_support(x0))[0]
        self.off = np.where(~_support(x0))[0]
        self.signs = np.sign(x0[self.support])
        base = np.zeros(x0.size)
        base[self.support] = self.signs
        self.base = base
        self.tangent = np.eye(x0.size)[:, self.off]
        self.param_desc = "inf-norm ball on the off-support coordinates"

    def margin(self, z):
        z = np.asarray(z, dtype=float)
        if self.support.size and np.max(np.abs(z[self.support] - self.signs)) > 1e-9:
            return -math.inf
        if self.off.size == 0:
            return math.inf
        return 1.0 - float(np.max(np.abs(z[self.off])))

    def contains(self, z, tol=1e-9):
        m = self.margin(z)
        return m >= -tol

    def sample(self, rng, count):
        Z = np.tile(self.base, (count, 1))
        Z[:, self.off] = rng.uniform(-1.0, 1.0, size=(count, self.off.size))
        return Z


class L1Gauge(Gauge):
    kind = "l1"
    is_polyhedral = True

    def value(self, x):
        return float(np.abs(self.flat(x)).sum())

    def value_batch(self, X):
        return np.abs(np.atleast_2d(X)).sum(axis=1)

    def prox(self, x, tau):
        x = self.flat(x)
        return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)

    def polar(self, z):
        return float(np.max(np.abs(self.flat(z)), initial=0.0))

    def dir_deriv(self, x0, h):
        x0 = self.flat(x0)
        h = self.flat(h)
        on = _support(x0)
        return float(np.sign(x0[on]) @ h[on] + np.abs(h[~on]).sum())

    def dir_deriv_batch(self, x0, H):
        x0 = self.flat(x0)
        H = np.atleast_2d(np.asarray(H, dtype=float))
        on = _support(x0)
        return H[:, on] @ np.sign(x0[on]) + np.abs(H[:, ~on]).sum(axis=1)

    def face(self, x0):
        return L1Face(self.flat(x0))

    def descent_pieces(self, x0):
        face = self.face(x0)
        k = face.off.size
        if 2 ** k > config.VERTEX_CAP:
            raise VertexCapExceeded(f"2^{k} subdifferential vertices exceed cap")
        combos = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
        if k == 0:
            return face.base[None, :]
        Z = np.tile(face.base, (combos.shape[0], 1))
        Z[:, face.off] = combos
        return Z

    def critical_cone(self, x0):
        x0 = self.flat(x0)
        face = self.face(x0)
        n = self.n
        off = face.off
        k = off.size
        G_h = np.zeros((1 + 2 * k, n))
        G_u = np.zeros((1 + 2 * k, k))
        G_h[0, face.support] = face.signs
        G_u[0, :] = 1.0
        for j, i in enumerate(off):
            G_h[1 + 2 * j, i] = 1.0
            G_u[1 + 2 * j, j] = -1.0
            G_h[2 + 2 * j, i] = -1.0
            G_u[2 + 2 * j, j] = -1.0

        def violation(h):
            return max(0.0, self.dir_deriv(x0, h))

        def violation_batch(H):
            return np.maximum(self.dir_deriv_batch(x0, H), 0.0)

        def violation_subgrad(h):
            if self.dir_deriv(x0, h) <= 0.0:
                return np.zeros(n)
            g = np.zeros(n)
            g[face.support] = face.signs
            g[off] = np.where(h[off] >= 0.0, 1.0, -1.0)
            return g

        anchor = -x0 if self.value(x0) > 0 else None
        return ConeSpec.from_lift(G_h, G_u, violation, violation_batch,
                                  violation_subgrad, anchor=anchor,
                                  note="epigraph lift of the l1 descent cone")

    def lipschitz(self):
        return math.sqrt(self.n)


# ---------------------------------------------------------------------------
# analysis l1
# ---------------------------------------------------------------------------

class AnalysisL1Face(SubdiffFace):
    """D-image of the box face {u : u_I = sign, |u_{I^c}| <= 1}.

    Margins are measured in coefficient (u) space via an LP; when the
    off-support columns of D are linearly dependent this can understate the
    geometric margin, flagged by ``rank_deficient``.
    """

    def __init__(self, D, x0):
        D = np.asarray(D, dtype=float)
        x0 = np.asarray(x0, dtype=float)
        g = D.T @ x0
        self.D = D
        self.active = np.where(_support(g))[0]
        self.inactive = np.where(~_support(g))[0]
        self.signs = np.sign(g[self.active])
        u0 = np.zeros(D.shape[1])
        u0[self.active] = self.signs
        self.base = D @ u0
        self.tangent = range_basis(D[:, self.inactive]) if self.inactive.size \
            else np.zeros((D.shape[0], 0))
        Doff = D[:, self.inactive]
        self.rank_deficient = (
            self.inactive.size > 0
            and np.linalg.matrix_rank(Doff, tol=None) < self.inactive.size
        )
        self.param_desc = "inf-norm ball on the inactive dictionary coefficients"

    def _coeff_margin(self, z):
        """1 minus the least inf-norm of feasible inactive coefficients."""
        z = np.asarray(z, dtype=float)
        k = self.inactive.size
        if k == 0:
            resid = np.max(np.abs(z - self.base), initial=0.0)
            return math.inf if resid <= 1e-9 else -math.inf
        Doff = self.D[:, self.inactive]
        # variables (u_off, s): D_off u = z - base, |u| <= s, minimize s
        n = self.D.shape[0]
        A_eq = np.hstack([Doff, np.zeros((n, 1))])
        b_eq = z - self.base
        A_ub = np.zeros((2 * k, k + 1))
        A_ub[:k, :k] = np.eye(k)
        A_ub[:k, k] = -1.0
        A_ub[k:, :k] = -np.eye(k)
        A_ub[k:, k] = -1.0
        c = np.zeros(k + 1)
        c[k] = 1.0
        res = lp_solve(c, A_ub=A_ub, b_ub=np.zeros(2 * k), A_eq=A_eq, b_eq=b_eq)
        if res.status != "optimal":
            return -math.inf
        return 1.0 - res.value

    def margin(self, z):
        return self._coeff_margin(z)

    def contains(self, z, tol=1e-9):
        return self._coeff_margin(z) >= -tol

    def sample(self, rng, count):
        U = rng.uniform(-1.0, 1.0, size=(count, self.inactive.size))
        Z = np.tile(self.base, (count, 1))
        if self.inactive.size:
            Z += U @ self.D[:, self.inactive].T
        return Z


class AnalysisL1Gauge(Gauge):
    kind = "analysis_l1"
    is_polyhedral = True

    def __init__(self, D):
        D = np.atleast_2d(np.asarray(D, dtype=float))
        super().__init__(D.shape[0])
        self.D = D
        self._prox_lip = float(np.linalg.norm(D, 2) ** 2) if D.size else 1.0

    def value(self, x):
        return float(np.abs(self.D.T @ self.flat(x)).sum())

    def value_batch(self, X):
        return np.abs(np.atleast_2d(X) @ self.D).sum(axis=1)

    def prox(self, x, tau):
        """Evaluated through the dual: u* solves the box-constrained least
        squares min_{|u|<=tau} 0.5||x - D u||^2 and prox = x - D u*."""
        x = self.flat(x)
        if tau <= 0:
            return x.copy()
        D = self.D
        p = D.shape[1]
        u = np.zeros(p)
        v = u.copy()
        t = 1.0
        L = max(self._prox_lip, 1e-12)
        last = math.inf
        for _ in range(5000):
            grad = D.T @ (D @ v - x)
            u_next = np.clip(v - grad / L, -tau, tau)
            obj = 0.5 * float(np.sum((x - D @ u_next) ** 2))
            if obj > last:  # momentum overshoot: restart from the last point
                v, t = u, 1.0
                last = math.inf
                continue
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            v = u_next + ((t - 1.0) / t_next) * (u_next - u)
            u, t, last = u_next, t_next, obj
            # fixed point of the projected gradient map = dual optimality
            step = np.clip(u - D.T @ (D @ u - x) / L, -tau, tau) - u
            if float(np.max(np.abs(step))) <= 1e-12 * max(1.0, tau):
                break
        return x - D @ u

    def polar(self, z):
        """inf-norm of the smallest coefficient representation (LP);
        +inf when z is outside the column span of D."""
        z = self.flat(z)
        D = self.D
        n, p = D.shape
        A_eq = np.hstack([D, np.zeros((n, 1))])
        A_ub = np.zeros((2 * p, p + 1))
        A_ub[:p, :p] = np.eye(p)
        A_ub[:p, p] = -1.0
        A_ub[p:, :p] = -np.eye(p)
        A_ub[p:, p] = -1.0
        c = np.zeros(p + 1)
        c[p] = 1.0
        res = lp_solve(c, A_ub=A_ub, b_ub=np.zeros(2 * p), A_eq=A_eq, b_eq=z)
        if res.status != "optimal":
            return math.inf
        return max(0.0, float(res.value))

    def dir_deriv(self, x0, h):
        g0 = self.D.T @ self.flat(x0)
        gh = self.D.T @ self.flat(h)
        on = _support(g0)
        return float(np.sign(g0[on]) @ gh[on] + np.abs(gh[~on]).sum())

    def dir_deriv_batch(self, x0, H):
        g0 = self.D.T @ self.flat(x0)
        G = np.atleast_2d(H) @ self.D
        on = _support(g0)
        return G[:, on] @ np.sign(g0[on]) + np.abs(G[:, ~on]).sum(axis=1)

    def face(self, x0):
        return AnalysisL1Face(self.D, self.flat(x0))

    def descent_pieces(self, x0):
        face = self.face(x0)
        k = face.inactive.size
        if 2 ** k > config.VERTEX_CAP:
            raise VertexCapExceeded(f"2^{k} dictionary sign patterns exceed cap")
        combos = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
        if k == 0:
            Z = face.base[None, :]
        else:
            Z = face.base[None, :] + combos @ self.D[:, face.inactive].T
        return np.unique(np.round(Z, 12), axis=0)

    def critical_cone(self, x0):
        x0 = self.flat(x0)
        face = self.face(x0)
        D = self.D
        act, inact = face.active, face.inactive
        k = inact.size
        G_h = np.zeros((1 + 2 * k, self.n))
        G_u = np.zeros((1 + 2 * k, k))
        if act.size:
            G_h[0] = D[:, act] @ face.signs
        G_u[0, :] = 1.0
        for j, i in enumerate(inact):
            G_h[1 + 2 * j] = D[:, i]
            G_u[1 + 2 * j, j] = -1.0
            G_h[2 + 2 * j] = -D[:, i]
            G_u[2 + 2 * j, j] = -1.0

        def violation(h):
            return max(0.0, self.dir_deriv(x0, h))

        def violation_batch(H):
            return np.maximum(self.dir_deriv_batch(x0, H), 0.0)

        def violation_subgrad(h):
            if self.dir_deriv(x0, h) <= 0.0:
                return np.zeros(self.n)
            gh = D.T @ h
            u = np.zeros(D.shape[1])
            u[act] = face.signs
            u[inact] = np.where(gh[inact] >= 0.0, 1.0, -1.0)
            return D @ u

        anchor = -x0 if self.value(x0) > 0 else None
        return ConeSpec.from_lift(G_h, G_u, violation, violation_batch,
                                  violation_subgrad, anchor=anchor,
                                  note="epigraph lift of the analysis descent cone")

    def lipschitz(self):
        return math.sqrt(self.D.shape[1]) * float(np.linalg.norm(self.D, 2))


# ---------------------------------------------------------------------------
# sorted weighted l1
# ---------------------------------------------------------------------------

class SortedFace(SubdiffFace):
    """conv of the signed weight-permutation vertices consistent with x0."""

    def __init__(self, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        self.vertices = V
        self.base = V.mean(axis=0)
        diffs = V - self.base
        self.tangent = range_basis(diffs.T)
        self.param_desc = "convex hull of the consistent signed weight assignments"

    def margin(self, z):
        """Largest minimal barycentric weight over representations of z."""
        V = self.vertices
        N = V.shape[0]
        n = V.shape[1]
        if N == 1:
            resid = np.max(np.abs(np.asarray(z, dtype=float) - V[0]), initial=0.0)
            return math.inf if resid <= 1e-9 else -math.inf
        # variables (lam, m): V^T lam = z, sum lam = 1, lam >= m, max m
        A_eq = np.zeros((n + 1, N + 1))
        A_eq[:n, :N] = V.T
        A_eq[n, :N] = 1.0
        b_eq = np.concatenate([np.asarray(z, dtype=float), [1.0]])
        A_ub = np.zeros((N, N + 1))
        A_ub[:, :N] = -np.eye(N)
        A_ub[:, N] = 1.0
        c = np.zeros(N + 1)
        c[N] = -1.0
        res = lp_solve(c, A_ub=A_ub, b_ub=np.zeros(N), A_eq=A_eq, b_eq=b_eq,
                       bounds=[(0.0, None)] * N + [(None, None)])
        if res.status != "optimal":
            return -math.inf
        return float(-res.value)

    def contains(self, z, tol=1e-9):
        return self.margin(z) >= -tol

    def sample(self, rng, count):
        lam = rng.dirichlet(np.ones(self.vertices.shape[0]), size=count)
        return lam @ self.vertices


def _distinct_perms(vals):
    """Distinct permutations of a value multiset (lexicographic)."""
    vals = sorted(vals)
    out = []

    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        prev = object()
        for i, v in enumerate(remaining):
            if v == prev:
                continue
            prev = v
            rec(prefix + [v], remaining[:i] + remaining[i + 1:])

    rec([], vals)
    return out


def _tie_groups(x, tol=1e-12):
    """Indices of coordinates grouped by equal |x| value, descending."""
    ax = np.abs(np.asarray(x, dtype=float))
    order = np.argsort(-ax, kind="stable")
    groups = []
    start = 0
    while start < ax.size:
        stop = start
        while stop + 1 < ax.size and abs(ax[order[stop + 1]] - ax[order[start]]) <= tol * max(1.0, ax[order[start]]):
            stop += 1
        groups.append(order[start:stop + 1])
        start = stop + 1
    return groups


class SortedWeightedL1Gauge(Gauge):
    kind = "wsl1"
    is_polyhedral = True

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("weights must be nonempty")
        if np.any(w < 0) or np.any(np.diff(w) > 1e-14):
            raise ValueError("weights must be nonnegative and nonincreasing")
        if w[0] <= 0:
            raise ValueError("the leading weight must be positive")
        super().__init__(w.size)
        self.w = w
        self._cumw = np.cumsum(w)

    def value(self, x):
        ax = np.sort(np.abs(self.flat(x)))[::-1]
        return float(ax @ self.w)

    def value_batch(self, X):
        AX = np.sort(np.abs(np.atleast_2d(X)), axis=1)[:, ::-1]
        return AX @ self.w

    def prox(self, x, tau):
        """Stack-based pool-adjacent-violators routine on the sorted
        magnitudes (isotonic regression of |x|_sorted - tau*w clipped at 0)."""
        x = self.flat(x)
        lam = tau * self.w
        sign = np.sign(x)
        ax = np.abs(x)
        order = np.argsort(-ax, kind="stable")
        y = ax[order] - lam
        n = y.size
        # merge blocks whose averages violate the nonincreasing constraint
        starts = np.empty(n, dtype=int)
        ends = np.empty(n, dtype=int)
        sums = np.empty(n)
        k = 0
        for i in range(n):
            starts[k] = i
            ends[k] = i
            sums[k] = y[i]
            k += 1
            while k > 1 and sums[k - 2] / (ends[k - 2] - starts[k - 2] + 1) <= \
                    sums[k - 1] / (ends[k - 1] - starts[k - 1] + 1):
                sums[k - 2] += sums[k - 1]
                ends[k - 2] = ends[k - 1]
                k -= 1
        z = np.empty(n)
        for j in range(k):
            avg = max(sums[j] / (ends[j] - starts[j] + 1), 0.0)
            z[starts[j]:ends[j] + 1] = avg
        out = np.empty(n)
        out[order] = z
        return sign * out

    def polar(self, z):
        az = np.sort(np.abs(self.flat(z)))[::-1]
        cum = np.cumsum(az)
        if self._cumw[-1] <= 0.0:
            return 0.0 if cum[-1] <= 0.0 else math.inf
        valid = self._cumw > 0.0
        if np.any(~valid) and np.any(cum[~valid] > 0.0):
            return math.inf
        ratios = cum[valid] / self._cumw[valid]
        return float(max(np.max(ratios), 0.0))

    def dir_deriv(self, x0, h):
        x0 = self.flat(x0)
        h = self.flat(h)
        total = 0.0
        pos = 0
        for grp in _tie_groups(x0):
            wblock = self.w[pos:pos + grp.size]
            if np.abs(x0[grp[0]]) > _SUPP_TOL:
                d = np.sign(x0[grp]) * h[grp]
            else:
                d = np.abs(h[grp])
            total += float(np.sort(d)[::-1] @ wblock)
            pos += grp.size
        return total

    def dir_deriv_batch(self, x0, H):
        x0 = self.flat(x0)
        H = np.atleast_2d(np.asarray(H, dtype=float))
        total = np.zeros(H.shape[0])
        pos = 0
        for grp in _tie_groups(x0):
            wblock = self.w[pos:pos + grp.size]
            if np.abs(x0[grp[0]]) > _SUPP_TOL:
                d = H[:, grp] * np.sign(x0[grp])
            else:
                d = np.abs(H[:, grp])
            total += np.sort(d, axis=1)[:, ::-1] @ wblock
            pos += grp.size
        return total

    def _vertices(self, x0):
        """The extreme subgradients consistent with x0 (deduplicated)."""
        x0 = self.flat(x0)
        groups = _tie_groups(x0)
        count = 1
        pos = 0
        for grp in groups:
            wblock = tuple(np.round(self.w[pos:pos + grp.size], 14))
            perms = math.factorial(grp.size)
            # distinct permutations of the weight multiset
            for v in set(wblock):
                perms //= math.factorial(wblock.count(v))
            count *= perms
            if np.abs(x0[grp[0]]) <= _SUPP_TOL:
                nz = sum(1 for v in wblock if v > 0)
                count *= 2 ** nz
            if count > config.VERTEX_CAP:
                raise VertexCapExceeded(
                    f"face vertex count exceeds cap {config.VERTEX_CAP}")
            pos += grp.size
        per_group = []
        pos = 0
        for grp in groups:
            wblock = self.w[pos:pos + grp.size]
            opts = _distinct_perms([float(v) for v in np.round(wblock, 14)])
            assignments = []
            zero_group = np.abs(x0[grp[0]]) <= _SUPP_TOL
            for perm in opts:
                if zero_group:
                    nz = [j for j, v in enumerate(perm) if v > 0]
                    for signs in itertools.product((1.0, -1.0), repeat=len(nz)):
                        vals = list(perm)
                        for j, s in zip(nz, signs):
                            vals[j] = s * vals[j]
                        assignments.append(vals)
                else:
                    s = np.sign(x0[grp])
                    assignments.append([si * v for si, v in zip(s, perm)])
            per_group.append((grp, assignments))
            pos += grp.size
        verts = []
        for combo in itertools.product(*[a for _, a in per_group]):
            z = np.zeros(self.n)
            for (grp, _), vals in zip(per_group, combo):
                z[grp] = vals
            verts.append(z)
        return np.unique(np.round(np.array(verts), 14), axis=0)

    def face(self, x0):
        return SortedFace(self._vertices(x0))

    def descent_pieces(self, x0):
        return self._vertices(x0)

    def critical_cone(self, x0):
        x0 = self.flat(x0)
        V = self._vertices(x0)

        def violation(h):
            return max(0.0, self.dir_deriv(x0, h))

        def violation_batch(H):
            return np.maximum(self.dir_deriv_batch(x0, H), 0.0)

        def violation_subgrad(h):
            if self.dir_deriv(x0, h) <= 0.0:
                return np.zeros(self.n)
            return V[int(np.argmax(V @ h))].copy()

        anchor = -x0 if self.value(x0) > 0 else None
        return ConeSpec.from_lift(V, np.zeros((V.shape[0], 0)), violation,
                                  violation_batch, violation_subgrad,
                                  anchor=anchor,
                                  note="vertex rows of the sorted-l1 descent cone")

    def lipschitz(self):
        return float(np.linalg.norm(self.w))


# ---------------------------------------------------------------------------
# group l1/l2
# ---------------------------------------------------------------------------

class GroupFace(SubdiffFace):
    def __init__(self, groups, x0):
        x0 = np.asarray(x0, dtype=float)
        self.groups = groups
        self.sup = []
        self.zero = []
        base = np.zeros(x0.size)
        for gi, idx in enumerate(groups):
            blk = x0[idx]
            nb = np.linalg.norm(blk)
            if nb > _SUPP_TOL * max(1.0, np.max(np.abs(x0))):
                self.sup.append(gi)
                base[idx] = blk / nb
            else:
                self.zero.append(gi)
        self.base = base
        zero_coords = np.concatenate([groups[gi] for gi in self.zero]) \
            if self.zero else np.array([], dtype=int)
        self.zero_coords = zero_coords
        self.tangent = np.eye(x0.size)[:, zero_coords]
        self.param_desc = "Euclidean balls on the zero blocks"

    def margin(self, z):
        z = np.asarray(z, dtype=float)
        for gi in self.sup:
            idx = self.groups[gi]
            if np.linalg.norm(z[idx] - self.base[idx]) > 1e-9:
                return -math.inf
        if not self.zero:
            return math.inf
        worst = max(np.linalg.norm(z[self.groups[gi]]) for gi in self.zero)
        return 1.0 - float(worst)

    def contains(self, z, tol=1e-9):
        return self.margin(z) >= -tol

    def sample(self, rng, count):
        Z = np.tile(self.base, (count, 1))
        for gi in self.zero:
            idx = self.groups[gi]
            dirs = rng.standard_normal((count, idx.size))
            dirs /= np.maximum(np.linalg.norm(dirs, axis=1, keepdims=True), 1e-30)
            radii = rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / idx.size)
            Z[:, idx] = dirs * radii
        return Z


class GroupL12Gauge(Gauge):
    kind = "group_l12"
    is_polyhedral = False

    def __init__(self, n, groups):
        super().__init__(n)
        seen = np.zeros(n, dtype=bool)
        self.groups = []
        for idx in groups:
            idx = np.asarray(sorted(int(i) for i in idx), dtype=int)
            if idx.size == 0:
                raise ValueError("empty group")
            if idx.min() < 0 or idx.max() >= n or np.any(seen[idx]):
                raise ValueError("groups must partition range(n)")
            seen[idx] = True
            self.groups.append(idx)
        if not np.all(seen):
            raise ValueError("groups must cover every coordinate")

    def _norms(self, x):
        return np.array([np.linalg.norm(x[idx]) for idx in self.groups])

    def value(self, x):
        return float(self._norms(self.flat(x)).sum())

    def value_batch(self, X):
        X = np.atleast_2d(X)
        return sum(np.linalg.norm(X[:, idx], axis=1) for idx in self.groups)

    def prox(self, x, tau):
        x = self.flat(x).copy()
        for idx in self.groups:
            nb = np.linalg.norm(x[idx])
            x[idx] *= max(1.0 - tau / nb, 0.0) if nb > 0 else 0.0
        return x

    def polar(self, z):
        return float(np.max(self._norms(self.flat(z)), initial=0.0))

    def dir_deriv(self, x0, h):
        x0 = self.flat(x0)
        h = self.flat(h)
        total = 0.0
        for idx in self.groups:
            nb = np.linalg.norm(x0[idx])
            if nb > _SUPP_TOL * max(1.0, np.max(np.abs(x0), initial=0.0)):
                total += float(x0[idx] @ h[idx]) / nb
            else:
                total += float(np.linalg.norm(h[idx]))
        return total

    def dir_deriv_batch(self, x0, H):
        x0 = self.flat(x0)
        H = np.atleast_2d(np.asarray(H, dtype=float))
        total = np.zeros(H.shape[0])
        scale = max(1.0, np.max(np.abs(x0), initial=0.0))
        for idx in self.groups:
            nb = np.linalg.norm(x0[idx])
            if nb > _SUPP_TOL * scale:
                total += H[:, idx] @ (x0[idx] / nb)
            else:
                total += np.linalg.norm(H[:, idx], axis=1)
        return total

    def face(self, x0):
        return GroupFace(self.groups, self.flat(x0))

    def critical_cone(self, x0):
        x0 = self.flat(x0)

        def violation(h):
            return max(0.0, self.dir_deriv(x0, h))

        def violation_batch(H):
            return np.maximum(self.dir_deriv_batch(x0, H), 0.0)

        def violation_subgrad(h):
            if self.dir_deriv(x0, h) <= 0.0:
                return np.zeros(self.n)
            g = np.zeros(self.n)
            scale = max(1.0, np.max(np.abs(x0), initial=0.0))
            for idx in self.groups:
                nb = np.linalg.norm(x0[idx])
                if nb > _SUPP_TOL * scale:
                    g[idx] = x0[idx] / nb
                else:
                    nh = np.linalg.norm(h[idx])
                    if nh > 1e-15:
                        g[idx] = h[idx] / nh
            return g

        anchor = -x0 if self.value(x0) > 0 else None
        return ConeSpec.from_violation(self.n, violation, violation_batch,
                                       violation_subgrad, anchor=anchor,
                                       note="group descent cone (non-polyhedral)")

    def dir_probe(self, x0):
        from ..cones import CallableFn
        x0 = self.flat(x0)
        scale = max(1.0, np.max(np.abs(x0), initial=0.0))

        def subgrad(h):
            g = np.zeros(self.n)
            for idx in self.groups:
                nb = np.linalg.norm(x0[idx])
                if nb > _SUPP_TOL * scale:
                    g[idx] = x0[idx] / nb
                else:
                    nh = np.linalg.norm(h[idx])
                    if nh > 1e-15:
                        g[idx] = h[idx] / nh
            return g

        return CallableFn(lambda h: self.dir_deriv(x0, h),
                          lambda H: self.dir_deriv_batch(x0, H),
                          subgrad)

    def lipschitz(self):
        return math.sqrt(len(self.groups))


# ---------------------------------------------------------------------------
# nonnegative l1
# ---------------------------------------------------------------------------

class NonnegFace(SubdiffFace):
    """{z : z_I = 1, z_{I^c} <= 1} at a nonnegative x0 with support I."""

    def __init__(self, x0):
        x0 = np.asarray(x0, dtype=float)
        self.support = np.where(_support(x0))[0]
        self.off = np.where(~_support(x0))[0]
        base = np.zeros(x0.size)
        base[self.support] = 1.0
        self.base = base
        self.tangent = np.eye(x0.size)[:, self.off]
        self.param_desc = "nonpositive shifts on the off-support coordinates"

    def margin(self, z):
        z = np.asarray(z, dtype=float)
        if self.support.size and np.max(np.abs(z[self.support] - 1.0)) > 1e-9:
            return -math.inf
        if self.off.size == 0:
            return math.inf
        return float(np.min(1.0 - z[self.off]))

    def contains(self, z, tol=1e-9):
        return self.margin(z) >= -tol

    def sample(self, rng, count):
        Z = np.tile(self.base, (count, 1))
        Z[:, self.off] = 1.0 - rng.exponential(1.0, size=(count, self.off.size))
        return Z


class NonnegL1Gauge(Gauge):
    kind = "nonneg_l1"
    is_polyhedral = True
    is_conic = True

    def value(self, x):
        x = self.flat(x)
        if np.min(x, initial=0.0) < -1e-12:
            return math.inf
        return float(np.maximum(x, 0.0).sum())

    def domain_residual(self, x):
        return float(max(0.0, -np.min(self.flat(x), initial=0.0)))

    def value_batch(self, X):
        X = np.atleast_2d(X)
        vals = np.maximum(X, 0.0).sum(axis=1)
        return np.where(X.min(axis=1, initial=0.0) < -1e-12, math.inf, vals)

    def prox(self, x, tau):
        return np.maximum(self.flat(x) - tau, 0.0)

    def polar(self, z):
        return float(max(0.0, np.max(self.flat(z), initial=0.0)))

    def dir_deriv(self, x0, h):
        x0, h = self.flat(x0), self.flat(h)
        if np.min(x0, initial=0.0) < -1e-12:
            raise ValueError("x0 must be nonnegative")
        off = ~_support(x0)
        if np.min(h[off], initial=0.0) < -1e-12:
            return math.inf
        return float(h.sum())

    def dir_deriv_batch(self, x0, H):
        x0 = self.flat(x0)
        H = np.atleast_2d(np.asarray(H, dtype=float))
        off = ~_support(x0)
        vals = H.sum(axis=1)
        bad = H[:, off].min(axis=1, initial=0.0) < -1e-12
        return np.where(bad, math.inf, vals)

    def face(self, x0):
        x0 = self.flat(x0)
        if np.min(x0, initial=0.0) < -1e-12:
            raise ValueError("x0 must be nonnegative")
        return NonnegFace(x0)

    def domain_tangent_cone(self, x0):
        x0 = self.flat(x0)
        off = np.where(~_support(x0))[0]
        G = -np.eye(self.n)[off]
        anchor = np.ones(self.n)
        return ConeSpec.from_rows(G, anchor=anchor,
                                  note="orthant tangent cone at x0")

    def dir_probe(self, x0):
        """Finite part of the directional derivative (pair with the domain
        tangent cone)."""
        from ..cones import CallableFn
        n = self.n
        ones = np.ones(n)
        return CallableFn(lambda h: float(h.sum()),
                          lambda H: np.atleast_2d(H).sum(axis=1),
                          lambda h: ones.copy(),
                          pieces=None)

    def critical_cone(self, x0):
        x0 = self.flat(x0)
        off = np.where(~_support(x0))[0]
        G = np.vstack([-np.eye(self.n)[off], np.ones((1, self.n))])
        anchor = -x0 if self.value(x0) > 0 else None
        return ConeSpec.from_rows(G, anchor=anchor,
                                  note="orthant-restricted descent cone")

    def lipschitz(self):
        return math.sqrt(self.n)
