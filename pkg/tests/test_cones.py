"""Tests for the polyhedral/conic computation engine."""

import numpy as np
import pytest

from gaugecert.cones import (
    ConeSpec,
    EnumerationCapExceeded,
    LinearMaxFn,
    LpFailure,
    NormMapFn,
    cone_trivial,
    kernel_basis,
    lp_solve,
    min_conic_singular,
    min_norm_point,
    nsp_constant,
    sphere_min,
)


# ---------------------------------------------------------------- lp_solve


def test_lp_solve_basic():
    # min x + y  s.t.  x >= 1, y >= 1  ->  (1, 1), value 2
    res = lp_solve(np.ones(2), A_ub=-np.eye(2), b_ub=-np.ones(2))
    assert res.status == "optimal"
    assert res.value == pytest.approx(2.0, abs=1e-10)
    assert np.allclose(res.x, [1.0, 1.0], atol=1e-9)
    assert res.kkt_residual < 1e-8


def test_lp_solve_variables_are_free_by_default():
    # min x  s.t.  -x <= 3  ->  x = -3; a nonnegative default would give 0
    res = lp_solve(np.array([1.0]), A_ub=np.array([[-1.0]]), b_ub=np.array([3.0]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(-3.0, abs=1e-10)


def test_lp_solve_statuses():
    res = lp_solve(np.array([1.0]), A_ub=np.array([[1.0]]), b_ub=np.array([5.0]))
    assert res.status == "unbounded"
    res = lp_solve(np.array([1.0]), A_ub=np.array([[1.0], [-1.0]]),
                   b_ub=np.array([1.0, -2.0]))
    assert res.status == "infeasible"


def test_lp_solve_iteration_cap_raises():
    rng = np.random.default_rng(3)
    n, m = 30, 60
    A_ub = rng.standard_normal((m, n))
    b_ub = np.abs(rng.standard_normal(m)) + 1.0
    c = rng.standard_normal(n)
    with pytest.raises(LpFailure):
        lp_solve(c, A_ub=A_ub, b_ub=b_ub, bounds=[(-5, 5)] * n, maxiter=1)


def test_lp_solve_random_equality_problems():
    # min c@x s.t. Ax = b with box bounds; verify feasibility + optimality
    # against a vertex sweep oracle is overkill, but weak duality against the
    # returned KKT residual plus feasibility is checked inside lp_solve, so
    # here we only assert self-consistency of the result fields
    rng = np.random.default_rng(4)
    for _ in range(25):
        m, n = 2, 5
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(-1, 1, n)
        b = A @ x_feas
        c = rng.standard_normal(n)
        res = lp_solve(c, A_eq=A, b_eq=b, bounds=[(-2, 2)] * n)
        assert res.status == "optimal"
        assert np.max(np.abs(A @ res.x - b)) < 1e-8
        assert res.value <= c @ x_feas + 1e-8


# ------------------------------------------------------------ kernel_basis


def test_kernel_basis_properties():
    rng = np.random.default_rng(10)
    for _ in range(30):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 8))
        A = rng.standard_normal((m, n))
        K = kernel_basis(A)
        r = np.linalg.matrix_rank(A)
        assert K.shape == (n, n - r)
        if K.shape[1]:
            assert np.max(np.abs(A @ K)) < 1e-10
            assert np.allclose(K.T @ K, np.eye(K.shape[1]), atol=1e-12)


def test_kernel_basis_rank_deficient():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])  # rank 1
    K = kernel_basis(A)
    assert K.shape == (3, 2)
    assert np.max(np.abs(A @ K)) < 1e-12


def test_kernel_basis_trivial():
    K = kernel_basis(np.eye(3))
    assert K.shape == (3, 0)


# ---------------------------------------------------------------- ConeSpec


def test_conespec_from_rows_violation():
    G = np.array([[1.0, 0.0], [0.0, 1.0]])  # cone {h <= 0}
    cone = ConeSpec.from_rows(G)
    assert cone.is_polyhedral
    assert cone.violation(np.array([-1.0, -2.0])) <= 1e-12
    assert cone.violation(np.array([0.5, -1.0])) > 0.4
    H = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 2.0]])
    v = cone.violation_batch(H)
    assert v[0] <= 1e-12 and v[1] > 0 and v[2] > 0
    # subgradient: violation(h + d) >= violation(h) + <g, d> locally
    h = np.array([0.3, -0.7])
    g = cone.violation_subgrad(h)
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = 1e-6 * rng.standard_normal(2)
        assert cone.violation(h + d) >= cone.violation(h) + g @ d - 1e-12


def test_conespec_from_violation_is_not_polyhedral():
    cone = ConeSpec.from_violation(
        2, lambda h: max(0.0, -h[0]),
        lambda H: np.maximum(0.0, -H[:, 0]))
    assert not cone.is_polyhedral
    with pytest.raises(ValueError):
        cone_trivial(cone, np.eye(2))


# ------------------------------------------------------------ cone_trivial


def test_cone_trivial_line_cases():
    # cone {h <= 0} meets span{(1,1)} in the ray t(1,1), t <= 0
    cone = ConeSpec.from_rows(np.eye(2))
    trivial, w = cone_trivial(cone, np.array([[1.0], [1.0]]))
    assert not trivial
    assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-9)
    assert np.max(cone.G_h @ w) <= 1e-9
    # cone {h1 = 0, h2 <= 0} meets span{(1,0)} only at 0
    cone2 = ConeSpec.from_rows(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))
    trivial, w = cone_trivial(cone2, np.array([[1.0], [0.0]]))
    assert trivial and w is None


def test_cone_trivial_matches_ray_oracle():
    # for a one-dimensional subspace the intersection is nontrivial exactly
    # when +K or -K lies in the cone
    rng = np.random.default_rng(0)
    for _ in range(60):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(2, 5))
        G = rng.standard_normal((m, n))
        k0 = rng.standard_normal(n)
        cone = ConeSpec.from_rows(G)
        trivial, w = cone_trivial(cone, k0[:, None])
        in_cone = np.all(G @ k0 <= 1e-12) or np.all(-(G @ k0) <= 1e-12)
        assert trivial == (not in_cone)
        if not trivial:
            assert np.max(G @ w) <= 1e-9
            # witness stays inside span{k0}
            proj = k0 * (w @ k0) / (k0 @ k0)
            assert np.linalg.norm(w - proj) < 1e-9


def test_cone_trivial_zero_subspace():
    cone = ConeSpec.from_rows(np.eye(2))
    trivial, w = cone_trivial(cone, np.zeros((2, 0)))
    assert trivial and w is None


# ---------------------------------------------------------- min_norm_point


def test_min_norm_point_frozen():
    p = min_norm_point(np.array([[1.0, 1.0], [1.0, -1.0]]))
    assert np.allclose(p, [1.0, 0.0], atol=1e-10)
    p = min_norm_point(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))
    assert np.linalg.norm(p) < 1e-10


def test_min_norm_point_segment_oracle():
    # two points: the minimum-norm point of the segment [p, q] has the
    # closed form p + t (q - p), t = clip(-p@(q-p)/||q-p||^2, 0, 1)
    rng = np.random.default_rng(12)
    for _ in range(40):
        d = int(rng.integers(1, 5))
        p, q = rng.standard_normal(d), rng.standard_normal(d)
        t = float(np.clip(-(p @ (q - p)) / ((q - p) @ (q - p)), 0.0, 1.0))
        want = p + t * (q - p)
        got = min_norm_point(np.vstack([p, q]))
        assert np.linalg.norm(got) == pytest.approx(np.linalg.norm(want), abs=1e-9)


# ---------------------------------------------------------------- sphere_min


def test_sphere_min_engines_agree():
    rng = np.random.default_rng(20)
    for _ in range(10):
        Z = rng.standard_normal((6, 4))
        K = np.linalg.qr(rng.standard_normal((4, 2)))[0]
        f = LinearMaxFn(Z)
        exact = sphere_min(f, K, engine="exact-pl")
        grid = sphere_min(f, K, engine="angular-grid")
        ms = sphere_min(f, K, engine="multistart-subgradient", seed=7)
        assert exact.certified and grid.certified and not ms.certified
        assert grid.value == pytest.approx(exact.value, abs=1e-7)
        # a heuristic probe can only overshoot the true minimum
        assert ms.value >= exact.value - 1e-9
        assert ms.value <= exact.value + 1e-5
        # the reported minimizer reproduces the reported value
        assert f.value(exact.minimizer) == pytest.approx(exact.value, abs=1e-12)


def test_sphere_min_one_dimensional():
    # on a line only +/-K matter
    Z = np.array([[1.0, 0.0], [0.0, 2.0]])
    f = LinearMaxFn(Z)
    res = sphere_min(f, np.array([[1.0], [0.0]]))
    # f(e1) = max(1, 0) = 1, f(-e1) = max(-1, 0) = 0
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(res.minimizer, [-1.0, 0.0])


def test_sphere_min_infeasible_cone():
    # cone {h1 = 0} contains no direction of span{e1}
    cone = ConeSpec.from_rows(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    f = NormMapFn(np.eye(2))
    res = sphere_min(f, np.array([[1.0], [0.0]]), cone=cone)
    assert res.value == np.inf
    assert res.minimizer is None


def test_sphere_min_validation():
    f = LinearMaxFn(np.eye(2))
    with pytest.raises(ValueError):
        sphere_min(f, np.zeros((2, 0)))
    with pytest.raises(ValueError):
        sphere_min(f, np.eye(2), cone=ConeSpec.from_rows(np.eye(2)),
                   engine="exact-pl")
    with pytest.raises(ValueError):
        sphere_min(f, np.eye(4), engine="angular-grid")
    with pytest.raises(ValueError):
        sphere_min(f, np.eye(2), engine="nope")


# ------------------------------------------------------ min_conic_singular


def test_min_conic_singular_full_sphere_is_sigma_min():
    # over the whole sphere the minimum of ||Ah|| is sqrt(lambda_min(A^T A)),
    # which is zero for wide matrices and the smallest singular value
    # otherwise -- an independent oracle for the certified grid
    rng = np.random.default_rng(30)
    for _ in range(8):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(2, 4))
        A = rng.standard_normal((m, n))
        full = ConeSpec.from_rows(np.zeros((1, n)))
        res = min_conic_singular(A, full)
        assert res.certified
        smin = float(np.sqrt(max(0.0, np.linalg.eigvalsh(A.T @ A)[0])))
        assert res.value == pytest.approx(smin, abs=1e-7)


def test_min_conic_singular_wide_matrix_sees_kernel():
    rng = np.random.default_rng(31)
    A = rng.standard_normal((1, 3))
    full = ConeSpec.from_rows(np.zeros((1, 3)))
    res = min_conic_singular(A, full)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_min_conic_singular_nonneg_arc():
    # A = [[2, 1]] restricted to the nonnegative quadrant: |2 h1 + h2| over
    # the arc is minimized at (0, 1) with value 1
    cone = ConeSpec.from_rows(-np.eye(2))
    res = min_conic_singular(np.array([[2.0, 1.0]]), cone)
    assert res.certified
    assert res.value == pytest.approx(1.0, abs=1e-4)


def test_min_conic_singular_heuristic_in_high_dimension():
    rng = np.random.default_rng(32)
    A = rng.standard_normal((6, 5))
    full = ConeSpec.from_rows(np.zeros((1, 5)))
    res = min_conic_singular(A, full, restarts=40, seed=2)
    assert not res.certified
    smin = np.linalg.svd(A, compute_uv=False)[-1]
    # heuristic: an upper bound that lands close on the full sphere
    assert res.value >= smin - 1e-9
    assert res.value == pytest.approx(smin, abs=1e-3)


# ------------------------------------------------------------- nsp_constant


def test_nsp_constant_frozen_line():
    # ker [[2, 1]] = span{(1, -2)}: mass fractions are 1/3 and 2/3
    assert nsp_constant([[2.0, 1.0]], [0]) == pytest.approx(1.0 / 3.0, abs=1e-10)
    assert nsp_constant([[2.0, 1.0]], [1]) == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_nsp_constant_edge_cases():
    assert nsp_constant([[2.0, 1.0]], []) == 0.0
    assert nsp_constant(np.eye(2), [0]) == 0.0  # trivial kernel
    with pytest.raises(ValueError):
        nsp_constant([[2.0, 1.0]], [5])
    with pytest.raises(EnumerationCapExceeded):
        nsp_constant(np.zeros((1, 16)), list(range(15)))


def test_nsp_constant_one_dimensional_kernel_oracle():
    # with a one-dimensional kernel the ratio is determined by the single
    # kernel direction, so the enumeration must reproduce it exactly
    rng = np.random.default_rng(40)
    for _ in range(20):
        n = int(rng.integers(3, 7))
        A = rng.standard_normal((n - 1, n))
        K = kernel_basis(A)
        assert K.shape[1] == 1
        h = K[:, 0]
        size = int(rng.integers(1, n))
        I = sorted(rng.choice(n, size=size, replace=False).tolist())
        got = nsp_constant(A, I)
        want = float(np.abs(h[I]).sum() / np.abs(h).sum())
        assert got == pytest.approx(want, abs=1e-9)


def test_nsp_constant_monotone_in_the_index_set():
    rng = np.random.default_rng(41)
    A = rng.standard_normal((2, 5))
    v1 = nsp_constant(A, [0])
    v2 = nsp_constant(A, [0, 3])
    v3 = nsp_constant(A, [0, 1, 3])
    assert v1 <= v2 + 1e-12 <= v3 + 2e-12
    assert v3 <= 1.0
