"""Gauge invariants (homogeneity, convexity, polar duality, prox optimality)
plus frozen oracles for the closed-form special cases."""

import numpy as np
import pytest

from gaugecert.gauges import (
    AnalysisL1Gauge,
    GroupL12Gauge,
    L1Gauge,
    NonnegL1Gauge,
    NuclearGauge,
    SdpTraceGauge,
    SortedWeightedL1Gauge,
    VertexCapExceeded,
)


def sample_domain(gauge, rng, count):
    """Draw points with J finite (PSD matrices / nonnegative vectors where
    the domain is restricted, plain Gaussians elsewhere)."""
    n = gauge.n
    if gauge.kind == "nonneg_l1":
        return np.abs(rng.standard_normal((count, n)))
    if gauge.kind == "sdp_trace":
        d = gauge.nmat
        out = np.empty((count, n))
        for i in range(count):
            G = rng.standard_normal((d, d))
            out[i] = (G @ G.T).ravel()
        return out
    return rng.standard_normal((count, n))


def make_zoo():
    rng = np.random.default_rng(11)
    D = rng.standard_normal((4, 6))
    return [
        L1Gauge(4),
        AnalysisL1Gauge(D),
        SortedWeightedL1Gauge([2.0, 1.5, 1.0, 0.5]),
        GroupL12Gauge(5, [[0, 1], [2, 3], [4]]),
        NonnegL1Gauge(4),
        NuclearGauge((2, 2)),
        SdpTraceGauge(np.array([[2.0, 0.3], [0.3, 1.0]])),
    ]


def test_zero_nonneg_homogeneous_convex():
    rng = np.random.default_rng(0)
    for gauge in make_zoo():
        assert gauge.value(np.zeros(gauge.n)) == 0.0
        X = sample_domain(gauge, rng, 60)
        Y = sample_domain(gauge, rng, 60)
        for x, y in zip(X, Y):
            jx, jy = gauge.value(x), gauge.value(y)
            assert jx >= 0.0
            t = float(rng.uniform(0.1, 5.0))
            assert gauge.value(t * x) == pytest.approx(t * jx, rel=1e-10, abs=1e-12)
            mid = gauge.value(0.5 * (x + y))
            assert mid <= 0.5 * (jx + jy) + 1e-9 * (1 + jx + jy), gauge.kind


def test_value_batch_matches_value():
    rng = np.random.default_rng(1)
    for gauge in make_zoo():
        X = sample_domain(gauge, rng, 40)
        vals = gauge.value_batch(X)
        for i in range(X.shape[0]):
            assert vals[i] == pytest.approx(gauge.value(X[i]), rel=1e-12, abs=1e-12)


def test_prox_minimizes_model():
    # prox(v, tau) must beat every sampled competitor on tau*J(u) + ||u-v||^2/2
    rng = np.random.default_rng(2)
    for gauge in make_zoo():
        for _ in range(10):
            v = rng.standard_normal(gauge.n)
            tau = float(rng.uniform(0.05, 2.0))
            p = gauge.prox(v, tau)
            assert gauge.domain_residual(p) <= 1e-8
            fp = tau * gauge.value(p) + 0.5 * np.sum((p - v) ** 2)
            comp = [np.zeros(gauge.n), v]
            comp.extend(sample_domain(gauge, rng, 30))
            comp.extend(p + 1e-3 * rng.standard_normal((30, gauge.n)))
            for u in comp:
                ju = gauge.value(u)
                if not np.isfinite(ju):
                    continue
                fu = tau * ju + 0.5 * np.sum((u - v) ** 2)
                assert fp <= fu + 1e-8, (gauge.kind, fp - fu)


def test_polar_inequality_and_homogeneity():
    rng = np.random.default_rng(3)
    for gauge in make_zoo():
        Z = rng.standard_normal((25, gauge.n))
        X = sample_domain(gauge, rng, 50)
        for z in Z:
            pz = gauge.polar(z)
            t = float(rng.uniform(0.2, 4.0))
            if np.isfinite(pz):
                assert gauge.polar(t * z) == pytest.approx(t * pz, rel=1e-9, abs=1e-12)
            for x in X:
                jx = gauge.value(x)
                assert float(z @ x) <= pz * jx + 1e-8 * (1 + abs(pz) * (1 + jx))


def test_l1_frozen():
    g = L1Gauge(3)
    assert g.value([3.0, -0.2, 0.05]) == pytest.approx(3.25)
    assert np.allclose(g.prox([3.0, -0.2, 0.05], 0.5), [2.5, 0.0, 0.0])
    assert g.polar([1.0, -4.0, 0.3]) == pytest.approx(4.0)
    assert g.lipschitz() == pytest.approx(np.sqrt(3))


def test_wsl1_frozen():
    # prox oracle from a multiscale grid search (41-point refinement, 6 stages)
    g = SortedWeightedL1Gauge([2.0, 1.0])
    assert np.allclose(g.prox([3.0, 1.5], 1.0), [1.0, 0.5], atol=1e-9)
    # polar oracle from exact enumeration of unit-ball vertices
    g3 = SortedWeightedL1Gauge([2.0, 1.5, 0.5])
    assert g3.polar([1.0, -2.0, 0.3]) == pytest.approx(1.0, abs=1e-12)
    assert g3.value([1.0, -2.0, 0.3]) == pytest.approx(2 * 2 + 1.5 * 1 + 0.5 * 0.3)
    with pytest.raises(ValueError):
        SortedWeightedL1Gauge([1.0, 2.0])  # increasing
    with pytest.raises(ValueError):
        SortedWeightedL1Gauge([0.0, 0.0])  # zero lead weight


def test_group_frozen():
    g = GroupL12Gauge(3, [[0, 1], [2]])
    assert g.value([3.0, 4.0, -2.0]) == pytest.approx(7.0)
    assert np.allclose(g.prox([3.0, 4.0, -2.0], 1.0), [2.4, 3.2, -1.0])
    assert g.polar([3.0, 4.0, -2.0]) == pytest.approx(5.0)  # max block norm


def test_nonneg_frozen():
    g = NonnegL1Gauge(2)
    assert g.value([1.2, 0.0]) == pytest.approx(1.2)
    assert not np.isfinite(g.value([1.0, -0.5]))
    assert np.allclose(g.prox([1.2, -0.5], 0.2), [1.0, 0.0])
    assert g.polar([0.5, -3.0]) == pytest.approx(0.5)  # max positive part
    assert g.domain_residual([1.0, -0.25]) == pytest.approx(0.25)
    assert g.domain_residual([1.0, 0.0]) == 0.0


def test_nuclear_frozen():
    g = NuclearGauge((2, 2))
    X = np.diag([3.0, 0.2]).ravel()
    assert g.value(X) == pytest.approx(3.2)
    assert np.allclose(g.prox(X, 0.5), np.diag([2.5, 0.0]).ravel())
    assert g.polar(X) == pytest.approx(3.0)  # spectral norm
    assert g.lipschitz() == pytest.approx(np.sqrt(2))


def test_sdp_frozen():
    C = np.diag([2.0, 1.0])
    g = SdpTraceGauge(C)
    X = np.array([[1.0, 0.2], [0.2, 0.5]])
    assert g.value(X.ravel()) == pytest.approx(float(np.sum(C * X)))
    assert not np.isfinite(g.value(np.diag([1.0, -0.1]).ravel()))
    assert g.domain_residual(np.diag([1.0, -0.1]).ravel()) == pytest.approx(0.1)
    # polar oracle: lambda_max(C^{-1/2} Z C^{-1/2}), floored at zero
    Z = np.array([[3.0, 0.5], [0.5, -1.0]])
    assert g.polar(Z.ravel()) == pytest.approx(1.549038105676658, abs=1e-9)
    # trace identity of the whitened matrix: lam_max + lam_min = 1/2
    assert g.polar(-Z.ravel()) == pytest.approx(1.049038105676658, abs=1e-9)
    # prox: project v - tau*C onto the PSD cone
    got = g.prox(np.diag([2.0, -1.0]).ravel(), 0.5)
    assert np.allclose(got, np.diag([1.0, 0.0]).ravel())
    with pytest.raises(ValueError):
        SdpTraceGauge(np.array([[1.0, 0.5], [0.0, 1.0]]))  # not symmetric


def test_analysis_value_and_orthogonal_prox():
    th = 0.3
    D = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    g = AnalysisL1Gauge(D)
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = rng.standard_normal(2)
        assert g.value(x) == pytest.approx(float(np.abs(D.T @ x).sum()))
        # orthogonal D: prox = D o soft-threshold o D^T
        tau = float(rng.uniform(0.1, 1.0))
        u = D.T @ x
        soft = np.sign(u) * np.maximum(np.abs(u) - tau, 0.0)
        assert np.allclose(g.prox(x, tau), D @ soft, atol=1e-7)


def test_dir_deriv_matches_finite_differences():
    rng = np.random.default_rng(5)
    for gauge in make_zoo():
        X = sample_domain(gauge, rng, 8)
        for x0 in X:
            if gauge.kind == "sdp_trace":  # keep x0 + t*h inside the domain
                x0 = x0 + 2.0 * np.eye(gauge.nmat).ravel()
            for _ in range(4):
                h = rng.standard_normal(gauge.n)
                if gauge.kind == "sdp_trace":
                    # the domain holds symmetric matrices only, so probe
                    # along symmetric directions
                    Hm = h.reshape(gauge.nmat, gauge.nmat)
                    h = (0.5 * (Hm + Hm.T)).ravel()
                t = 1e-7
                fd = (gauge.value(x0 + t * h) - gauge.value(x0)) / t
                dd = gauge.dir_deriv(x0, h)
                assert dd == pytest.approx(fd, abs=5e-6 * (1 + np.linalg.norm(h)))
            H = rng.standard_normal((7, gauge.n))
            if gauge.kind == "sdp_trace":
                Hm = H.reshape(7, gauge.nmat, gauge.nmat)
                H = (0.5 * (Hm + np.transpose(Hm, (0, 2, 1)))).reshape(7, -1)
            got = gauge.dir_deriv_batch(x0, H)
            want = [gauge.dir_deriv(x0, h) for h in H]
            assert np.allclose(got, want, atol=1e-10)


def test_lipschitz_is_an_upper_bound():
    rng = np.random.default_rng(6)
    for gauge in make_zoo():
        L = gauge.lipschitz()
        X = sample_domain(gauge, rng, 200)
        vals = gauge.value_batch(X)
        norms = np.linalg.norm(X, axis=1)
        assert np.all(vals <= L * norms + 1e-9), gauge.kind


def test_face_margins_frozen():
    # l1 at (1, 0): z must match the sign exactly on the support
    f = L1Gauge(2).face([1.0, 0.0])
    assert f.margin([1.0, 0.4]) == pytest.approx(0.6)
    assert f.margin([1.0, -1.0]) == pytest.approx(0.0)
    assert f.margin([0.9, 0.0]) == -np.inf
    # nonneg: off-support slack is one-sided
    fn = NonnegL1Gauge(2).face([1.0, 0.0])
    assert fn.margin([1.0, -2.0]) == pytest.approx(3.0)
    assert fn.margin([1.0, 1.2]) == pytest.approx(-0.2)
    # nuclear at e1 e1^T: slack is 1 - sigma_max of the free block
    fm = NuclearGauge((2, 2)).face(np.diag([1.0, 0.0]).ravel())
    assert fm.margin(np.diag([1.0, 0.5]).ravel()) == pytest.approx(0.5)
    assert fm.margin(np.diag([0.8, 0.0]).ravel()) == -np.inf
    # sdp at e1 e1^T with C = I: slack of Z = diag(1, t) is 1 - t
    fs = SdpTraceGauge(np.eye(2)).face(np.diag([1.0, 0.0]).ravel())
    assert fs.margin(np.diag([1.0, 0.25]).ravel()) == pytest.approx(0.75)
    assert fs.contains(np.diag([1.0, 0.25]).ravel())


def test_face_membership_sampled():
    # sampled face points satisfy the subgradient inequality
    # J(y) >= J(x0) + <z, y - x0> for all y
    rng = np.random.default_rng(7)
    for gauge in make_zoo():
        X0 = sample_domain(gauge, rng, 4)
        for x0 in X0:
            if gauge.kind == "sdp_trace":
                x0 = x0 + 0.5 * np.eye(gauge.nmat).ravel()
            face = gauge.face(x0)
            Z = face.sample(rng, 6)
            Y = sample_domain(gauge, rng, 30)
            j0 = gauge.value(x0)
            for z in Z:
                assert face.margin(z) >= -1e-9
                for y in Y:
                    jy = gauge.value(y)
                    assert jy >= j0 + float(z @ (y - x0)) - 1e-7 * (1 + jy + j0)


def test_wsl1_vertex_cap():
    # distinct weights at a dense tie point make the face combinatorial:
    # every assignment of the 13 weights to the 13 tied coordinates is a
    # vertex, and 13! blows past the enumeration cap
    g = SortedWeightedL1Gauge(np.arange(13, 0, -1, dtype=float))
    with pytest.raises(VertexCapExceeded):
        g.face(np.ones(13))
