"""Tour the gauge zoo: values, polars, prox maps, and subdifferential faces.

Every regularizer in the package exposes the same method surface (value,
polar, prox, dir_deriv, face), so certification code never needs to know
which gauge it is holding.  This script walks each kind through a small
example and prints what the geometry looks like.
"""

import numpy as np

from gaugecert import (
    AnalysisL1Gauge,
    GroupL12Gauge,
    L1Gauge,
    NonnegL1Gauge,
    NuclearGauge,
    SdpTraceGauge,
    SortedWeightedL1Gauge,
)

np.set_printoptions(precision=4, suppress=True)
rng = np.random.default_rng(0)

x = np.array([1.2, 0.0, -0.4])
zoo = [
    (L1Gauge(3), x),
    (AnalysisL1Gauge(np.array([[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]])), x),
    (SortedWeightedL1Gauge(np.array([3.0, 2.0, 1.0])), x),
    (GroupL12Gauge(3, [[0, 1], [2]]), x),
    (NonnegL1Gauge(3), np.array([1.2, 0.0, 0.4])),
    (NuclearGauge((2, 2)), np.array([[2.0, 0.0], [0.0, 1.0]]).ravel()),
    (SdpTraceGauge(np.eye(2)), np.array([[2.0, 0.0], [0.0, 1.0]]).ravel()),
]


def domain_point(g, rng):
    """A random point where the gauge is finite (conic kinds restrict it)."""
    if g.kind == "nonneg_l1":
        return np.abs(rng.standard_normal(g.n))
    if g.kind == "sdp_trace":
        B = rng.standard_normal((g.nmat, g.nmat))
        return (B @ B.T).ravel()
    return rng.standard_normal(g.n)


for g, pt in zoo:
    val = g.value(pt)
    face = g.face(pt)
    shrunk = g.prox(pt, 0.25)
    print(f"=== {g.kind}")
    print(f"  point        {pt}")
    print(f"  value        {val:.4f}    lipschitz {g.lipschitz():.4f}")
    print(f"  prox(., .25) {shrunk}")
    print(f"  face dim {face.dim}, polyhedral={g.is_polyhedral}")
    # a face sample is a subgradient at pt: J(y) >= J(pt) + <z, y - pt>
    z = face.sample(rng, 1)[0]
    y = domain_point(g, rng)
    print(f"  subgradient check: J(y)={g.value(y):.4f} >= "
          f"{val + z @ (y - pt):.4f}")
    # the polar certifies it: every subgradient lies in the unit polar ball
    print(f"  polar(z) = {g.polar(z):.6f}")
    print()
