"""Base classes for gauge penalties and their subdifferential faces.

A gauge here is a convex, nonnegative, positively homogeneous penalty J with
J(0) = 0, possibly taking the value +inf (conic kinds carry a domain
restriction).  Every concrete gauge exposes, besides evaluation and prox, the
geometric data the certification machinery feeds on:

* ``polar`` -- the polar gauge J°(z) = inf {mu >= 0 : <z, x> <= mu J(x) for all x};
* ``dir_deriv`` -- the one-sided directional derivative J'(x0; h);
* ``face`` -- an explicit model of the subdifferential at x0 (base point,
  tangent basis of its affine hull, relative-interior margin, sampler);
* ``critical_cone`` -- the cone {h : J'(x0; h) <= 0} in a form the cone engine
  understands (lifted inequalities when polyhedral, a violation functional
  always).
"""

import numpy as np

__all__ = ["Gauge", "SubdiffFace", "VertexCapExceeded"]


class VertexCapExceeded(RuntimeError):
    """Raised when a face/piece enumeration would exceed the configured cap."""


class SubdiffFace:
    """Explicit model of a subdifferential face ∂J(x0).

    Attributes
    ----------
    base : ndarray
        A point of the face, chosen in its relative interior whenever the
        face has more than one point.
    tangent : ndarray, shape (n, t)
        Orthonormal basis of aff(∂J(x0)) - base.  ``t = 0`` for singleton
        faces.
    param_desc : str
        Human-readable description of the parameter set (box, spectral ball,
        per-block balls, nonpositive orthant, ...).
    """

    base = None
    tangent = None
    param_desc = ""

    def margin(self, z):
        """Slack of z inside the face; positive iff z lies in its relative
        interior.  Returns -inf when z is not in the face at all, +inf when
        the face is a singleton containing z."""
        raise NotImplementedError

    def contains(self, z, tol=1e-9):
        """Whether z belongs to the face up to tolerance."""
        raise NotImplementedError

    def sample(self, rng, count):
        """Draw ``count`` points of the face (rows)."""
        raise NotImplementedError

    @property
    def dim(self):
        return 0 if self.tangent is None else self.tangent.shape[1]


class Gauge:
    """Abstract gauge penalty on a flat ambient space of dimension ``n``.

    Matrix-shaped kinds flatten row-major; all engine-level code works on
    flat vectors and the gauge reshapes internally.
    """

    kind = "abstract"
    is_polyhedral = False
    #: True for kinds whose J includes a cone indicator (domain restriction)
    is_conic = False

    def __init__(self, n):
        self.n = int(n)

    # -- evaluation ---------------------------------------------------------

    def value(self, x):
        raise NotImplementedError

    def value_batch(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([self.value(row) for row in X])

    def prox(self, x, tau):
        """argmin_z 0.5 ||z - x||^2 + tau * J(z)."""
        raise NotImplementedError

    def polar(self, z):
        raise NotImplementedError

    # -- first-order geometry ----------------------------------------------

    def dir_deriv(self, x0, h):
        """One-sided directional derivative J'(x0; h).

        Conic kinds return +inf when h leaves the tangent cone of the domain
        at x0.
        """
        raise NotImplementedError

    def dir_deriv_batch(self, x0, H):
        H = np.asarray(H, dtype=float)
        return np.array([self.dir_deriv(x0, row) for row in H])

    def face(self, x0):
        """Subdifferential face model at x0 (J(x0) must be finite)."""
        raise NotImplementedError

    def descent_pieces(self, x0):
        """Rows z_i with J'(x0; h) = max_i <z_i, h>, or None.

        Only finite polyhedral kinds can supply this (it is the vertex list
        of ∂J(x0)); the exact piecewise-linear sphere engine consumes it.
        Raises VertexCapExceeded past the configured cap.
        """
        return None

    def critical_cone(self, x0):
        """ConeSpec for {h : J'(x0; h) <= 0}."""
        raise NotImplementedError

    def domain_tangent_cone(self, x0):
        """ConeSpec of the domain's tangent cone at x0, or None.

        Finite-valued kinds return None; conic kinds return the cone on which
        the directional derivative stays finite.
        """
        return None

    def domain_residual(self, x):
        """Distance-like measure of how far x sits outside dom J.

        Zero for the finite-valued kinds.  ``value`` tolerates small
        violations for numerical robustness; this is the strict companion
        used when a candidate point must *exactly* belong to the domain.
        """
        return 0.0

    def dir_probe(self, x0):
        """Sphere-probe view of h -> J'(x0; h).

        For conic kinds this is only the finite part, to be paired with
        ``domain_tangent_cone``.  Exposes linear pieces when available so the
        exact engine can run.
        """
        from ..cones import CallableFn, LinearMaxFn
        try:
            pieces = self.descent_pieces(x0)
        except VertexCapExceeded:
            pieces = None
        if pieces is not None:
            return LinearMaxFn(pieces)
        copy = np.array(self.flat(x0))

        def subgrad(h):
            raise NotImplementedError(f"{self.kind} has no generic subgradient")

        return CallableFn(lambda h: self.dir_deriv(copy, h),
                          lambda H: self.dir_deriv_batch(copy, H),
                          subgrad)

    def lipschitz(self):
        """A global Lipschitz constant of J on its domain, w.r.t. the
        Euclidean norm."""
        raise NotImplementedError

    # -- plumbing ------------------------------------------------------------

    def flat(self, x):
        x = np.asarray(x, dtype=float)
        if x.size != self.n:
            raise ValueError(
                f"{self.kind}: expected {self.n} entries, got shape {x.shape}"
            )
        return x.reshape(self.n)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"
