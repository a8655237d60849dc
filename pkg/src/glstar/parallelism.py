"""Lifting a star through the Klein correspondence.

The sphere's ambient projective 3-space embeds isometrically into P^5:
pick a 4-dim subspace U of R^6 on which the Klein form g has signature
(3,1) and carry the sphere form onto g|U.  Star lines map to 2-secants of
K inside P(U); their polars within U form the line family H of 0-secants
of K that encodes the parallelism.  Each H-line h gives a parallel class:
the 3-space W = polar_g(h) cuts K in an elliptic quadric whose Klein
preimage is a regular spread of P^3.

The practical pivot: an H-line lies inside the tangent hyperplane of a
Klein point k exactly when the g-projection of k onto U falls in the span
of the corresponding embedded star chord.  Finding the parallel class of
a line is therefore the same search as finding the star line through a
point, which the gl-star property makes unique (the projection is never
interior: g(k,k) = 0 forces a nonnegative sphere-form value).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMeet,
    HfdViolation,
    NotZeroSecant,
    SearchFailed,
)
from .projgeom import (
    HPoint,
    PLine,
    QuadricForm,
    Subspace,
    _nullspace_rows,
    join_batch,
    klein_lift,
    line_points,
    meet,
    polar,
    signature_on,
)
from .search import StarLineSearch
from .star import GlStar
from .verify import CheckReport

_KLEIN = QuadricForm.klein()


def _derived_basis() -> np.ndarray:
    """Columns: a g-orthogonal basis with g-values (1,1,1,-1,-1,-1), built
    from the dual coordinate pairing (sums then differences)."""
    D = np.zeros((6, 6))
    for i in range(3):
        D[i, i] = D[i + 3, i] = 1.0       # d_{i+1} = e_i + e_{i+3}
        D[i, i + 3] = 1.0                 # d_{i+4} = e_i - e_{i+3}
        D[i + 3, i + 3] = -1.0
    return D

_D = _derived_basis()
_D_INV = _D.T / 2.0  # columns are orthogonal of squared length 2
_S4 = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class EmbeddedStar:
    """A star together with the canonical isometric embedding into P^5."""

    star: GlStar
    basis: np.ndarray     # (6,6), columns d1..d6
    U: Subspace
    C: Subspace

    def iso(self, w):
        """Sphere coordinates (w0, w1, w2, w3) -> R^6; batch-friendly."""
        w = np.asarray(w, float)
        d_coords = np.concatenate(
            [w[..., 1:4], w[..., :1], np.zeros(w.shape[:-1] + (2,))], axis=-1)
        return d_coords @ self.basis.T

    def project_sphere_coords(self, k):
        """g-orthogonal projection of Klein vectors onto U, expressed back
        in sphere coordinates (w0, w1, w2, w3)."""
        k = np.asarray(k, float)
        kd = k @ _D_INV.T
        return np.concatenate([kd[..., 3:4], kd[..., 0:3]], axis=-1)

    def chord_span_6d(self, t, theta=0.0):
        """Embedded star-line spans, shape (n, 2, 6)."""
        A, B = self.star.chord(t, theta)
        return np.stack([self.iso(A), self.iso(B)], axis=-2)


def embed_star(star: GlStar) -> EmbeddedStar:
    U = Subspace.span(_D.T[:4])
    C = Subspace.span(_D.T[4:])
    return EmbeddedStar(star=star, basis=_D, U=U, C=C)


@dataclass(frozen=True)
class HfdLineSet:
    """The polar family H: one 0-secant of K per star line."""

    es: EmbeddedStar

    def span_at(self, t, theta=0.0):
        """Spanning pairs of H(t, theta) in R^6, shape (n, 2, 6)."""
        t = np.atleast_1d(np.asarray(t, float))
        th = np.broadcast_to(np.asarray(theta, float), t.shape)
        A, B = self.es.star.chord(t, th)
        # polar within U of span{A, B}: null directions of the 2x4 pairing
        out = np.empty((t.size, 2, 6))
        for i in range(t.size):
            Ad = np.concatenate([A[i, 1:4], A[i, :1]])
            Bd = np.concatenate([B[i, 1:4], B[i, :1]])
            N = _nullspace_rows(np.vstack([Ad @ _S4, Bd @ _S4]))
            ext = np.zeros((2, 6))
            ext[:, :4] = N
            out[i] = ext @ _D.T
        return out

    def line_subspace(self, t, theta=0.0) -> Subspace:
        return Subspace.span(self.span_at(t, theta)[0])

    def samples(self, n: int, seed: int = 0):
        """(n, 2, 6) spans at seeded random parameters."""
        rng = np.random.default_rng(seed)
        return self.span_at(rng.random(n), rng.uniform(0, 2 * np.pi, n))


def star_to_hfd(es: EmbeddedStar) -> HfdLineSet:
    return HfdLineSet(es=es)


@dataclass(frozen=True)
class ParallelClass:
    """A regular spread: the 3-space W = polar(h) and its line evaluator."""

    es: EmbeddedStar
    h_span: np.ndarray  # (2, 6)
    W: Subspace

    def contains_klein(self, k, tol: float = 1e-7) -> bool:
        return self.W.contains(np.asarray(k, float), tol=tol)

    def same_as(self, other: "ParallelClass", tol: float = 1e-7) -> bool:
        return self.W.same_as(other.W, tol=tol)


# Vector-space signatures whose null cone is an elliptic quadric.  U (the
# star's own 3-space) is (3,1); the spread 3-spaces, being polars of the
# definite H-lines, carry the opposite type (1,3) under the same sign
# convention for g.  Projectively both cut K in an elliptic subquadric.
ELLIPTIC_SIGNATURES = ((3, 1, 0), (1, 3, 0))


def class_from_hfd_line(es: EmbeddedStar, h) -> ParallelClass:
    """Parallel class owned by a 0-secant h of K (given by a (2,6) span)."""
    span = h.basis if isinstance(h, Subspace) else np.atleast_2d(np.asarray(h, float))
    if span.shape[-1] != 6:
        raise NotZeroSecant("expected a line of P^5 as a (2, 6) span")
    S = Subspace.span(span)
    if S.rank != 2:
        raise NotZeroSecant("span does not describe a line of P^5")
    sig = signature_on(_KLEIN, S)
    if sig not in ((2, 0, 0), (0, 2, 0)):
        raise NotZeroSecant(f"line meets the Klein quadric (signature {sig})")
    W = polar(S, _KLEIN)
    if signature_on(_KLEIN, W) not in ELLIPTIC_SIGNATURES:
        raise NotZeroSecant("polar 3-space does not cut an elliptic quadric")
    return ParallelClass(es=es, h_span=S.basis.copy(), W=W)


def spread_line_through(cls: ParallelClass, p) -> PLine:
    """The unique line of the spread through a point of P^3."""
    pv = p.coords if isinstance(p, HPoint) else np.asarray(p, float)
    order = np.argsort(-np.abs(pv))
    for attempt in range(2):
        # Klein vectors of three independent lines through p span the
        # alpha-plane of p; meet it with W.
        basis_idx = [i for i in order if i != order[attempt]][:3] \
            if attempt else [i for i in order[1:]]
        E = np.eye(4)[basis_idx]
        K = join_batch(np.broadcast_to(pv, (3, 4)), E)
        Ap = Subspace.span(K)
        M = meet(Ap, cls.W)
        if M.rank == 1:
            line, _ = klein_lift(M.basis[0], tol=1e-6)
            return line
    raise DegenerateMeet(
        f"alpha-plane meets the class 3-space in dimension {M.rank}, not 1")


@dataclass(frozen=True)
class Parallelism:
    """Embedded star, its H family, and the class-search machinery."""

    es: EmbeddedStar
    hfd: HfdLineSet
    search: StarLineSearch

    @property
    def star(self) -> GlStar:
        return self.es.star


def make_parallelism(star: GlStar, grid: int = 64) -> Parallelism:
    es = embed_star(star)
    return Parallelism(es=es, hfd=star_to_hfd(es),
                       search=StarLineSearch(star, grid, grid))


def _hits_for_lines(par: Parallelism, K, tol: float = 1e-8):
    """Search hits (per Klein vector row) for the star line whose H-member
    lies in each tangent hyperplane."""
    W4 = par.es.project_sphere_coords(np.atleast_2d(np.asarray(K, float)))
    norms = np.linalg.norm(W4, axis=-1)
    if np.any(norms < 1e-12 * np.linalg.norm(K)):
        raise SearchFailed("Klein vector projects to zero in the star 3-space")
    return par.search.find_batch(W4, tol=tol)


def parallel_class_of(par: Parallelism, L, tol: float = 1e-8) -> ParallelClass:
    """Parallel class of a line of P^3: exactly one H-line sits inside the
    tangent hyperplane of its Klein point."""
    k = L.p if isinstance(L, PLine) else np.asarray(L, float)
    hits = _hits_for_lines(par, k[None, :], tol=tol)[0]
    if len(hits) == 0:
        raise SearchFailed("no H-line found in the tangent hyperplane")
    if len(hits) > 1:
        raise HfdViolation(
            f"{len(hits)} H-lines found in one tangent hyperplane")
    h = par.hfd.span_at(hits[0].t, hits[0].theta)[0]
    return class_from_hfd_line(par.es, h)


def parallel_through(par: Parallelism, p, L, tol: float = 1e-8) -> PLine:
    """The unique line parallel to L through p (L itself when p is on L)."""
    pv = p.coords if isinstance(p, HPoint) else np.asarray(p, float)
    a, b = line_points(L)
    span = np.vstack([a.coords, b.coords])
    rej = pv - span.T @ np.linalg.lstsq(span.T, pv, rcond=None)[0]
    if np.linalg.norm(rej) < 1e-9 * np.linalg.norm(pv):
        return L if isinstance(L, PLine) else PLine(np.asarray(L, float))
    cls = parallel_class_of(par, L, tol=tol)
    return spread_line_through(cls, pv)


# ---------------------------------------------------------------------------
# Dimension and structure checks


def span_singular_values(hfd: HfdLineSet, n: int = 60, seed: int = 0):
    spans = hfd.samples(n, seed=seed).reshape(-1, 6)
    spans = spans / np.linalg.norm(spans, axis=1, keepdims=True)
    return np.linalg.svd(spans, compute_uv=False)


def dim_parallelism(hfd: HfdLineSet, n: int = 60, seed: int = 0,
                    cutoff: float = 1e-8) -> int:
    """Projective dimension of the span of the H family."""
    if n < 10:
        raise ValueError("need at least 10 samples")
    s = span_singular_values(hfd, n=n, seed=seed)
    rank = int(np.sum(s > cutoff * s[0]))
    return rank - 1


def check_zero_secants(hfd: HfdLineSet, n: int = 200, seed: int = 0) -> CheckReport:
    """Every sampled H-line must avoid K: the restricted form is definite,
    i.e. the restricted quadratic has negative discriminant."""
    spans = hfd.samples(n, seed=seed)
    worst = np.inf
    witness = None
    for i in range(n):
        S = spans[i]
        G = S @ _KLEIN.matrix @ S.T
        # disc = g(A,B)^2 - g(A,A) g(B,B) < 0  <=>  det of the Gram > 0
        disc = G[0, 1] ** 2 - G[0, 0] * G[1, 1]
        margin = -disc / max(np.abs(G).max() ** 2, 1e-300)
        if margin < worst:
            worst = float(margin)
            witness = (i,)
    passed = worst > 1e-12
    return CheckReport("zero_secants", bool(passed), worst,
                       witness if not passed else None, n)


def check_hfd(par: Parallelism, n: int = 100, seed: int = 0,
              tol: float = 1e-8) -> CheckReport:
    """For random lines of P^3, the tangent hyperplane of the Klein point
    contains exactly one H-line (one search cluster)."""
    rng = np.random.default_rng(seed)
    P1 = rng.normal(size=(n, 4))
    P2 = rng.normal(size=(n, 4))
    K = join_batch(P1, P2)
    hits = _hits_for_lines(par, K, tol=tol)
    counts = np.array([len(h) for h in hits])
    bad = np.nonzero(counts != 1)[0]
    res = max((h[0].residual for h in hits if h), default=0.0)
    if bad.size:
        i = int(bad[0])
        return CheckReport("hfd", False, float(counts[i]), tuple(K[i]), n)
    return CheckReport("hfd", True, float(res), None, n)


def torus_action(theta: float) -> np.ndarray:
    """The g-isometry that is the identity on U and rotates the (0,2)-
    complement C by theta, in Plücker coordinates."""
    R = np.eye(6)
    c, s = np.cos(theta), np.sin(theta)
    R[4:, 4:] = [[c, -s], [s, c]]
    return _D @ R @ _D_INV


def check_torus_fixes_classes(es: EmbeddedStar, n: int = 50,
                              n_theta: int = 16, seed: int = 0,
                              tol: float = 1e-9) -> CheckReport:
    """The circle acting on C is a g-isometry and fixes every H-line
    (hence every parallel class) setwise."""
    hfd = star_to_hfd(es)
    spans = hfd.samples(n, seed=seed)
    worst = 0.0
    witness = None
    G = _KLEIN.matrix
    for theta in np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False):
        tau = torus_action(theta)
        iso_res = float(np.abs(tau.T @ G @ tau - G).max())
        if iso_res > 1e-12:
            return CheckReport("torus_fixes_classes", False, iso_res,
                               (theta,), n * n_theta)
        for i in range(n):
            S = spans[i]
            Q = S / np.linalg.norm(S, axis=1, keepdims=True)
            mapped = Q @ tau.T
            rej = mapped - (mapped @ Q.T) @ Q
            r = float(np.linalg.norm(rej, axis=1).max())
            if r > worst:
                worst = r
                witness = (float(theta), i)
    passed = worst < tol
    return CheckReport("torus_fixes_classes", bool(passed), worst,
                       witness if not passed else None, n * n_theta)
