"""Involutions of the unit sphere and rotational surface profiles.

A star is held as a fixed-point-free involution sigma of the unit sphere
S^2; its lines are the chords q v sigma(q).  Rotational stars (invariant
under rotations about the z-axis Z) are generated from their restriction
to the half meridian p_t = (sqrt(1-t^2), 0, t), t in [0, 1], and completed
equivariantly: the completion is forced on the lower hemisphere by
inverting the (strictly decreasing) height of the meridian image.

Rotational stars also carry a profile: a family of surfaces of revolution

    a(t)^2 (x^2 + y^2) - (z - b(t))^2 = c(t)^2

(cones when c = 0, one-sheet hyperboloids otherwise) with a regulus choice
per hyperboloid.  For a chord of the unit sphere on such a surface the
second intersection point has height -t + 2 b / (1 + a^2), which makes the
meridian image of a profile star closed-form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EvalError, InvalidInput
from .functions import bisect_monotone
from .projgeom import PLine, join

_T_EPS = 1e-12
_CONE_TOL = 1e-9


class Handedness(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    MEETS_AXIS = "meets_axis"

    @property
    def sign(self) -> float:
        """+1 for the right regulus, -1 for the left."""
        if self is Handedness.RIGHT:
            return 1.0
        if self is Handedness.LEFT:
            return -1.0
        raise InvalidInput("MEETS_AXIS has no regulus sign")


def rotate_z(points, theta):
    """Rotate 3-vectors about the z-axis; broadcasts over leading axes."""
    p = np.asarray(points, float)
    th = np.asarray(theta, float)
    c, s = np.cos(th), np.sin(th)
    out = np.empty(np.broadcast(p[..., 0], th).shape + (3,))
    out[..., 0] = c * p[..., 0] - s * p[..., 1]
    out[..., 1] = s * p[..., 0] + c * p[..., 1]
    out[..., 2] = p[..., 2] * np.ones_like(th)
    return out


def meridian_point(t):
    """p_t = (sqrt(1-t^2), 0, t) for t in [-1, 1]."""
    t = np.asarray(t, float)
    x = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    return np.stack([x, np.zeros_like(t), t], axis=-1)


def fibonacci_sphere(n: int):
    """n nearly uniform points on S^2 (deterministic)."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = np.pi * (3.0 - np.sqrt(5.0)) * i
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=-1)


def homogenize(q):
    """Affine sphere points (..., 3) -> homogeneous (..., 4)."""
    q = np.asarray(q, float)
    out = np.empty(q.shape[:-1] + (4,))
    out[..., 0] = 1.0
    out[..., 1:] = q
    return out


# ---------------------------------------------------------------------------
# Surface entries and profiles


@dataclass(frozen=True)
class SurfaceEntry:
    """One member of a rotational profile: a^2(x^2+y^2) - (z-b)^2 = c^2."""

    kind: str  # axis | horizontal_star | cone | hyperboloid
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    handedness: Handedness | None = None

    def __post_init__(self):
        if self.kind not in ("axis", "horizontal_star", "cone", "hyperboloid"):
            raise InvalidInput(f"unknown surface kind {self.kind!r}")
        if self.kind in ("cone", "hyperboloid") and self.a <= 0:
            raise InvalidInput("surface slope a must be positive")
        if self.kind == "cone" and self.c != 0.0:
            raise InvalidInput("a cone has c = 0")
        if self.kind == "hyperboloid" and self.c <= 0.0:
            raise InvalidInput("a hyperboloid has c > 0")

    def residual(self, points) -> np.ndarray:
        """Algebraic residual of the surface equation at affine points."""
        p = np.atleast_2d(np.asarray(points, float))
        r2 = p[:, 0] ** 2 + p[:, 1] ** 2
        return self.a ** 2 * r2 - (p[:, 2] - self.b) ** 2 - self.c ** 2


@dataclass(frozen=True)
class RotationalProfile:
    """t in (0, 1) -> surface coefficients, with the axis at t=1 and the
    horizontal star through the origin at t=0."""

    a_of_t: Callable
    b_of_t: Callable
    c_of_t: Callable
    handedness_sign: Callable = field(default=None)  # t -> +-1 (right/left)

    def __post_init__(self):
        if self.handedness_sign is None:
            object.__setattr__(self, "handedness_sign",
                               lambda t: np.ones_like(np.asarray(t, float)))

    def coefficients(self, t):
        t = np.asarray(t, float)
        return (np.asarray(self.a_of_t(t), float),
                np.asarray(self.b_of_t(t), float),
                np.asarray(self.c_of_t(t), float))

    def entry_at(self, t: float) -> SurfaceEntry:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InvalidInput("profile parameter must lie in [0, 1]")
        if t >= 1.0 - _T_EPS:
            return SurfaceEntry("axis")
        if t <= _T_EPS:
            return SurfaceEntry("horizontal_star")
        a, b, c = (float(np.asarray(v).ravel()[0])
                   for v in self.coefficients(np.array([t])))
        if c <= _CONE_TOL * max(a, 1.0):
            return SurfaceEntry("cone", a=a, b=b, c=0.0)
        hand = Handedness.RIGHT if self.handedness_sign(np.array([t]))[0] > 0 \
            else Handedness.LEFT
        return SurfaceEntry("hyperboloid", a=a, b=b, c=c, handedness=hand)

    def meridian_image(self, t):
        """sigma(p_t) on the meridian, closed form from the surface data."""
        t = np.atleast_1d(np.asarray(t, float))
        out = np.empty(t.shape + (3,))
        lo = t <= _T_EPS
        hi = t >= 1.0 - _T_EPS
        out[lo] = (-1.0, 0.0, 0.0)
        out[hi] = (0.0, 0.0, -1.0)
        mid = ~(lo | hi)
        if np.any(mid):
            tm = t[mid]
            a, b, c = self.coefficients(tm)
            hs = np.asarray(self.handedness_sign(tm), float)
            xt = np.sqrt(1.0 - tm * tm)
            # ruling direction: dy from c directly (dx^2 + dy^2 = 1 holds
            # because p_t is on the surface; sqrt(1 - dx^2) would lose the
            # cone case c = 0 to rounding)
            dx = np.clip((tm - b) / (a * xt), -1.0, 1.0)
            dy = hs * c / (a * xt)
            one_a2 = 1.0 + a * a
            lam = -2.0 * (tm * one_a2 - b) / (a * one_a2)
            m = np.stack([xt + lam * dx, lam * dy, -tm + 2.0 * b / one_a2], axis=-1)
            m /= np.linalg.norm(m, axis=-1, keepdims=True)
            out[mid] = m
        return out

    @classmethod
    def from_meridian(cls, meridian_image) -> "RotationalProfile":
        """Recover surface coefficients from a meridian involution map.

        The rotation orbit of the chord p_t v m(t) sweeps a surface of
        revolution; fitting x^2+y^2 as a quadratic in z along the chord
        yields (a, b, c).
        """

        def abc(t):
            t = np.atleast_1d(np.asarray(t, float))
            xt = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
            m = np.atleast_2d(meridian_image(t))
            d0 = m[:, 0] - xt
            d1 = m[:, 1]
            dz = m[:, 2] - t
            dz = np.where(np.abs(dz) < 1e-300, -1e-300, dz)
            A = (d0 * d0 + d1 * d1) / (dz * dz)
            B = 2.0 * xt * d0 / dz - 2.0 * t * A
            C = xt * xt - 2.0 * t * xt * d0 / dz + t * t * A
            A = np.maximum(A, 1e-300)
            a = 1.0 / np.sqrt(A)
            b = -B / (2.0 * A)
            c2 = np.clip(C / A - b * b, 0.0, None)
            return a, b, np.sqrt(c2)

        def hand_sign(t):
            m = np.atleast_2d(meridian_image(np.atleast_1d(np.asarray(t, float))))
            s = -np.sign(m[:, 1])
            return np.where(s == 0.0, 1.0, s)

        return cls(a_of_t=lambda t: abc(t)[0],
                   b_of_t=lambda t: abc(t)[1],
                   c_of_t=lambda t: abc(t)[2],
                   handedness_sign=hand_sign)


# ---------------------------------------------------------------------------
# Equivariant completion of a meridian involution


class RotationalSigma:
    """Fixed-point-free involution of S^2 generated from its meridian values
    and completed to commute with all rotations about Z.

    For a query in the closed upper hemisphere, rotate onto the meridian
    (t = height), apply the meridian map, rotate back.  For the open lower
    hemisphere the involution property forces the value: find the meridian
    parameter whose image height matches the query, align azimuths, and
    return the rotated base point.
    """

    def __init__(self, meridian_image, z_of_t=None, t_of_z=None,
                 table_size: int = 2048):
        self._meridian_image = meridian_image
        if z_of_t is None:
            z_of_t = lambda t: np.asarray(meridian_image(t))[..., 2]
        self._z_of_t = z_of_t
        ts = np.linspace(0.0, 1.0, table_size)
        zs = np.asarray(z_of_t(ts), float)
        if not (abs(zs[0]) < 1e-7 and abs(zs[-1] + 1.0) < 1e-7):
            raise EvalError("meridian image height must run from 0 to -1")
        if np.any(np.diff(zs) > 1e-10):
            raise EvalError("meridian image height is not decreasing; "
                            "the equivariant completion is ill-posed")
        self._t_of_z = t_of_z

    def meridian_image(self, t):
        return self._meridian_image(np.asarray(t, float))

    def _invert_height(self, z):
        if self._t_of_z is not None:
            return np.asarray(self._t_of_z(z), float)
        return bisect_monotone(self._z_of_t, z, 0.0, 1.0)

    def __call__(self, q):
        q = np.asarray(q, float)
        single = q.ndim == 1
        Q = np.atleast_2d(q)
        norms = np.linalg.norm(Q, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise InvalidInput("sigma expects points on the unit sphere")
        Q = Q / norms[:, None]
        qz = np.clip(Q[:, 2], -1.0, 1.0)
        theta = np.arctan2(Q[:, 1], Q[:, 0])
        out = np.empty_like(Q)
        upper = qz >= 0.0
        if np.any(upper):
            m = self.meridian_image(qz[upper])
            out[upper] = rotate_z(m, theta[upper])
        lower = ~upper
        if np.any(lower):
            t = self._invert_height(qz[lower])
            m = self.meridian_image(t)
            psi = theta[lower] - np.arctan2(m[:, 1], m[:, 0])
            out[lower] = rotate_z(meridian_point(t), psi)
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        return out[0] if single else out


# ---------------------------------------------------------------------------
# The star itself


@dataclass(frozen=True)
class GlStar:
    """A generalized line star: involution of S^2 plus optional profile."""

    label: str
    sigma_fn: Callable
    profile: RotationalProfile | None = None
    tags: tuple[str, ...] = ()

    def sigma(self, q):
        """Image of q under the involution; accepts (3,) or (n, 3)."""
        return self.sigma_fn(q)

    def line_through(self, q) -> PLine:
        """The star line q v sigma(q) as a Plücker line."""
        q = np.asarray(q, float)
        return join(homogenize(q), homogenize(self.sigma(q)))

    def sphere_chord(self, t, theta=0.0):
        """Sphere endpoints (q, sigma(q)) for q = R_theta p_t; vectorized."""
        t = np.atleast_1d(np.asarray(t, float))
        th = np.broadcast_to(np.asarray(theta, float), t.shape)
        q = rotate_z(meridian_point(t), th)
        return q, self.sigma(q)

    def chord(self, t, theta=0.0):
        """Homogeneous endpoint pairs of the star lines, shape (n, 4) each."""
        q, m = self.sphere_chord(t, theta)
        return homogenize(q), homogenize(m)

    def is_rotational(self) -> bool:
        return "rotational" in self.tags


def sigma(star: GlStar, q):
    return star.sigma(q)


def line_through(star: GlStar, q) -> PLine:
    return star.line_through(q)


def meridian_line(profile, t: float) -> PLine:
    """The star line through p_t, from a profile or a star.

    t=0 gives the x-axis, t=1 the z-axis Z; in between the line lies on
    the profile surface at t, in the regulus the profile names.
    """
    if isinstance(profile, GlStar):
        if profile.profile is not None:
            profile = profile.profile
        else:
            A, B = profile.chord(np.array([float(t)]))
            return join(A[0], B[0])
    m = profile.meridian_image(np.array([float(t)]))[0]
    p = meridian_point(float(t))
    return join(homogenize(p), homogenize(m))


def handedness_of(L, tol: float = 1e-10) -> Handedness:
    """Regulus orientation of a line: with points ordered by increasing z,
    RIGHT when x1*y2 - x2*y1 > 0, LEFT when < 0, MEETS_AXIS when it
    vanishes (the line meets Z, possibly at infinity)."""
    p = L.p if isinstance(L, PLine) else np.asarray(L, float)
    scale = np.linalg.norm(p)
    det = p[5]  # p12 = x1*y2 - x2*y1 for any two spanning points
    if abs(det) < tol * scale:
        return Handedness.MEETS_AXIS
    dz = p[2]  # p03 orients the line by increasing z
    if dz == 0.0:
        raise InvalidInput("horizontal line missing the axis has no handedness")
    return Handedness.RIGHT if det * np.sign(dz) > 0 else Handedness.LEFT


def surface_mesh(entry: SurfaceEntry, n_u: int = 32, n_v: int = 64,
                 z_range: tuple[float, float] = (-2.0, 2.0)):
    """Triangulate a profile surface of revolution, clipped to a z-range.

    Returns (vertices (m, 3), faces (k, 3) of 0-based indices).  Axis and
    horizontal-star entries degenerate to polylines (empty face list).
    """
    if n_u < 2 or n_v < 2:
        raise InvalidInput("mesh resolutions must be at least 2")
    z0, z1 = z_range
    if entry.kind == "axis":
        zs = np.linspace(z0, z1, n_u)
        verts = np.stack([np.zeros_like(zs), np.zeros_like(zs), zs], axis=-1)
        return verts, np.empty((0, 3), dtype=int)
    if entry.kind == "horizontal_star":
        xs = np.linspace(z0, z1, n_u)
        verts = np.stack([xs, np.zeros_like(xs), np.zeros_like(xs)], axis=-1)
        return verts, np.empty((0, 3), dtype=int)
    zs = np.linspace(z0, z1, n_u)
    thetas = np.linspace(0.0, 2.0 * np.pi, n_v, endpoint=False)
    r = np.sqrt((entry.c ** 2 + (zs - entry.b) ** 2)) / entry.a
    Z, TH = np.meshgrid(zs, thetas, indexing="ij")
    R = np.repeat(r[:, None], n_v, axis=1)
    verts = np.stack([R * np.cos(TH), R * np.sin(TH), Z], axis=-1).reshape(-1, 3)
    faces = []
    for i in range(n_u - 1):
        for j in range(n_v):
            j2 = (j + 1) % n_v
            a = i * n_v + j
            b = i * n_v + j2
            c = (i + 1) * n_v + j
            d = (i + 1) * n_v + j2
            faces.append((a, b, d))
            faces.append((a, d, c))
    return verts, np.asarray(faces, dtype=int)
