"""Numerical property checkers for star axioms and symmetry classes.

Every check is deterministic for a fixed seed and returns a CheckReport.
Sample sets are partitioned and may be evaluated by a small thread pool
(GLSTAR_THREADS caps the worker count); reductions are order-independent
so reports are reproducible bit for bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .projgeom import (
    QuadricForm,
    Side,
    _nullspace_rows,
    join_batch,
    klein_form_batch,
    normalize,
    point_side,
)
from .search import StarLineSearch
from .star import GlStar, fibonacci_sphere, meridian_point, rotate_z

_SPHERE = QuadricForm.unit_sphere()


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    max_residual: float
    witness: tuple | None
    samples_used: int

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"CHECK {self.name}: {status} "
                f"max_residual={self.max_residual:.17g} "
                f"samples={self.samples_used}")
        if self.witness is not None:
            coords = ",".join(f"{v:.17g}" for v in np.ravel(self.witness))
            line += f" witness={coords}"
        return line


def _workers() -> int:
    env = os.environ.get("GLSTAR_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _pmap(fn, chunks):
    w = _workers()
    if w <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, chunks))


def _chunked(arr, parts=None):
    parts = parts or _workers()
    return [c for c in np.array_split(arr, parts) if len(c)]


# ---------------------------------------------------------------------------
# Star axiom checks


def check_involution(star: GlStar, n: int = 1000, tol: float = 1e-9) -> CheckReport:
    """max |sigma(sigma(q)) - q| over a Fibonacci sphere grid."""
    grid = fibonacci_sphere(n)

    def residuals(q):
        return np.linalg.norm(star.sigma(star.sigma(q)) - q, axis=-1)

    res = np.concatenate(_pmap(residuals, _chunked(grid)))
    i = int(np.argmax(res))
    return CheckReport("involution", bool(res[i] < tol), float(res[i]),
                       tuple(grid[i]) if res[i] >= tol else None, n)


def check_fixed_point_free(star: GlStar, n: int = 1000,
                           threshold: float = 0.05) -> CheckReport:
    """min |sigma(q) - q| over the grid; must stay above the threshold.

    max_residual reports the margin (the minimum displacement)."""
    grid = fibonacci_sphere(n)

    def displacement(q):
        return np.linalg.norm(star.sigma(q) - q, axis=-1)

    disp = np.concatenate(_pmap(displacement, _chunked(grid)))
    i = int(np.argmin(disp))
    return CheckReport("fixed_point_free", bool(disp[i] > threshold),
                       float(disp[i]),
                       tuple(grid[i]) if disp[i] <= threshold else None, n)


def _chord_meet_point(A1, B1, A2, B2, tol=1e-6):
    N1 = _nullspace_rows(np.vstack([A1, B1]))
    N2 = _nullspace_rows(np.vstack([A2, B2]))
    _, s, vt = np.linalg.svd(np.vstack([N1, N2]))
    if s[-1] > tol:
        return None
    return vt[-1]


def check_no_exterior_meet(star: GlStar, n_pairs: int = 5000,
                           tol: float = 1e-8, seed: int = 0) -> CheckReport:
    """Sampled line pairs may only meet inside the sphere (or on it, at a
    shared sphere point).  Pairs are flagged as meeting when their Klein
    pairing vanishes within tol times the product of norms."""
    rng = np.random.default_rng(seed)
    t = rng.random(n_pairs)
    s = rng.random(n_pairs)
    th = rng.uniform(0.0, 2.0 * np.pi, n_pairs)
    A1, B1 = star.chord(t, np.zeros(n_pairs))
    A2, B2 = star.chord(s, th)
    K1 = join_batch(A1, B1)
    K2 = join_batch(A2, B2)
    g = klein_form_batch(K1, K2)
    norms = np.linalg.norm(K1, axis=1) * np.linalg.norm(K2, axis=1)
    flagged = np.nonzero((norms > 1e-12) & (np.abs(g) <= tol * norms))[0]
    worst = 0.0
    witness = None
    n_meet = 0
    for i in flagged:
        if _same_line(K1[i], K2[i]):
            continue
        w = _chord_meet_point(A1[i], B1[i], A2[i], B2[i])
        if w is None:
            continue
        n_meet += 1
        side = point_side(w, _SPHERE, tol=1e-6)
        if side is Side.INTERIOR:
            continue
        if side is Side.ON and _near_shared_endpoint(w, (A1[i], B1[i]),
                                                     (A2[i], B2[i])):
            continue
        val = _SPHERE.value(w / np.linalg.norm(w))
        if val > worst:
            worst = val
            witness = (float(t[i]), float(s[i]), float(th[i]),
                       *np.asarray(normalize(w).coords))
    return CheckReport("no_exterior_meet", witness is None, float(worst),
                       witness, n_pairs)


def _same_line(k1, k2, tol=1e-9):
    c = abs(float(np.dot(k1, k2))) / (np.linalg.norm(k1) * np.linalg.norm(k2))
    return 1.0 - min(c, 1.0) < tol


def _near_shared_endpoint(w, chord1, chord2, tol=1e-3):
    w = w / np.linalg.norm(w)

    def near(pts):
        d = []
        for p in pts:
            p = p / np.linalg.norm(p)
            c = abs(float(np.dot(w, p)))
            d.append(1.0 - min(c, 1.0))
        return min(d) < tol

    return near(chord1) and near(chord2)


def exterior_samples(n: int, seed: int = 0, infinity_fraction: float = 0.1):
    """Homogeneous exterior points: an affine shell 1.1 <= |w| <= 3 plus a
    slice of points at infinity."""
    rng = np.random.default_rng(seed)
    n_inf = max(1, int(round(n * infinity_fraction)))
    n_aff = n - n_inf
    u = rng.normal(size=(n_aff, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = rng.uniform(1.1, 3.0, n_aff)
    W_aff = np.hstack([np.ones((n_aff, 1)), r[:, None] * u])
    v = rng.normal(size=(n_inf, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    W_inf = np.hstack([np.zeros((n_inf, 1)), v])
    return np.vstack([W_aff, W_inf])


def check_coverage(star: GlStar, n_points: int = 200, tol: float = 1e-8,
                   seed: int = 0, search: StarLineSearch | None = None) -> CheckReport:
    """Every sampled exterior point must lie on exactly one star line."""
    W = exterior_samples(n_points, seed=seed)
    search = search or StarLineSearch(star)
    hits = search.find_batch(W, tol=tol)
    counts = np.array([len(h) for h in hits])
    bad = np.nonzero(counts != 1)[0]
    max_res = max((h[0].residual for h in hits if h), default=0.0)
    if bad.size:
        i = int(bad[0])
        return CheckReport("coverage", False, float(counts[i]),
                           tuple(W[i]), n_points)
    return CheckReport("coverage", True, float(max_res), None, n_points)


def check_rotational(star: GlStar, n: int = 100, tol: float = 1e-9,
                     seed: int = 0) -> CheckReport:
    """sigma commutes with rotations about Z on random (theta, q)."""
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(n, 3))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    th = rng.uniform(0.0, 2.0 * np.pi, n)
    res = np.linalg.norm(star.sigma(rotate_z(q, th)) -
                         rotate_z(star.sigma(q), th), axis=-1)
    i = int(np.argmax(res))
    return CheckReport("rotational", bool(res[i] < tol), float(res[i]),
                       tuple(q[i]) + (float(th[i]),) if res[i] >= tol else None,
                       n)


def check_axial(star: GlStar, n: int = 256, tol: float = 1e-8) -> CheckReport:
    """(i) every sampled star line meets Z; (ii) the reflection about the
    plane y=0 commutes with sigma."""
    t = np.linspace(0.0, 1.0, n)
    A, B = star.chord(t, np.linspace(0.0, 2.0 * np.pi, n, endpoint=False))
    K = join_batch(A, B)
    kz = np.zeros(6)
    kz[2] = 1.0
    pair = np.abs(klein_form_batch(K, kz)) / np.linalg.norm(K, axis=1)
    grid = fibonacci_sphere(n)
    zeta = np.array([1.0, -1.0, 1.0])
    comm = np.linalg.norm(star.sigma(grid * zeta) - star.sigma(grid) * zeta,
                          axis=-1)
    res = max(float(np.max(pair)), float(np.max(comm)))
    if np.max(pair) >= np.max(comm):
        i = int(np.argmax(pair))
        witness = (float(t[i]),)
    else:
        i = int(np.argmax(comm))
        witness = tuple(grid[i])
    passed = res < tol
    return CheckReport("axial", bool(passed), res,
                       witness if not passed else None, n)


def check_symmetric(star: GlStar, n: int = 256, tol: float = 1e-8) -> CheckReport:
    """Heights satisfy z(sigma(p_t)) = -t along the meridian."""
    t = np.linspace(0.0, 1.0, n)
    m = star.sigma(meridian_point(t))
    res = np.abs(m[:, 2] + t)
    i = int(np.argmax(res))
    return CheckReport("symmetric", bool(res[i] < tol), float(res[i]),
                       (float(t[i]),) if res[i] >= tol else None, n)


# ---------------------------------------------------------------------------
# Root counting


def descartes_bound(coeffs) -> int:
    """Sign changes of the coefficient sequence: an upper bound for the
    number of positive roots (Descartes)."""
    c = np.asarray(coeffs, float)
    c = c[c != 0.0]
    if c.size < 2:
        return 0
    return int(np.sum(np.diff(np.sign(c)) != 0))


def positive_root_count(fn, a_grid=None, refine_tol: float = 1e-12,
                        cluster_rtol: float = 1e-6) -> int:
    """Count positive roots of a scalar function over a log-spaced grid.

    ``fn`` is a vectorized callable of a, or a descending polynomial
    coefficient sequence (then the grid count is checked against the
    Descartes bound).  Sign-change brackets are refined by bisection and
    near-coincident roots are clustered.
    """
    bound = None
    if not callable(fn):
        coeffs = np.asarray(fn, float)
        bound = descartes_bound(coeffs)
        fn = lambda a: np.polyval(coeffs, np.asarray(a, float))
    if a_grid is None:
        a_grid = np.geomspace(1e-4, 1e4, 512)
    v = np.asarray(fn(a_grid), float)
    if not np.any(v):
        return 0
    zero = v == 0.0
    roots = list(a_grid[zero])
    s = np.sign(v)
    for i in range(len(a_grid) - 1):
        if s[i] * s[i + 1] < 0:
            lo, hi = a_grid[i], a_grid[i + 1]
            flo = v[i]
            while hi - lo > refine_tol * max(1.0, hi):
                mid = 0.5 * (lo + hi)
                fm = float(np.asarray(fn(np.array([mid])))[0])
                if fm == 0.0:
                    lo = hi = mid
                    break
                if np.sign(fm) == np.sign(flo):
                    lo = mid
                    flo = fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    roots.sort()
    count = 0
    last = None
    for r in roots:
        if last is None or (r - last) > cluster_rtol * max(1.0, r):
            count += 1
        last = r
    if bound is not None and count > bound:
        raise AssertionError(
            f"grid root count {count} exceeds the Descartes bound {bound}")
    return count


def check_pz_monotone(t_fn, s_fn, z_grid=None, n_samples: int = 256,
                      tol: float = 1e-12) -> CheckReport:
    """The covering profile p_z(a) = (a^2+1)/a^2 (z - t(a))(z + s(a)) must be
    strictly decreasing on (0, a_z) for every z != 0, where a_z bounds the
    interval on which p_z is positive."""
    from .functions import as_fn1
    t_fn = as_fn1(t_fn, (0.0, np.inf))
    s_fn = as_fn1(s_fn, (0.0, np.inf))
    if z_grid is None:
        base = np.array([0.1, 0.3, 0.5, 0.7, 0.9, 1.2, 1.5])
        z_grid = np.concatenate([base, -base])
    worst = -np.inf
    witness = None
    total = 0
    for z in np.asarray(z_grid, float):
        if z == 0.0:
            continue
        if abs(z) >= 1.0:
            a_hi = 1e4
        elif z > 0.0:
            a_hi = float(t_fn.inverse(z)) * (1.0 - 1e-9)
        else:
            a_hi = float(s_fn.inverse(-z)) * (1.0 - 1e-9)
        a = np.geomspace(1e-4, a_hi, n_samples)
        vals = (a * a + 1.0) / (a * a) * (z - np.asarray(t_fn(a), float)) \
            * (z + np.asarray(s_fn(a), float))
        d = np.diff(vals)
        total += a.size
        i = int(np.argmax(d))
        if d[i] > worst:
            worst = float(d[i])
            witness = (float(z), float(a[i]))
    passed = worst < tol
    return CheckReport("pz_monotone", bool(passed), worst,
                       witness if not passed else None, total)


# ---------------------------------------------------------------------------
# Suite runner

GEOMETRY_CHECKS = ("involution", "fixed_point_free", "no_exterior_meet",
                   "coverage", "rotational", "axial", "symmetric")


def applicable_checks(star: GlStar):
    names = ["involution", "fixed_point_free", "no_exterior_meet", "coverage"]
    if "rotational" in star.tags:
        names.append("rotational")
    if "axial" in star.tags:
        names.append("axial")
    if "symmetric" in star.tags:
        names.append("symmetric")
    return names


def run_star_checks(star: GlStar, checks=None, samples: int | None = None,
                    tol: float | None = None, seed: int = 0):
    """Run the named checks (default: all applicable ones) in a fixed order."""
    names = list(checks) if checks else applicable_checks(star)
    reports = []
    search = None
    for name in names:
        if name == "involution":
            reports.append(check_involution(star, n=samples or 1000,
                                            tol=tol or 1e-9))
        elif name == "fixed_point_free":
            reports.append(check_fixed_point_free(star, n=samples or 1000))
        elif name == "no_exterior_meet":
            reports.append(check_no_exterior_meet(star, n_pairs=samples or 5000,
                                                  tol=tol or 1e-8, seed=seed))
        elif name == "coverage":
            if search is None:
                search = StarLineSearch(star)
            reports.append(check_coverage(star, n_points=samples or 200,
                                          tol=tol or 1e-8, seed=seed,
                                          search=search))
        elif name == "rotational":
            reports.append(check_rotational(star, n=samples or 100,
                                            tol=tol or 1e-9, seed=seed))
        elif name == "axial":
            reports.append(check_axial(star, n=samples or 256, tol=tol or 1e-8))
        elif name == "symmetric":
            reports.append(check_symmetric(star, n=samples or 256,
                                           tol=tol or 1e-8))
        else:
            raise ValueError(f"unknown check {name!r}")
    return reports
