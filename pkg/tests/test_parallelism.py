import numpy as np
import pytest

from glstar.constructions import builtin_example, clifford, symmetric_star
from glstar.errors import HfdViolation, NotZeroSecant
from glstar.functions import moebius01
from glstar.parallelism import (
    _D,
    check_hfd,
    check_torus_fixes_classes,
    check_zero_secants,
    class_from_hfd_line,
    dim_parallelism,
    make_parallelism,
    parallel_class_of,
    parallel_through,
    span_singular_values,
    spread_line_through,
    torus_action,
)
from glstar.projgeom import (
    QuadricForm,
    Subspace,
    join,
    klein_form,
    klein_lift,
    line_points,
    polar,
    projective_distance,
    signature_on,
)
from glstar.star import GlStar

KLEIN = QuadricForm.klein()
SPHERE = QuadricForm.unit_sphere()
Z_AXIS = join((1, 0, 0, 0), (0, 0, 0, 1))
X_AXIS = join((1, 0, 0, 0), (0, 1, 0, 0))

CLIFF = clifford()
BUILTIN = builtin_example()
PAR_CLIFF = make_parallelism(CLIFF)
PAR_BUILTIN = make_parallelism(BUILTIN)


# --- embedding -----------------------------------------------------------------


def test_embedding_signatures():
    es = PAR_CLIFF.es
    assert signature_on(KLEIN, es.U) == (3, 1, 0)
    assert signature_on(KLEIN, es.C) == (0, 2, 0)


def test_iso_preserves_sphere_form():
    es = PAR_CLIFF.es
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        u, v = rng.normal(size=(2, 4))
        lhs = float(es.iso(u) @ KLEIN.matrix @ es.iso(v))
        rhs = float(u @ SPHERE.matrix @ v)
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-10


def test_projection_inverts_iso():
    es = PAR_CLIFF.es
    rng = np.random.default_rng(1)
    w = rng.normal(size=(10, 4))
    back = es.project_sphere_coords(es.iso(w))
    assert np.allclose(back, w)


# --- H family -------------------------------------------------------------------


def test_hfd_line_of_axis():
    # H(Z) is spanned by the embedded images of (0,1,0,0) and (0,0,1,0)
    hfd = PAR_CLIFF.hfd
    S = Subspace.span(hfd.span_at(np.array([1.0]))[0])
    es = PAR_CLIFF.es
    assert S.contains(es.iso(np.array([0.0, 1.0, 0.0, 0.0])))
    assert S.contains(es.iso(np.array([0.0, 0.0, 1.0, 0.0])))


def test_clifford_hfd_is_planar():
    # ordinary star: every H-line lies in the plane spanned by d1, d2, d3
    hfd = PAR_CLIFF.hfd
    plane = Subspace.span(_D.T[:3])
    spans = hfd.samples(40, seed=2).reshape(-1, 6)
    for v in spans:
        assert plane.contains(v, tol=1e-9)


def test_double_polar_round_trip():
    # polar within U is an involution: applying it twice returns the
    # embedded chord span
    es = PAR_BUILTIN.es
    hfd = PAR_BUILTIN.hfd
    rng = np.random.default_rng(3)
    for _ in range(20):
        t, th = rng.random(), rng.uniform(0, 2 * np.pi)
        chord = Subspace.span(es.chord_span_6d(np.array([t]), th)[0])
        h = Subspace.span(hfd.span_at(np.array([t]), th)[0])
        # back through the general polarity: polar(h) is 4-dim, meet with U
        from glstar.projgeom import meet
        W = polar(h, KLEIN)
        back = meet(W, es.U)
        assert back.same_as(chord, tol=1e-7)


def test_zero_secants():
    assert check_zero_secants(PAR_CLIFF.hfd, n=100).passed
    assert check_zero_secants(PAR_BUILTIN.hfd, n=100).passed


# --- classes and spreads -----------------------------------------------------------


def test_class_signature_and_polarity():
    # the spread 3-spaces cut K in an elliptic quadric: their vector type is
    # (1,3), the opposite of U's (3,1) (flip the sign of g to swap the two)
    hfd = PAR_BUILTIN.hfd
    rng = np.random.default_rng(4)
    for _ in range(10):
        h = hfd.span_at(np.array([rng.random()]), rng.uniform(0, 2 * np.pi))[0]
        cls = class_from_hfd_line(PAR_BUILTIN.es, h)
        assert signature_on(KLEIN, cls.W) == (1, 3, 0)
        # W's polar is h again
        assert polar(cls.W, KLEIN).same_as(Subspace.span(h), tol=1e-7)


def test_class_rejects_secant_line():
    # a line of P^5 spanned by two Klein points is not a 0-secant
    span = np.vstack([X_AXIS.p, Z_AXIS.p])
    with pytest.raises(NotZeroSecant):
        class_from_hfd_line(PAR_CLIFF.es, span)


def test_spread_line_through_own_point():
    cls = parallel_class_of(PAR_CLIFF, Z_AXIS)
    L = spread_line_through(cls, np.array([1.0, 0.0, 0.0, 0.0]))
    assert projective_distance(L.p, Z_AXIS.p) < 1e-8


def test_spread_line_disjoint_from_axis():
    cls = parallel_class_of(PAR_CLIFF, Z_AXIS)
    p = np.array([1.0, 1.0, 0.0, 0.0])
    L = spread_line_through(cls, p)
    a, b = line_points(L)
    span = np.vstack([a.coords, b.coords])
    rej = p - span.T @ np.linalg.lstsq(span.T, p, rcond=None)[0]
    assert np.linalg.norm(rej) < 1e-8  # contains p
    assert abs(klein_form(L, Z_AXIS)) > 1e-3  # disjoint from Z


def test_spread_lines_contain_their_points():
    cls = parallel_class_of(PAR_BUILTIN, Z_AXIS)
    rng = np.random.default_rng(5)
    for _ in range(25):
        p = rng.normal(size=4)
        L = spread_line_through(cls, p)
        a, b = line_points(L)
        span = np.vstack([a.coords, b.coords])
        rej = p - span.T @ np.linalg.lstsq(span.T, p, rcond=None)[0]
        assert np.linalg.norm(rej) < 1e-8 * np.linalg.norm(p)


def test_spread_disjointness():
    cls = parallel_class_of(PAR_BUILTIN, Z_AXIS)
    rng = np.random.default_rng(6)
    for _ in range(50):
        p, q = rng.normal(size=(2, 4))
        L1 = spread_line_through(cls, p)
        L2 = spread_line_through(cls, q)
        if projective_distance(L1.p, L2.p) < 1e-9:
            continue
        g = abs(klein_form(L1, L2))
        assert g > 1e-8 * np.linalg.norm(L1.p) * np.linalg.norm(L2.p)


# --- parallel queries ----------------------------------------------------------------


def test_parallel_class_contains_query_line():
    for par, L in ((PAR_CLIFF, Z_AXIS), (PAR_CLIFF, X_AXIS),
                   (PAR_BUILTIN, Z_AXIS), (PAR_BUILTIN, X_AXIS)):
        cls = parallel_class_of(par, L)
        assert cls.contains_klein(L.p)


def test_parallel_through_point_on_line():
    out = parallel_through(PAR_BUILTIN, np.array([1.0, 0, 0, 0.5]), Z_AXIS)
    assert projective_distance(out.p, Z_AXIS.p) < 1e-12


def test_parallel_through_clifford():
    p = np.array([1.0, 1.0, 0.0, 0.0])
    out = parallel_through(PAR_CLIFF, p, Z_AXIS)
    a, b = line_points(out)
    span = np.vstack([a.coords, b.coords])
    rej = p - span.T @ np.linalg.lstsq(span.T, p, rcond=None)[0]
    assert np.linalg.norm(rej) < 1e-8
    cls = parallel_class_of(PAR_CLIFF, Z_AXIS)
    assert cls.contains_klein(out.p, tol=1e-7)


def test_parallel_partition_property():
    # lines in one class have identical parallels through a common point
    rng = np.random.default_rng(7)
    cls = parallel_class_of(PAR_BUILTIN, Z_AXIS)
    p = np.array([1.0, 0.4, -0.2, 0.9])
    M = spread_line_through(cls, rng.normal(size=4))
    left = parallel_through(PAR_BUILTIN, p, Z_AXIS)
    right = parallel_through(PAR_BUILTIN, p, M)
    assert projective_distance(left.p, right.p) < 1e-8


def test_parallel_continuity_probe():
    rng = np.random.default_rng(8)
    for _ in range(10):
        p = rng.normal(size=4)
        q1, q2 = rng.normal(size=(2, 4))
        L = join(q1, q2)
        base = parallel_through(PAR_BUILTIN, p, L)
        Lp = join(q1 + 1e-6 * rng.normal(size=4), q2 + 1e-6 * rng.normal(size=4))
        out = parallel_through(PAR_BUILTIN, p + 1e-6 * rng.normal(size=4), Lp)
        assert projective_distance(base.p, out.p) < 1e-4


# --- dimension ------------------------------------------------------------------------


def test_dim_clifford_two():
    assert dim_parallelism(PAR_CLIFF.hfd) == 2


def test_dim_builtin_three():
    assert dim_parallelism(PAR_BUILTIN.hfd) == 3


def test_dim_symmetric_three():
    par = make_parallelism(symmetric_star(moebius01()))
    assert dim_parallelism(par.hfd) == 3


def test_rank_gap():
    s = span_singular_values(PAR_BUILTIN.hfd, n=60)
    assert s[3] / max(s[4], 1e-300) > 1e6


# --- hfd property -----------------------------------------------------------------------


def test_check_hfd_passes():
    assert check_hfd(PAR_CLIFF, n=40).passed
    assert check_hfd(PAR_BUILTIN, n=40).passed


def exterior_center_star():
    c = np.array([1.5, 0.0, 0.0])

    def sig(q):
        q = np.atleast_2d(np.asarray(q, float))
        d = c[None, :] - q
        lam = 2.0 * (1.0 - q @ c) / np.sum(d * d, axis=1)
        out = q + lam[:, None] * d
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        return out if np.asarray(q).ndim > 1 else out[0]

    return GlStar("exterior-center", sig)


def test_hfd_violation_detected():
    # chords re-aimed at an exterior point: the tangent hyperplane of a line
    # whose U-projection is that point contains many polar images
    fake = make_parallelism(exterior_center_star())
    es = fake.es
    w = np.array([1.0, 1.5, 0.0, 0.0])
    val = float(w @ SPHERE.matrix @ w)  # = 1.25, exterior
    k = es.iso(w) + np.sqrt(val) * _D[:, 4]
    assert abs(klein_form(k, k)) < 1e-12
    L, _ = klein_lift(k)
    with pytest.raises(HfdViolation):
        parallel_class_of(fake, L)
    assert not check_hfd(fake, n=30).passed


# --- torus action -----------------------------------------------------------------------


def test_torus_fixes_classes():
    assert check_torus_fixes_classes(PAR_CLIFF.es, n=20).passed
    assert check_torus_fixes_classes(PAR_BUILTIN.es, n=20).passed


def test_torus_is_isometry():
    G = KLEIN.matrix
    for th in np.linspace(0, 2 * np.pi, 9):
        tau = torus_action(th)
        assert np.abs(tau.T @ G @ tau - G).max() < 1e-12


def test_mixing_rotation_moves_lines():
    # rotating in the (d4, d5) plane is also a g-isometry but does not fix
    # the H family linewise
    th = 0.7
    R = np.eye(6)
    c, s = np.cos(th), np.sin(th)
    R[3:5, 3:5] = [[c, -s], [s, c]]
    from glstar.parallelism import _D_INV
    tau = _D @ R @ _D_INV
    G = KLEIN.matrix
    assert np.abs(tau.T @ G @ tau - G).max() < 1e-12
    spans = PAR_BUILTIN.hfd.samples(10, seed=9)
    moved = 0.0
    for S in spans:
        Q = S / np.linalg.norm(S, axis=1, keepdims=True)
        mapped = Q @ tau.T
        rej = mapped - (mapped @ Q.T) @ Q
        moved = max(moved, float(np.linalg.norm(rej, axis=1).max()))
    assert moved > 1e-3
