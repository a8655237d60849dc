import numpy as np
import pytest

from glstar import errors
from glstar.projgeom import (
    HPoint,
    PLine,
    QuadricForm,
    Side,
    Subspace,
    join,
    join_batch,
    klein_form,
    klein_lift,
    line_points,
    line_sphere_intersect,
    lines_meet_point,
    meet,
    normalize,
    point_side,
    polar,
    projective_distance,
    second_intersection,
    signature_on,
    solve_quadratic,
)

SPHERE = QuadricForm.unit_sphere()
KLEIN = QuadricForm.klein()

X_AXIS = join((1, 0, 0, 0), (0, 1, 0, 0))
Z_AXIS = join((1, 0, 0, 0), (0, 0, 0, 1))


def rng():
    return np.random.default_rng(0)


# --- normalize -------------------------------------------------------------

def test_normalize_scaling():
    assert np.allclose(normalize((0, 0, 0, 2)).coords, [0, 0, 0, 1])


def test_normalize_sign_convention():
    assert np.allclose(normalize((-1, 0, 0, 0)).coords, [1, 0, 0, 0])


def test_normalize_leading_positive_kept():
    # dividing by the -1 entry flips signs; the leading-positive rule flips back
    assert np.allclose(normalize((0.5, -1, 0, 0)).coords, [0.5, -1, 0, 0])


def test_normalize_idempotent():
    r = rng()
    for _ in range(20):
        v = r.normal(size=4)
        once = normalize(v).coords
        assert np.allclose(normalize(once).coords, once)


def test_normalize_zero_rejected():
    with pytest.raises(errors.InvalidInput):
        normalize((0.0, 0.0, 0.0, 0.0))


# --- join ------------------------------------------------------------------

def test_join_coordinate_axes():
    assert np.allclose(X_AXIS.p, [1, 0, 0, 0, 0, 0])


def test_join_z_axis():
    assert np.allclose(Z_AXIS.p / np.max(np.abs(Z_AXIS.p)), [0, 0, 1, 0, 0, 0])


def test_join_projective_invariance():
    other = join((1, 0, 0, 0), (1, 1, 0, 0))
    assert projective_distance(other.p, X_AXIS.p) < 1e-12


def test_join_degenerate():
    with pytest.raises(errors.DegenerateJoin):
        join((1, 2, 3, 4), (2, 4, 6, 8))


def test_plucker_relation_random():
    r = rng()
    A = r.normal(size=(200, 4))
    B = r.normal(size=(200, 4))
    P = join_batch(A, B)
    res = P[:, 0] * P[:, 3] + P[:, 1] * P[:, 4] + P[:, 2] * P[:, 5]
    assert np.max(np.abs(res)) < 1e-12 * np.max(np.sum(P * P, axis=1))


def test_pline_rejects_invalid_plucker():
    with pytest.raises(errors.InvalidInput):
        PLine(np.array([1.0, 0, 0, 1.0, 0, 0]))  # p01*p23 != 0


# --- klein form ------------------------------------------------------------

def test_klein_self_pairing_zero():
    assert klein_form(X_AXIS, X_AXIS) == 0.0


def test_klein_meeting_lines():
    assert abs(klein_form(X_AXIS, Z_AXIS)) < 1e-15
    # vertical line x=1, y=0 meets the x-axis at (1,0,0)
    touching = join((1, 1, 0, 0), (1, 1, 0, 1))
    assert abs(klein_form(X_AXIS, touching)) < 1e-15


def test_klein_skew_lines_nonzero():
    # vertical line through (1,1,0): skew to the x-axis
    skew = join((1, 1, 1, 0), (1, 1, 1, 1))
    assert abs(klein_form(X_AXIS, skew)) > 0.1


def test_klein_orthogonality_matches_determinant():
    # two lines meet iff the 4x4 determinant of their spanning points vanishes
    r = rng()
    for _ in range(50):
        A, B, C, D = r.normal(size=(4, 4))
        k1 = join(A, B)
        k2 = join(C, D)
        det = np.linalg.det(np.vstack([A, B, C, D]))
        g = klein_form(k1, k2)
        assert np.isclose(2.0 * g, det, atol=1e-9 * max(1.0, abs(det)))


# --- klein lift ------------------------------------------------------------

def test_klein_lift_basis_bivector():
    line, (a, b) = klein_lift((1, 0, 0, 0, 0, 0))
    S = Subspace.span([a.coords, b.coords])
    assert S.contains([1, 0, 0, 0]) and S.contains([0, 1, 0, 0])
    assert projective_distance(line.p, X_AXIS.p) < 1e-12


def test_klein_lift_round_trip_z():
    line, (a, b) = klein_lift(Z_AXIS.p)
    assert projective_distance(join(a, b).p, Z_AXIS.p) < 1e-9


def test_klein_lift_round_trip_random():
    r = rng()
    for _ in range(30):
        q1 = r.normal(size=3)
        q1 /= np.linalg.norm(q1)
        q2 = r.normal(size=3)
        q2 /= np.linalg.norm(q2)
        L = join(np.r_[1.0, q1], np.r_[1.0, q2])
        lifted, _ = klein_lift(L.p)
        assert projective_distance(lifted.p, L.p) < 1e-9


def test_klein_lift_off_quadric():
    with pytest.raises(errors.NotOnQuadric):
        klein_lift((1, 0, 0, 1, 0, 0))


# --- polar / meet / signatures ----------------------------------------------

def test_polar_of_z_axis():
    Z = Subspace.span([[1, 0, 0, 0], [0, 0, 0, 1]])
    P = polar(Z, SPHERE)
    expected = Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0]])
    assert P.same_as(expected)


def test_polar_involution_random():
    r = rng()
    for _ in range(20):
        k = r.integers(1, 4)
        S = Subspace.span(r.normal(size=(k, 4)))
        assert polar(polar(S, SPHERE), SPHERE).same_as(S)
    for _ in range(10):
        k = r.integers(1, 6)
        S = Subspace.span(r.normal(size=(k, 6)))
        assert polar(polar(S, KLEIN), KLEIN).same_as(S)


def test_polar_tangent_hyperplane_contains_point():
    k = X_AXIS.p
    H = polar(Subspace.span([k]), KLEIN)
    assert H.rank == 5
    assert H.contains(k)


def test_polar_singular_form():
    bad = QuadricForm(np.diag([1.0, 1.0, 1.0, 0.0]))
    with pytest.raises(errors.SingularForm):
        polar(Subspace.span([[1, 0, 0, 0]]), bad)


def test_meet_planes_in_r4():
    S1 = Subspace.span(np.eye(4)[:3])          # span{e0,e1,e2}
    S2 = Subspace.span(np.eye(4)[[0, 1, 3]])   # span{e0,e1,e3}
    M = meet(S1, S2)
    assert M.rank == 2
    assert M.same_as(Subspace.span(np.eye(4)[:2]))


def test_meet_self():
    S = Subspace.span(rng().normal(size=(3, 6)))
    assert meet(S, S).same_as(S)


def test_meet_generic_dimension_r6():
    r = rng()
    S1 = Subspace.span(r.normal(size=(3, 6)))
    S2 = Subspace.span(r.normal(size=(4, 6)))
    assert meet(S1, S2).rank == 1


def test_signature_full_forms():
    assert SPHERE.signature == (3, 1, 0)
    assert KLEIN.signature == (3, 3, 0)
    assert signature_on(KLEIN) == (3, 3, 0)


def test_signature_rebase_invariance():
    r = rng()
    B = r.normal(size=(3, 6))
    S = Subspace.span(B)
    sig = signature_on(KLEIN, S)
    # random rebasing of the same subspace
    for _ in range(5):
        C = r.normal(size=(3, 3)) @ B
        assert signature_on(KLEIN, Subspace.span(C)) == sig


# --- point side ------------------------------------------------------------

def test_point_side_examples():
    assert point_side((1, 0, 0, 0), SPHERE) is Side.INTERIOR
    assert point_side((1, 1, 0, 0), SPHERE) is Side.ON
    assert point_side((0, 0, 0, 1), SPHERE) is Side.EXTERIOR


# --- line/sphere intersection ------------------------------------------------

def test_quadratic_stability():
    # x^2 - 2*1e8 x + 1 = 0: naive formula loses the small root
    roots = solve_quadratic(1.0, -1e8, 1.0)
    small = min(roots, key=abs)
    assert np.isclose(small, 5.0000000000000004e-9, rtol=1e-12)


def test_line_sphere_z_axis_poles():
    pts = line_sphere_intersect(Z_AXIS, SPHERE)
    got = sorted(np.round(p.coords / p.coords[0], 9).tolist() for p in pts)
    assert got == [[1, 0, 0, -1], [1, 0, 0, 1]]


def test_line_sphere_no_intersection():
    infinite = join((0, 1, 0, 0), (0, 0, 1, 0))
    assert line_sphere_intersect(infinite, SPHERE) == []


def test_line_sphere_tangent():
    tangent = join((1, 1, 0, 0), (0, 0, 1, 0))
    pts = line_sphere_intersect(tangent, SPHERE)
    assert len(pts) == 1
    assert projective_distance(pts[0].coords, [1, 1, 0, 0]) < 1e-9


def test_line_sphere_random_chords():
    r = rng()
    for _ in range(30):
        q1, q2 = r.normal(size=(2, 3))
        q1 /= np.linalg.norm(q1)
        q2 /= np.linalg.norm(q2)
        L = join(np.r_[1.0, q1], np.r_[1.0, q2])
        pts = line_sphere_intersect(L, SPHERE)
        assert len(pts) == 2
        for p in pts:
            assert abs(SPHERE.value(p.coords)) < 1e-9 * np.dot(p.coords, p.coords)


def test_second_intersection():
    north = HPoint((1, 0, 0, 1))
    south = second_intersection(Z_AXIS, north)
    assert projective_distance(south.coords, [1, 0, 0, -1]) < 1e-12
    other = second_intersection(X_AXIS, (1, 1, 0, 0))
    assert projective_distance(other.coords, [1, -1, 0, 0]) < 1e-12


def test_second_intersection_not_two_secant():
    tangent = join((1, 1, 0, 0), (0, 0, 1, 0))
    with pytest.raises(errors.NotTwoSecant):
        second_intersection(tangent, (1, 1, 0, 0))


def test_lines_meet_point():
    p = lines_meet_point(X_AXIS, Z_AXIS)
    assert p is not None
    assert projective_distance(p.coords, [1, 0, 0, 0]) < 1e-9
    skew = join((1, 1, 1, 0), (1, 1, 1, 1))
    assert lines_meet_point(X_AXIS, skew) is None


def test_line_points_span_line():
    a, b = line_points(Z_AXIS)
    assert projective_distance(join(a, b).p, Z_AXIS.p) < 1e-12


def test_subspace_reduction_idempotent():
    r = rng()
    for _ in range(10):
        S = Subspace.span(r.normal(size=(3, 6)))
        again = Subspace.span(S.basis)
        assert again.rank == S.rank
        assert np.allclose(again.basis, S.basis, atol=1e-14)
