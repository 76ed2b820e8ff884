from fractions import Fraction

import pytest

from toriclab.fans import FanError, fan_p2, fan_p1p1, star_subdivide_at_max_cone
from toriclab.geometry import Cone
from toriclab.skeleton import (
    RTauStratum,
    r_tau_strata,
    skeleton_member,
    skeleton_refines,
)
from toriclab.theta import ThetaError, compose, hom_basis, identity_hom, theta_hom

F = Fraction


# ---------------------------------------------------------------------------
# skeleton membership


def test_zero_covector_always_member():
    f = fan_p2()
    for x in [(0, 0), (F(1, 3), F(2, 7))]:
        res = skeleton_member(f, x, (0, 0))
        assert res["member"] and res["witness"] == ()


def test_p2_lattice_point_full_cone():
    f = fan_p2()
    res = skeleton_member(f, (0, 0), (-1, -1))
    # -xi = (1,1) lies in cone(e1,e2); x = 0 is in M
    assert res["member"] and res["witness"] == (0, 1)


def test_p2_half_point_not_member():
    f = fan_p2()
    # exhaustive scan over all 7 cones happens inside skeleton_member
    res = skeleton_member(f, (F(1, 2), 0), (-1, -1))
    assert not res["member"]


def test_membership_invariant_under_lattice_translation():
    f = fan_p2()
    for x, xi in [((F(1, 2), 0), (0, -1)), ((F(1, 3), F(1, 3)), (-1, -1))]:
        a = skeleton_member(f, x, xi)
        b = skeleton_member(f, (x[0] + 5, x[1] - 3), xi)
        assert a["member"] == b["member"]


def test_wall_point_member_via_ray():
    f = fan_p2()
    # x on the coordinate circle, xi along -e2: sigma = ray(e2)
    res = skeleton_member(f, (F(1, 2), 0), (0, -1))
    assert res["member"] and res["witness"] == (1,)


def test_skeleton_refines_blowup():
    f = fan_p2()
    g = star_subdivide_at_max_cone(f, frozenset({0, 1}))
    assert skeleton_refines(f, g)
    assert skeleton_refines(f, f)
    with pytest.raises(FanError):
        skeleton_refines(g, f)


def test_refinement_implies_membership_monotone():
    f = fan_p2()
    g = star_subdivide_at_max_cone(f, frozenset({0, 1}))
    samples = [((0, 0), (-1, -1)), ((F(1, 2), F(1, 2)), (-1, -1)), ((0, 0), (2, 1))]
    for x, xi in samples:
        if skeleton_member(f, x, xi)["member"]:
            assert skeleton_member(g, x, xi)["member"]


# ---------------------------------------------------------------------------
# R_tau strata


def quadrant():
    return Cone.from_generators("M", 2, [(1, 0), (0, 1)])


def test_r_tau_count_equals_nonzero_faces():
    strata = r_tau_strata(quadrant())
    # faces of the quadrant: 0, two rays, itself -> three nonzero
    assert len(strata) == 3


def test_r_tau_of_full_cone_is_origin():
    strata = r_tau_strata(quadrant())
    full = [s for s in strata if s.tau.cone_dim() == 2][0]
    assert full.contains((0, 0))
    assert not full.contains((1, 0))


def test_r_tau_of_ray_brute_force_grid():
    # gamma-dual = first quadrant; tau = the x-axis ray. R_tau should be
    # tau-perp minus the perps of the strict cofaces, evaluated by brute
    # force on a sample grid.
    strata = r_tau_strata(quadrant())
    ray_strata = [s for s in strata if s.tau.cone_dim() == 1]
    assert len(ray_strata) == 2
    tau_x = [s for s in ray_strata if s.tau.generators == ((1, 0),)][0]
    grid = [(F(i, 2), F(j, 2)) for i in range(-4, 5) for j in range(-4, 5)]
    for p in grid:
        # tau-perp is the y-axis; exclusions: perp of quadrant = origin
        expected = (p[0] == 0) and not (p[0] == 0 and p[1] == 0)
        assert tau_x.contains(p) == expected


# ---------------------------------------------------------------------------
# theta category


def test_hom_basis_fifteen_points():
    f = fan_p2()
    # sigma = cone(e1,e2) contains tau = ray(e1); box [0,2] x [-2,2]
    pts = hom_basis(f, {0, 1}, {0}, ((0, 2), (-2, 2)))
    assert len(pts) == 15
    assert all(m[0] >= 0 for m in pts)


def test_hom_basis_incomparable_is_empty():
    f = fan_p2()
    assert hom_basis(f, {0}, {1}, ((-2, 2), (-2, 2))) == []


def test_hom_basis_zero_cone_gives_all_box_points():
    f = fan_p2()
    pts = hom_basis(f, frozenset(), frozenset(), ((-1, 1), (-1, 1)))
    assert len(pts) == 9


def test_identity_composition():
    f = fan_p2()
    ident = identity_hom(f, {0, 1})
    assert compose(ident, ident).coefficients() == {(0, 0): 1}


def test_compose_characters():
    f = fan_p2()
    # sigma = cone(e1,e2) >= tau = ray(e1) >= 0
    g = theta_hom(f, {0}, frozenset(), {(0, 1): 1})
    h = theta_hom(f, {0, 1}, {0}, {(1, -1): 1})
    comp = compose(g, h)
    assert comp.coefficients() == {(1, 0): 1}
    assert comp.source == frozenset({0, 1}) and comp.target == frozenset()


def test_compose_incomparable_raises():
    f = fan_p2()
    a = theta_hom(f, {0}, {0}, {(0, 0): 1})
    b = theta_hom(f, {1}, {1}, {(0, 0): 1})
    with pytest.raises(ThetaError):
        compose(b, a)


def test_support_membership_enforced():
    f = fan_p2()
    with pytest.raises(ThetaError):
        theta_hom(f, {0, 1}, {0}, {(-1, 0): 1})


def test_associativity_over_box():
    f = fan_p1p1()
    # chain cone(e1,e2) >= ray(e1) >= 0 with several characters
    a = theta_hom(f, {0, 1}, {0}, {(1, 0): 2, (0, 1): 1})
    b = theta_hom(f, {0}, frozenset(), {(0, -1): 1, (1, 1): 3})
    c = theta_hom(f, frozenset(), frozenset(), {(-1, 0): 1})
    left = compose(c, compose(b, a))
    right = compose(compose(c, b), a)
    assert left.coefficients() == right.coefficients()


def test_monoid_closure_in_box():
    f = fan_p2()
    box = ((0, 4), (-4, 4))
    pts = set(hom_basis(f, {0, 1}, {0}, box))
    for m1 in list(pts)[:10]:
        for m2 in list(pts)[:10]:
            s = (m1[0] + m2[0], m1[1] + m2[1])
            if all(box[i][0] <= s[i] <= box[i][1] for i in range(2)):
                assert s in pts
