from fractions import Fraction

import pytest

from toriclab.fans import fan_p1p1, fan_p2, fan_p3
from toriclab.geometry import difference_pieces
from toriclab.regions import (
    BlowupContext,
    RegionError,
    build_cech_system,
    hat_Zk,
    image_Uk,
    region_F,
    region_Z,
    region_Z_sigma,
    region_Zk,
    step_box_pieces,
    tilde_Uk,
    tilde_Zk,
    unit_box,
    verify_step_box_partition,
)

F = Fraction


def ctx_p2():
    return BlowupContext.make(fan_p2(), frozenset({0, 1}), "p2")


def ctx_p1p1():
    return BlowupContext.make(fan_p1p1(), frozenset({0, 1}), "p1p1")


def ctx_p3():
    return BlowupContext.make(fan_p3(), frozenset({0, 1, 2}), "p3")


def test_context_basics():
    ctx = ctx_p2()
    assert ctx.ray_e_e() == (1, 1)
    assert (1, 1) in ctx.fan_hat.rays
    with pytest.raises(RegionError):
        BlowupContext.make(fan_p2(), frozenset({0}), "bad")


def test_region_Z_membership():
    ctx = ctx_p2()
    z = region_Z(ctx)
    assert z.contains((F(-1, 2), F(-1, 2)))
    assert not z.contains((0, 0))
    assert not z.contains((-1, 0))
    assert z.contains((F(-1, 2), F(-1, 2)))
    # closed hypotenuse
    assert z.contains((F(-1, 2), F(-1, 2)))
    assert z.contains((F(-3, 4), F(-1, 4)))
    # vertex corners excluded
    for corner in [(0, 0), (-1, 0), (0, -1)]:
        assert not z.contains(corner)


def test_region_Z_one_closed_n_strict():
    ctx = ctx_p3()
    z = region_Z(ctx)
    closed = [c for c in z.constraints if not c.strict]
    strict = [c for c in z.constraints if c.strict]
    assert len(closed) == 1 and len(strict) == 3


def test_Zk_is_scale():
    ctx = ctx_p3()
    z = region_Z(ctx)
    z2 = region_Zk(ctx, 2)
    assert z2.same_set(z.scale(2))
    assert z2.contains((-1, F(-1, 2), F(-1, 2)))
    assert region_Zk(ctx, 1).same_set(z)


def test_Zk_no_lattice_points():
    # strict coordinates force integer points to have all coords <= -1,
    # contradicting sum >= -k for k <= n-1
    for ctx, ks in [(ctx_p2(), [1]), (ctx_p3(), [1, 2])]:
        n = ctx.dim
        for k in ks:
            zk = region_Zk(ctx, k)
            for pt in _lattice_box(n, -3, 1):
                assert not zk.contains(pt)


def _lattice_box(n, lo, hi):
    import itertools

    return itertools.product(range(lo, hi + 1), repeat=n)


def test_region_F():
    ctx = ctx_p2()
    f = region_F(ctx)
    assert f.contains((F(-1, 2), F(-1, 2)))
    assert f.contains((-1, F(-1, 2)))
    assert not f.contains((-1, -1))
    assert not f.contains((0, 0))


def test_hat_and_tilde_n2():
    ctx = ctx_p2()
    # hat_Z1 = Z1 since Z sits inside the half-open box
    hz = hat_Zk(ctx, 1)
    assert len(hz.pieces) == 1 and hz.pieces[0].same_set(region_Z(ctx))
    tz = tilde_Zk(ctx, 1)
    assert tz.same_set(hz)


def test_tilde_z2_n3():
    ctx = ctx_p3()
    tz = tilde_Zk(ctx, 2)
    # the slab between the two dilated faces, inside the box
    assert tz.contains((F(-1, 2), F(-1, 2), F(-1, 2)))  # sum -3/2 in [-2,-1)
    assert not tz.contains((F(-1, 4), F(-1, 4), F(-1, 4)))  # sum -3/4 > -1
    assert not tz.contains((F(-3, 4), F(-3, 4), F(-3, 4)))  # sum -9/4 < -2


def test_tilde_U1_is_F():
    ctx = ctx_p2()
    assert tilde_Uk(ctx, 1).same_set(region_F(ctx))


def test_U2_n2():
    ctx = ctx_p2()
    u2 = tilde_Uk(ctx, 2)
    assert u2.contains((F(-3, 4), F(-3, 4)))
    assert not u2.contains((F(-1, 4), F(-1, 4)))
    assert not u2.contains((-1, -1))
    region, injective = image_Uk(ctx, 2)
    assert injective
    assert region.same_set(u2)


def test_unit_box_widths():
    ctx = ctx_p3()
    box = region_F(ctx).bounding_box()
    assert box is not None
    assert all(hi - lo == 1 for lo, hi in box)


def test_z_sigma_slab():
    ctx = ctx_p2()
    # sigma = the exceptional ray alone: slab -1 <= sum < 0
    slab = region_Z_sigma(ctx, ())
    assert slab.contains((F(-1, 4), F(-1, 4)))
    assert slab.contains((5, F(-11, 2)))
    assert not slab.contains((0, 0))
    assert not slab.contains((-1, F(-1, 2)))


def test_z_sigma_choice_independence():
    ctx = ctx_p2()
    a = region_Z_sigma(ctx, (), 0)
    b = region_Z_sigma(ctx, (), 1)
    assert a.same_set(b)


def test_cech_system_p2():
    system = build_cech_system(ctx_p2())
    # cones containing the exceptional ray: the ray, and two 2-d cones
    assert [e.index_set for e in system.entries] == [(), (0,), (1,)]
    nerve = system.nerve()
    assert len(nerve) == 2
    assert all(sign == 1 for _, _, sign in nerve)


def test_cech_system_p3():
    system = build_cech_system(ctx_p3())
    sizes = sorted(len(e.index_set) for e in system.entries)
    assert sizes == [0, 1, 1, 1, 2, 2, 2]
    # signs alternate in the standard simplicial way
    signs = {(e1, e2): s for e1, e2, s in system.nerve()}
    assert signs[((0,), (0, 1))] == -1
    assert signs[((1,), (0, 1))] == 1


def test_step_box_partition_n2():
    ctx = ctx_p2()
    # Z_1 sits inside the box so the decomposition is empty
    assert step_box_pieces(ctx, 1) == []
    assert verify_step_box_partition(ctx, 1)


def test_step_box_partition_n3():
    ctx = ctx_p3()
    assert verify_step_box_partition(ctx, 1)
    pieces = step_box_pieces(ctx, 2)
    assert pieces, "Z_2 spills out of the unit box"
    assert verify_step_box_partition(ctx, 2)
    # each nonempty piece pushes exactly one coordinate into [-2, -1)
    for I, floors, _ in pieces:
        assert len(I) == 1 and floors[I[0]] == -2


def test_hat_tilde_partition():
    # the tilde pieces partition hat_Z_{n-1}
    ctx = ctx_p3()
    t1, t2 = tilde_Zk(ctx, 1), tilde_Zk(ctx, 2)
    h2 = hat_Zk(ctx, 2)
    union_pieces = list(t1.pieces) + list(t2.pieces)
    assert not difference_pieces(list(h2.pieces), union_pieces)
    assert not difference_pieces(union_pieces, list(h2.pieces))
    for a in t1.pieces:
        for b in t2.pieces:
            assert a.intersect(b).is_empty()
