import json
from fractions import Fraction

from toriclab.fans import fan_p1p1, fan_p2, fan_p3, star_subdivide_at_max_cone
from toriclab.regions import BlowupContext
from toriclab.sheaves import indicator_sheaf, ss_contained_in_skeleton
from toriclab.verify import (
    check_blowup_bookkeeping,
    check_cech_quasiiso,
    check_exceptionality,
    check_microsupport,
    check_semiorthogonality,
    check_step1_restriction,
    check_unit_orthogonality,
    default_step1_corpus,
    open_Uk_cells,
    run_report,
    verification_complex,
)


def ctx_p2():
    return BlowupContext.make(fan_p2(), frozenset({0, 1}), "p2")


def ctx_p1p1():
    return BlowupContext.make(fan_p1p1(), frozenset({0, 1}), "p1p1")


def test_exceptionality_p2():
    r = check_exceptionality(ctx_p2(), 1)
    assert r.passed
    assert r.computed == (1, 0, 0) and r.oracle == (1, 0, 0)


def test_exceptionality_p1p1():
    assert check_exceptionality(ctx_p1p1(), 1).passed


def test_unit_orthogonality_p2():
    r = check_unit_orthogonality(ctx_p2(), 1)
    assert r.passed
    assert not any(r.computed["skyscraper_tensor"])
    assert not any(r.computed["plain_cohomology"])


def test_cech_p2_cells():
    r = check_cech_quasiiso(ctx_p2())
    assert r.passed
    assert r.computed["cells"] > 10


def test_step1_p2():
    r = check_step1_restriction(ctx_p2(), 1)
    assert r.passed
    names = {row["sheaf"] for row in r.computed}
    assert names == {"constant", "skyscraper[0]"}
    # the skyscraper sits outside both open sets, so both sides vanish
    sky = [row for row in r.computed if row["sheaf"] == "skyscraper[0]"][0]
    assert not any(sky["H_c(U_k)"]) and not any(sky["H_c(U_k+1)"])
    const = [row for row in r.computed if row["sheaf"] == "constant"][0]
    assert const["H_c(U_k)"] == const["H_c(U_k+1)"] == (0, 0, 1)


def test_step1_gate_skips_bad_sheaf():
    ctx = ctx_p2()
    cx = verification_complex(2)
    # a closed band bounded by the half-integer wall: its conormal
    # directions are not skeleton directions for the coarse fan
    band = [
        c.index
        for c in cx.cells
        if c.witness[0] == Fraction(-1) or Fraction(-1, 2) <= c.witness[0] < 0
    ]
    bad = indicator_sheaf(cx, band)
    gate = ss_contained_in_skeleton(bad, ctx.fan_adapted(), side="plus")
    assert not gate["ok"]
    corpus = default_step1_corpus(ctx) + [("band", bad)]
    r = check_step1_restriction(ctx, 1, corpus)
    assert r.passed
    assert r.context["skipped"] == ["band"]


def test_open_uk_monotone():
    ctx = ctx_p2()
    u1 = set(open_Uk_cells(ctx, 1))
    u2 = set(open_Uk_cells(ctx, 2))
    assert u2 < u1


def test_microsupport_p2():
    assert check_microsupport(ctx_p2()).passed


def test_mmp_bookkeeping_pass_and_fail():
    bl = star_subdivide_at_max_cone(fan_p2(), frozenset({0, 1}))
    r = check_blowup_bookkeeping(bl, "blp2")
    assert r.passed
    assert r.computed["minimal_class"] in ("P2", "P1xP1", "Hirzebruch(1)")
    r0 = check_blowup_bookkeeping(fan_p2(), "p2")
    assert r0.passed and r0.computed["steps"] == []


def test_reports_deterministic_and_json():
    r1 = check_exceptionality(ctx_p2(), 1)
    r2 = check_exceptionality(ctx_p2(), 1)
    assert json.dumps(r1.to_json(), sort_keys=True) == json.dumps(r2.to_json(), sort_keys=True)
    agg = run_report([r1])
    assert agg["ok"] and agg["passed"] == 1
    json.dumps(agg)  # serializable


def test_semiorthogonality_delegates_on_equal_twists():
    r = check_semiorthogonality(BlowupContext.make(fan_p3(), frozenset({0, 1, 2}), "p3"), 1, 1)
    assert r.check_id.startswith("exceptionality")


def test_exceptionality_off_basis_cone():
    # blow up a cone whose rays are not the standard basis: the adapted
    # coordinate change is nontrivial and the checks must be unchanged
    from toriclab.fans import fan_hirzebruch

    ctx = BlowupContext.make(fan_p1p1(), frozenset({1, 2}), "p1p1-offbasis")
    assert check_exceptionality(ctx, 1).passed
    assert check_unit_orthogonality(ctx, 1).passed
    ctx2 = BlowupContext.make(fan_hirzebruch(2), frozenset({2, 3}), "f2-offbasis")
    assert check_exceptionality(ctx2, 1).passed
    assert check_cech_quasiiso(ctx2).passed


def test_bookkeeping_rejects_bad_input():
    from toriclab.fans import Fan

    incomplete = Fan.make(2, fan_p2().rays, list(fan_p2().max_cones)[:-1])
    r = check_blowup_bookkeeping(incomplete, "broken")
    assert r.status == "fail"
