"""Cross-checks between the constructible computations and the coherent
oracle: exceptionality, semi-orthogonality, unit orthogonality, the
covering quasi-isomorphism, restriction isomorphisms, and the surface
minimal-model bookkeeping.

Every check returns a VerificationReport carrying the computed and oracle
values and enough context to reproduce a failure.  All checks are
deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .cells import TorusCellComplex, arrangement_cells, midwall_families
from .coherent import ext_orlov, projective_space_twist_cohomology
from .fans import (
    Fan,
    blow_down,
    blow_down_candidates,
    classify_minimal,
    cyclic_ray_order,
    mmp_reduce,
    star_subdivide_at_max_cone,
    validate_fan,
)
from .geometry import NncPolyhedron
from .qlinalg import sparse_rank
from .regions import (
    BlowupContext,
    build_cech_system,
    hat_Zk,
    region_shell,
    region_Zk,
)
from .sheaves import (
    CellularSheaf,
    cohomology,
    compactly_supported_cohomology,
    constant_sheaf,
    ext_groups,
    pushforward_indicator,
    skyscraper_sheaf,
    ss_contained_in_skeleton,
    tensor,
)

F0 = Fraction(0)


@dataclass
class VerificationReport:
    check_id: str
    status: str  # "pass" | "fail" | "skip"
    computed: object = None
    oracle: object = None
    context: dict = field(default_factory=dict)
    reproducer: dict = field(default_factory=dict)
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "status": self.status,
            "computed": _jsonable(self.computed),
            "oracle": _jsonable(self.oracle),
            "context": _jsonable(self.context),
            "reproducer": _jsonable(self.reproducer),
            "detail": self.detail,
        }


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, frozenset):
        return sorted(x)
    return x


def region_hash(poly: NncPolyhedron) -> str:
    return hashlib.sha256(json.dumps(poly.to_json(), sort_keys=True).encode()).hexdigest()[:12]


def _ctx_context(ctx: BlowupContext, **extra) -> dict:
    out = {
        "fan": ctx.fan.to_json(),
        "sigma_c": sorted(ctx.sigma_c),
        "name": ctx.name,
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# shared complex / sheaf cache per blow-up dimension


_COMPLEX_CACHE: dict[int, TorusCellComplex] = {}
_SHEAF_CACHE: dict[tuple[int, int], dict] = {}


def verification_complex(n: int) -> TorusCellComplex:
    """The embedded torus complex refined by every region boundary needed
    at dimension n: coordinate walls, half-integer walls, and the
    exceptional-ray level sets."""
    if n not in _COMPLEX_CACHE:
        ones = tuple(1 for _ in range(n))
        hyper = [(ones, 0)] + midwall_families(n)
        _COMPLEX_CACHE[n] = TorusCellComplex(n, hyper)
    return _COMPLEX_CACHE[n]


def shell_sheaf(ctx: BlowupContext, k: int) -> CellularSheaf:
    """The pushforward indicator of the k-th shell in adapted coordinates;
    the constructible mate of the k-th exceptional twist."""
    key = (ctx.dim, k)
    if key not in _SHEAF_CACHE:
        cx = verification_complex(ctx.dim)
        _SHEAF_CACHE[key] = pushforward_indicator(cx, region_shell(ctx, k))
    return _SHEAF_CACHE[key]


# ---------------------------------------------------------------------------
# the checks


def check_exceptionality(ctx: BlowupContext, k: int) -> VerificationReport:
    """Self-Ext of the constructible mate equals the coherent self-Ext of
    the exceptional twist: one dimension in degree zero."""
    n = ctx.dim
    sheaf = shell_sheaf(ctx, k)
    computed = ext_groups(sheaf, sheaf)
    oracle = ext_orlov(n, k, k)
    expected = tuple(1 if i == 0 else 0 for i in range(n + 1))
    status = "pass" if computed == oracle == expected else "fail"
    return VerificationReport(
        check_id=f"exceptionality[{ctx.name},k={k}]",
        status=status,
        computed=computed,
        oracle=oracle,
        context=_ctx_context(ctx, k=k, region=region_hash(region_shell(ctx, k))),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c), "k": k},
    )


def check_semiorthogonality(ctx: BlowupContext, k: int, l: int) -> VerificationReport:
    """Homs between distinct components agree with the coherent oracle:
    zero in the semi-orthogonal direction (k < l), and the derived pattern
    in the other.  The duality reroute swaps the arguments on the
    constructible side."""
    if k == l:
        return check_exceptionality(ctx, k)
    n = ctx.dim
    fk = shell_sheaf(ctx, k)
    fl = shell_sheaf(ctx, l)
    computed = ext_groups(fl, fk)
    oracle = ext_orlov(n, k, l)
    status = "pass" if computed == oracle else "fail"
    chi_computed = sum((-1) ** i * v for i, v in enumerate(computed))
    chi_oracle = sum((-1) ** i * v for i, v in enumerate(oracle))
    if chi_computed != chi_oracle:
        status = "fail"
    return VerificationReport(
        check_id=f"semiorthogonality[{ctx.name},k={k},l={l}]",
        status=status,
        computed=computed,
        oracle=oracle,
        context=_ctx_context(ctx, k=k, l=l),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c), "k": k, "l": l},
    )


def check_unit_orthogonality(ctx: BlowupContext, k: int) -> VerificationReport:
    """The unit of the convolution product pairs to zero with every
    component: the skyscraper tensor has no cohomology, matching the
    vanishing cohomology of the negative twists on projective space."""
    n = ctx.dim
    cx = verification_complex(n)
    sheaf = shell_sheaf(ctx, k)
    sky = skyscraper_sheaf(cx, tuple(0 for _ in range(n)))
    computed = cohomology(tensor(sky, sheaf))
    coherent = projective_space_twist_cohomology(n - 1, -k) + (0,)
    plain = cohomology(sheaf)
    ok = not any(computed) and not any(coherent) and not any(plain)
    return VerificationReport(
        check_id=f"unit-orthogonality[{ctx.name},k={k}]",
        status="pass" if ok else "fail",
        computed={"skyscraper_tensor": computed, "plain_cohomology": plain},
        oracle={"projective_twist": coherent},
        context=_ctx_context(ctx, k=k),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c), "k": k},
    )


def check_cech_quasiiso(ctx: BlowupContext, window_pad: int = 0) -> VerificationReport:
    """Stalkwise exactness of the covering complex: over every cell of the
    boundary arrangement inside the window, the sign-indexed complex has a
    single dimension in degree zero exactly over the first dilated region
    and is exact elsewhere."""
    n = ctx.dim
    system = build_cech_system(ctx)
    z1 = region_Zk(ctx, 1)
    ones = tuple(1 for _ in range(n))
    hyper = [(ones, F0), (ones, Fraction(-1))]
    for i in range(n):
        e = [0] * n
        e[i] = 1
        hyper.append((tuple(e), F0))
    lo, hi = -n - 1 - window_pad, 1 + window_pad
    window_cons = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        window_cons.append((tuple(e), Fraction(lo), False))
        window_cons.append((tuple(-x for x in e), Fraction(-hi), False))
    window = NncPolyhedron.from_constraints(n, window_cons, prune=False)
    cells = arrangement_cells(hyper, window)
    failures = []
    for signs, witness, cdim in cells:
        members = [e for e in system.entries if e.region.contains(witness)]
        degrees = sorted(len(e.index_set) for e in members)
        expected_nonzero = z1.contains(witness)
        h = _subset_complex_cohomology(members, n)
        expected = tuple(1 if (d == 0 and expected_nonzero) else 0 for d in range(n))
        if h != expected:
            failures.append({"witness": [str(x) for x in witness], "h": h, "expected": expected})
    status = "pass" if not failures else "fail"
    return VerificationReport(
        check_id=f"cech-quasiiso[{ctx.name}]",
        status=status,
        computed={"cells": len(cells), "failures": failures[:5]},
        oracle="indicator of the first dilated region, stalkwise",
        context=_ctx_context(ctx, window=[lo, hi]),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c)},
    )


def _subset_complex_cohomology(members, n) -> tuple[int, ...]:
    """Cohomology of the sign-indexed covering complex on the given index
    sets, graded so the empty index set sits in degree zero."""
    by_degree: dict[int, list[tuple[int, ...]]] = {}
    for e in members:
        by_degree.setdefault(len(e.index_set), []).append(e.index_set)
    for d in by_degree:
        by_degree[d].sort()
    dims = {d: len(v) for d, v in by_degree.items()}
    diffs = {}
    for d in sorted(by_degree):
        if d + 1 not in by_degree:
            continue
        rows = []
        for big in by_degree[d + 1]:
            row = {}
            bigset = set(big)
            for j, small in enumerate(by_degree[d]):
                if set(small) <= bigset:
                    (extra,) = bigset - set(small)
                    pos = sorted(big).index(extra)
                    row[j] = Fraction((-1) ** pos)
            rows.append(row)
        diffs[d] = rows
    out = []
    for d in range(n):
        dim = dims.get(d, 0)
        rk = sparse_rank(diffs.get(d, [])) if diffs.get(d) else 0
        rk_prev = sparse_rank(diffs.get(d - 1, [])) if diffs.get(d - 1) else 0
        out.append(dim - rk - rk_prev)
    return tuple(out)


def open_Uk_cells(ctx: BlowupContext, k: int) -> list[int]:
    """The open restriction domain at level k: the torus minus the wall
    circles and the image of the closure of the clipped (k-1)-st dilation.

    The literal image of the fundamental box minus the lower dilations
    carries wall points at which the closed-support triangle fails (the
    shell image is not closed there), so the checks run on this open
    shrinking, where the restriction isomorphism is the precise content.
    """
    cx = verification_complex(ctx.dim)
    banned = set()
    for c in cx.cells:
        if any(w == Fraction(-1) for w in c.witness):
            banned.add(c.index)
    if k >= 2:
        closure_pieces = [p.closure() for p in hat_Zk(ctx, k - 1).pieces]
        for piece in closure_pieces:
            banned |= cx.image_cells(piece, check_adapted=False)
    cells = [c.index for c in cx.cells if c.index not in banned]
    if not cx.cell_union_is_open(cells):
        raise AssertionError("open restriction domain is not open")
    return cells


def default_step1_corpus(ctx: BlowupContext) -> list[tuple[str, CellularSheaf]]:
    cx = verification_complex(ctx.dim)
    return [
        ("constant", constant_sheaf(cx)),
        ("skyscraper[0]", skyscraper_sheaf(cx, tuple(0 for _ in range(ctx.dim)))),
    ]


def check_step1_restriction(ctx: BlowupContext, k: int, corpus=None) -> VerificationReport:
    """Compactly supported cohomology agrees across the open shrinking
    levels k and k+1 for every corpus sheaf passing the coarse-skeleton
    gate; gated-out members are skipped with notice."""
    cx = verification_complex(ctx.dim)
    corpus = corpus if corpus is not None else default_step1_corpus(ctx)
    uk = open_Uk_cells(ctx, k)
    uk1 = open_Uk_cells(ctx, k + 1)
    results = []
    failures = []
    skipped = []
    fan_adapted = ctx.fan_adapted()
    for name, sheaf in corpus:
        gate = ss_contained_in_skeleton(sheaf, fan_adapted, side="plus")
        if not gate["ok"]:
            skipped.append(name)
            continue
        a = compactly_supported_cohomology(sheaf, uk)
        b = compactly_supported_cohomology(sheaf, uk1)
        results.append({"sheaf": name, "H_c(U_k)": a, "H_c(U_k+1)": b})
        if a != b:
            failures.append(name)
    status = "pass" if not failures and results else "fail"
    return VerificationReport(
        check_id=f"step1-restriction[{ctx.name},k={k}]",
        status=status,
        computed=results,
        oracle="graded dimensions agree between consecutive levels",
        context=_ctx_context(ctx, k=k, skipped=skipped),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c), "k": k},
    )


def check_microsupport(ctx: BlowupContext) -> VerificationReport:
    """Microsupport soundness on the blow-up: the constant sheaf and the
    skyscraper land in the skeleton for the subdivided fan, and the shell
    pushforward lands in the antipodal skeleton."""
    cx = verification_complex(ctx.dim)
    fan_hat = ctx.fan_hat_adapted()
    const = constant_sheaf(cx)
    sky = skyscraper_sheaf(cx, tuple(0 for _ in range(ctx.dim)))
    shell = shell_sheaf(ctx, 1)
    r1 = ss_contained_in_skeleton(const, fan_hat, side="plus")
    r2 = ss_contained_in_skeleton(sky, fan_hat, side="plus")
    r3 = ss_contained_in_skeleton(shell, fan_hat, side="minus")
    ok = r1["ok"] and r2["ok"] and r3["ok"]
    return VerificationReport(
        check_id=f"microsupport[{ctx.name}]",
        status="pass" if ok else "fail",
        computed={
            "constant": {"ok": r1["ok"], "checked": r1["checked"]},
            "skyscraper": {"ok": r2["ok"], "checked": r2["checked"]},
            "shell(k=1,antipodal)": {"ok": r3["ok"], "checked": r3["checked"], "violations": r3["violations"][:3]},
        },
        oracle="containment in the (antipodally corrected) skeleton",
        context=_ctx_context(ctx),
        reproducer={"fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c)},
    )


def _fans_structurally_equal(f: Fan, g: Fan) -> bool:
    rays_f = {r for r in f.rays}
    rays_g = {r for r in g.rays}
    if rays_f != rays_g:
        return False
    cones_f = {frozenset(f.rays[i] for i in c) for c in f.max_cones}
    cones_g = {frozenset(g.rays[i] for i in c) for c in g.max_cones}
    return cones_f == cones_g


def check_blowup_bookkeeping(fan: Fan, name: str = "fan", deep: bool = True) -> VerificationReport:
    """Run the minimal model reduction and verify at every step: skeleton
    refinement, rank bookkeeping (one maximal cone fewer per step), the
    субdivision round-trip, and the per-step blow-up checks."""
    from .skeleton import skeleton_refines

    rep = validate_fan(fan)
    if not (rep["smooth"] and rep["complete"]):
        return VerificationReport(
            check_id=f"mmp-bookkeeping[{name}]",
            status="fail",
            computed=rep,
            oracle="smooth complete input",
            reproducer={"fan": fan.to_json()},
        )
    steps = []
    current = fan
    while True:
        cands = blow_down_candidates(current)
        if not cands:
            break
        ray = cands[0]
        down = blow_down(current, ray)
        # bookkeeping: one maximal cone fewer
        if len(down.max_cones) != len(current.max_cones) - 1:
            return _mmp_fail(name, fan, f"rank drop violated at ray {ray}")
        if len(down.rays) != len(current.rays) - 1:
            return _mmp_fail(name, fan, f"ray count drop violated at ray {ray}")
        # skeleton containment under refinement
        if not skeleton_refines(down, current):
            return _mmp_fail(name, fan, f"skeleton refinement fails at ray {ray}")
        # round trip
        merged = [down.rays.index(r) for r in _merged_pair(current, ray)]
        up = star_subdivide_at_max_cone(down, frozenset(merged))
        if not _fans_structurally_equal(up, current):
            return _mmp_fail(name, fan, f"round trip fails at ray {ray}")
        if deep:
            ctx = BlowupContext.make(down, frozenset(merged), name=f"{name}@{ray}")
            exc = check_exceptionality(ctx, 1)
            uni = check_unit_orthogonality(ctx, 1)
            if not (exc.passed and uni.passed):
                return _mmp_fail(name, fan, f"blow-up checks fail at ray {ray}")
        steps.append({"ray": ray})
        current = down
    cls = classify_minimal(current)
    return VerificationReport(
        check_id=f"mmp-bookkeeping[{name}]",
        status="pass",
        computed={"steps": steps, "minimal_class": str(cls)},
        oracle="P2 | P1xP1 | Hirzebruch(a)",
        context={"fan": fan.to_json()},
        reproducer={"fan": fan.to_json()},
    )


def _merged_pair(fan: Fan, ray) -> tuple[tuple[int, ...], tuple[int, ...]]:
    idx = fan.rays.index(tuple(ray))
    order = cyclic_ray_order(fan.rays)
    k = order.index(idx)
    return fan.rays[order[(k - 1) % len(order)]], fan.rays[order[(k + 1) % len(order)]]


def _mmp_fail(name, fan, detail) -> VerificationReport:
    return VerificationReport(
        check_id=f"mmp-bookkeeping[{name}]",
        status="fail",
        detail=detail,
        reproducer={"fan": fan.to_json()},
    )


# ---------------------------------------------------------------------------
# aggregation


def run_report(reports: list[VerificationReport]) -> dict:
    reports = sorted(reports, key=lambda r: r.check_id)
    return {
        "checks": [r.to_json() for r in reports],
        "passed": sum(1 for r in reports if r.status == "pass"),
        "failed": sum(1 for r in reports if r.status == "fail"),
        "skipped": sum(1 for r in reports if r.status == "skip"),
        "ok": all(r.status != "fail" for r in reports),
    }
