"""Polyhedral regions attached to a toric point blow-up.

All regions are expressed in the coordinates adapted to the blown-up cone:
the cone's ray generators e_1..e_n form a lattice basis of N, the dual
basis spans M, and a point m has coordinates a_i = <m, e_i>.  The blow-up
ray is e_E = e_1 + ... + e_n, so <m, e_E> = sum a_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .fans import Fan, star_subdivide_at_max_cone
from .geometry import (
    Cone,
    NncPolyhedron,
    difference_pieces,
    frac_vec,
)
from .qlinalg import det

F0 = Fraction(0)


class RegionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# unions of polyhedra with removed points


@dataclass(frozen=True)
class RegionUnion:
    """A finite union of NncPolyhedra minus a finite point set."""

    dim: int
    pieces: tuple[NncPolyhedron, ...]
    holes: tuple[tuple[Fraction, ...], ...] = ()

    @staticmethod
    def of(piece: NncPolyhedron, holes=()) -> "RegionUnion":
        return RegionUnion(piece.dim, (piece,), tuple(frac_vec(h) for h in holes))

    def contains(self, point) -> bool:
        p = frac_vec(point)
        if p in self.holes:
            return False
        return any(piece.contains(p) for piece in self.pieces)

    def is_empty(self) -> bool:
        for piece in self.pieces:
            rest = piece
            # piece nonempty and not fully covered by holes (a polyhedron is
            # covered by finitely many points only if it is one of them)
            w = rest.witness()
            if w is None:
                continue
            if rest.affine_dim() > 0:
                return False
            if tuple(w) not in self.holes:
                return False
        return True

    def subtract_poly(self, other: NncPolyhedron) -> "RegionUnion":
        new_pieces = []
        for piece in self.pieces:
            new_pieces.extend(piece.subtract(other))
        holes = tuple(h for h in self.holes if any(p.contains(h) for p in new_pieces))
        return RegionUnion(self.dim, tuple(new_pieces), holes)

    def subtract(self, other: "RegionUnion") -> "RegionUnion":
        out = self
        for piece in other.pieces:
            out = out.subtract_poly(piece)
        # points removed from `other` but present here come back; they are
        # not representable as polyhedra, so adding them back is refused
        revived = [h for h in other.holes if out_contains_interiorwise(self, h) and not out.contains(h)]
        if revived:
            raise RegionError("set difference would revive removed points")
        return out

    def intersect_poly(self, other: NncPolyhedron) -> "RegionUnion":
        new_pieces = tuple(p.intersect(other) for p in self.pieces)
        new_pieces = tuple(p for p in new_pieces if not p.is_empty())
        holes = tuple(h for h in self.holes if any(p.contains(h) for p in new_pieces))
        return RegionUnion(self.dim, new_pieces, holes)

    def same_set(self, other: "RegionUnion") -> bool:
        return _union_difference_empty(self, other) and _union_difference_empty(other, self)

    def bounding_box(self) -> tuple[tuple[Fraction, Fraction], ...] | None:
        """Per-coordinate inclusive bounds, or None when unbounded."""
        if all(p.is_empty() for p in self.pieces):
            return tuple((F0, F0) for _ in range(self.dim))
        bounds = []
        for i in range(self.dim):
            lo_all, hi_all = None, None
            for p in self.pieces:
                if p.is_empty():
                    continue
                lo = _linear_bound(p, i, lower=True)
                hi = _linear_bound(p, i, lower=False)
                if lo is None or hi is None:
                    return None
                lo_all = lo if lo_all is None else min(lo_all, lo)
                hi_all = hi if hi_all is None else max(hi_all, hi)
            bounds.append((lo_all, hi_all))
        return tuple(bounds)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pieces": [p.to_json() for p in self.pieces],
            "removed_points": [[str(x) for x in h] for h in self.holes],
        }


def out_contains_interiorwise(region: RegionUnion, point) -> bool:
    p = frac_vec(point)
    return any(piece.contains(p) for piece in region.pieces)


def _linear_bound(p: NncPolyhedron, coord: int, lower: bool) -> Fraction | None:
    """Exact bound of x_coord over the polyhedron; None when unbounded."""
    from .geometry import project_interval

    interval = project_interval([c.as_tuple() for c in p.constraints], p.dim, coord)
    if interval is None:
        return None
    lo, _, hi, _ = interval
    return lo if lower else hi


def _union_difference_empty(a: RegionUnion, b: RegionUnion) -> bool:
    """Is (a minus b) empty, treating removed points exactly?"""
    pieces = list(a.pieces)
    for bp in b.pieces:
        nxt = []
        for piece in pieces:
            nxt.extend(piece.subtract(bp))
        pieces = nxt
    for piece in pieces:
        w = piece.witness()
        if w is None:
            continue
        if piece.affine_dim() > 0:
            return False
        if tuple(w) in a.holes:
            continue
        if tuple(w) not in b.holes:
            # a single leftover point; in `a`, so must be removed by b's holes
            return False
    # points b removed that a still contains
    for h in b.holes:
        if a.contains(h) and any(bp.contains(h) for bp in b.pieces):
            return False
    return True


# ---------------------------------------------------------------------------
# blow-up context


@dataclass(frozen=True)
class BlowupContext:
    """A smooth complete fan, a chosen maximal cone, and its blow-up.

    Carries the coordinate change into the basis given by the blown-up
    cone's rays; regions and cell complexes all live in those coordinates.
    """

    fan: Fan
    sigma_c: frozenset[int]
    fan_hat: Fan
    basis: tuple[tuple[int, ...], ...]  # rays of sigma_c in index order
    name: str = ""

    @staticmethod
    def make(fan: Fan, sigma_c, name: str = "") -> "BlowupContext":
        sc = frozenset(sigma_c)
        if sc not in fan.max_cones:
            raise RegionError("sigma_c is not a maximal cone")
        hat = star_subdivide_at_max_cone(fan, sc)
        basis = tuple(fan.rays[i] for i in sorted(sc))
        d = det([frac_vec(b) for b in basis])
        if abs(d) != 1:
            raise RegionError("sigma_c rays do not form a lattice basis")
        return BlowupContext(fan, sc, hat, basis, name or "ctx")

    @property
    def dim(self) -> int:
        return self.fan.dim

    def ray_e_e(self) -> tuple[int, ...]:
        return tuple(sum(b[i] for b in self.basis) for i in range(self.dim))

    # -- coordinate changes (N side): v = sum c_i e_i

    def n_to_adapted(self, v) -> tuple[int, ...]:
        from .qlinalg import solve_dense

        sol = solve_dense([[Fraction(self.basis[j][i]) for j in range(self.dim)] for i in range(self.dim)], list(v))
        assert sol is not None
        assert all(x.denominator == 1 for x in sol)
        return tuple(int(x) for x in sol)

    def fan_adapted(self) -> Fan:
        return Fan.make(self.dim, [self.n_to_adapted(r) for r in self.fan.rays], [sorted(c) for c in self.fan.max_cones])

    def fan_hat_adapted(self) -> Fan:
        return Fan.make(
            self.dim,
            [self.n_to_adapted(r) for r in self.fan_hat.rays],
            [sorted(c) for c in self.fan_hat.max_cones],
        )

    def hat_cones_containing_exceptional_ray(self) -> list[frozenset[int]]:
        e_index = len(self.fan.rays)
        return [c for c in self.fan_hat.all_cones() if e_index in c]


# ---------------------------------------------------------------------------
# the regions (in adapted coordinates)


def region_Z(ctx: BlowupContext) -> NncPolyhedron:
    """One closed face (sum of coordinates >= -1) and n strict faces."""
    n = ctx.dim
    cons = [(tuple(1 for _ in range(n)), Fraction(-1), False)]
    for i in range(n):
        e = [0] * n
        e[i] = -1
        cons.append((tuple(e), F0, True))
    return NncPolyhedron.from_constraints(n, cons, prune=False)


def region_Zk(ctx: BlowupContext, k: int) -> NncPolyhedron:
    if k < 1:
        raise RegionError("k must be >= 1")
    return region_Z(ctx).scale(k)


def region_shell(ctx: BlowupContext, k: int) -> NncPolyhedron:
    """The fresh shell of the k-th dilation: Z_k minus Z_{k-1}, a single
    polyhedron {a_i < 0, -k <= sum a_i < -(k-1)}.  For k = 1 this is the
    region Z itself.  The derived convolution of k copies of the k = 1
    object concentrates on this shell, which is what the coherent side's
    exceptional objects match; the full dilation picks up extra
    endomorphisms from lattice translations once k >= 2."""
    if k < 1:
        raise RegionError("k must be >= 1")
    n = ctx.dim
    zk = region_Zk(ctx, k)
    if k == 1:
        return zk
    ones = tuple(1 for _ in range(n))
    upper = NncPolyhedron.from_constraints(
        n, [(tuple(-x for x in ones), Fraction(k - 1), True)], prune=False
    )
    return zk.intersect(upper)


def unit_box(ctx: BlowupContext) -> NncPolyhedron:
    """The half-open fundamental box: -1 <= a_i < 0."""
    n = ctx.dim
    cons = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        cons.append((tuple(e), Fraction(-1), False))
        cons.append((tuple(-x for x in e), F0, True))
    return NncPolyhedron.from_constraints(n, cons, prune=False)


def region_F(ctx: BlowupContext) -> RegionUnion:
    """The half-open box minus its single lattice point (-1, ..., -1)."""
    n = ctx.dim
    corner = tuple(Fraction(-1) for _ in range(n))
    return RegionUnion.of(unit_box(ctx), holes=[corner])


def hat_Zk(ctx: BlowupContext, k: int) -> RegionUnion:
    _check_k(ctx, k)
    return region_F(ctx).intersect_poly(region_Zk(ctx, k))


def tilde_Zk(ctx: BlowupContext, k: int) -> RegionUnion:
    _check_k(ctx, k)
    if k == 1:
        return hat_Zk(ctx, 1)
    out = hat_Zk(ctx, k)
    for piece in hat_Zk(ctx, k - 1).pieces:
        out = out.subtract_poly(piece)
    return out


def tilde_Uk(ctx: BlowupContext, k: int) -> RegionUnion:
    _check_k(ctx, k, allow_n=True)
    out = region_F(ctx)
    if k >= 2:
        for piece in hat_Zk(ctx, k - 1).pieces:
            out = out.subtract_poly(piece)
    return out


def image_Uk(ctx: BlowupContext, k: int) -> tuple[RegionUnion, bool]:
    """The torus image of F minus hat_Z_{k-1} together with a certificate
    that the projection is injective on F (box widths at most one with at
    most one closed end per coordinate)."""
    region = tilde_Uk(ctx, k)
    box = region_F(ctx).bounding_box()
    injective = box is not None and all(hi - lo <= 1 for lo, hi in box)
    return region, injective


def _check_k(ctx, k, allow_n=False):
    hi = ctx.dim if allow_n else ctx.dim - 1
    if not (1 <= k <= hi):
        raise RegionError(f"k = {k} out of range 1..{hi}")


# ---------------------------------------------------------------------------
# the covering regions attached to cones containing the exceptional ray


@dataclass(frozen=True)
class CechEntry:
    cone_rays: tuple[int, ...]  # indices into fan_hat
    index_set: tuple[int, ...]  # which basis directions appear (I_sigma)
    e_choice: int  # chosen dual basis index j
    region: NncPolyhedron


@dataclass(frozen=True)
class CechSystem:
    ctx: BlowupContext
    entries: tuple[CechEntry, ...]

    def entry_by_index_set(self, index_set) -> CechEntry:
        key = tuple(sorted(index_set))
        for e in self.entries:
            if e.index_set == key:
                return e
        raise KeyError(key)

    def nerve(self) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
        """Covering differential data: (smaller index set, larger index set,
        sign) for each covering pair, with simplicial signs fixed by the
        basis ordering."""
        out = []
        for e1 in self.entries:
            for e2 in self.entries:
                if len(e2.index_set) == len(e1.index_set) + 1 and set(e1.index_set) <= set(e2.index_set):
                    (j,) = set(e2.index_set) - set(e1.index_set)
                    pos = sorted(e2.index_set).index(j)
                    out.append((e1.index_set, e2.index_set, (-1) ** pos))
        return out


def _valid_e_choices(ctx: BlowupContext, index_set) -> list[int]:
    """Dual basis indices j with the character relation trivializing the
    exceptional divisor on the chart: j must avoid the chart's own basis
    directions."""
    return [j for j in range(ctx.dim) if j not in index_set]


def dual_cone_polyhedron(ctx: BlowupContext, index_set) -> NncPolyhedron:
    """Dual of cone(e_E, e_i : i in index_set) in adapted coordinates."""
    n = ctx.dim
    cons = [(tuple(1 for _ in range(n)), F0, False)]
    for i in index_set:
        e = [0] * n
        e[i] = 1
        cons.append((tuple(e), F0, False))
    return NncPolyhedron.from_constraints(n, cons, prune=False)


def region_Z_sigma(ctx: BlowupContext, index_set, e_choice: int | None = None) -> NncPolyhedron:
    """(dual - e_choice) minus dual, computed literally as a set difference;
    it is a single polyhedron because only the exceptional-ray constraint
    shifts."""
    index_set = tuple(sorted(index_set))
    choices = _valid_e_choices(ctx, index_set)
    if not choices:
        raise RegionError("no valid dual basis choice for this cone")
    j = choices[0] if e_choice is None else e_choice
    if j not in choices:
        raise RegionError(f"invalid dual basis choice {j}")
    dual = dual_cone_polyhedron(ctx, index_set)
    shift = [0] * ctx.dim
    shift[j] = -1
    shifted = dual.translate(shift)
    pieces = shifted.subtract(dual)
    if len(pieces) != 1:
        raise RegionError("covering region is not a single polyhedron")
    return pieces[0]


def build_cech_system(ctx: BlowupContext) -> CechSystem:
    """Construct the covering regions for every blown-up-fan cone containing
    the exceptional ray, verify independence of the dual basis choice, and
    verify the covering property."""
    n = ctx.dim
    e_index = len(ctx.fan.rays)
    entries = []
    for cone in ctx.hat_cones_containing_exceptional_ray():
        others = sorted(cone - {e_index})
        # after star subdivision these are original sigma_c ray indices
        index_set = tuple(sorted(ctx.fan.rays.index(ctx.fan_hat.rays[i]) for i in others))
        # map to basis positions
        positions = tuple(sorted(sorted(ctx.sigma_c).index(i) for i in index_set))
        choices = _valid_e_choices(ctx, positions)
        region = region_Z_sigma(ctx, positions, choices[0])
        for other in choices[1:]:
            alt = region_Z_sigma(ctx, positions, other)
            if not region.same_set(alt):
                raise RegionError("covering region depends on the dual basis choice")
        entries.append(
            CechEntry(
                cone_rays=tuple(sorted(cone)),
                index_set=positions,
                e_choice=choices[0],
                region=region,
            )
        )
    entries.sort(key=lambda e: (len(e.index_set), e.index_set))
    system = CechSystem(ctx, tuple(entries))
    _verify_cover(ctx, system)
    return system


def _verify_cover(ctx: BlowupContext, system: CechSystem):
    """The proper covering regions cover exactly the exceptional slab minus
    the first dilated region; the codimension-one ones already suffice."""
    slab = system.entry_by_index_set(()).region
    z1 = region_Zk(ctx, 1)
    expected = difference_pieces([slab], [z1])
    for subset, label in [
        ([e.region for e in system.entries if len(e.index_set) == 1], "codimension-one"),
        ([e.region for e in system.entries if e.index_set], "all proper"),
    ]:
        if difference_pieces(expected, subset):
            raise RegionError(f"{label} covering regions fail to cover")
        extra = difference_pieces(subset, expected)
        if extra:
            raise RegionError(f"{label} covering regions spill outside the slab difference")


# ---------------------------------------------------------------------------
# the staircase decomposition used by the hom-vanishing induction


def step_box_pieces(ctx: BlowupContext, k: int) -> list[tuple[tuple[int, ...], dict, NncPolyhedron]]:
    """Z_k minus hat_Z_k decomposed into translated-box pieces indexed by
    the coordinates I pushed below -1 and their integer floors l_p <= -2.

    Returns nonempty (I, floors, piece) triples.  At surface and threefold
    scale the floors of each nonempty piece sum to -k, which is asserted.
    """
    _check_k(ctx, k)
    n = ctx.dim
    zk = region_Zk(ctx, k)
    out = []
    for r in range(1, n + 1):
        for I in itertools.combinations(range(n), r):
            floor_ranges = [range(-k, -1) for _ in I]
            for floors in itertools.product(*floor_ranges):
                cons = []
                for p, l in zip(I, floors):
                    e = [0] * n
                    e[p] = 1
                    cons.append((tuple(e), Fraction(l), False))
                    cons.append((tuple(-x for x in e), Fraction(-(l + 1)), True))
                for q in range(n):
                    if q in I:
                        continue
                    e = [0] * n
                    e[q] = 1
                    cons.append((tuple(e), Fraction(-1), False))
                    cons.append((tuple(-x for x in e), F0, True))
                piece = zk.intersect(NncPolyhedron.from_constraints(n, cons, prune=False))
                if not piece.is_empty():
                    out.append((I, dict(zip(I, floors)), piece))
    if n <= 3:
        for I, floors, _ in out:
            assert sum(floors.values()) == -k, "floor sum deviates at desk scale"
    return out


def verify_step_box_partition(ctx: BlowupContext, k: int) -> bool:
    """The pieces partition Z_k minus hat_Z_k: pairwise disjoint with the
    right union."""
    pieces = [p for _, _, p in step_box_pieces(ctx, k)]
    target = difference_pieces([region_Zk(ctx, k)], list(hat_Zk(ctx, k).pieces))
    if difference_pieces(target, pieces):
        return False
    if difference_pieces(pieces, target):
        return False
    for a, b in itertools.combinations(pieces, 2):
        if not a.intersect(b).is_empty():
            return False
    return True
