"""Polyhedral cell decompositions of the torus M_R/M.

The complex is built by slicing the closed fundamental cube [-1, 0]^n by a
finite set of affine hyperplane families lifted M-periodically; the cube
walls are always among the families.  Cells are relatively open convex
polyhedra, identified under lattice translation; each torus cell stores a
canonical lift with witness point inside the half-open cube [-1, 0)^n.

Within the cube every sign-vector class is convex, so cells correspond
exactly to feasible per-family level descriptors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .geometry import NncPolyhedron, fm_witness
from .qlinalg import det, dot, frac_vec, kernel_basis, primitive_int_vector, rank_dense, solve_dense

F0 = Fraction(0)
F1 = Fraction(1)


class CellError(ValueError):
    pass


@dataclass(frozen=True)
class Family:
    """An M-periodic hyperplane family <normal, x> = offset (mod 1), with a
    primitive integer normal and sign-canonical representation."""

    normal: tuple[int, ...]
    offset: Fraction  # in [0, 1)

    @staticmethod
    def make(normal, offset) -> "Family":
        if isinstance(offset, float) or any(isinstance(x, float) for x in normal):
            raise CellError("irrational or floating point input rejected; use exact rationals")
        n = primitive_int_vector(normal)
        if all(x == 0 for x in n):
            raise CellError("zero normal")
        off = Fraction(offset)
        # positive rescale factor applied to the offset
        for a, b in zip(frac_vec(normal), n):
            if b != 0:
                off = off * Fraction(b) / a
                break
        for x in n:
            if x != 0:
                if x < 0:
                    n = tuple(-y for y in n)
                    off = -off
                break
        return Family(n, off % 1)

    def levels_in_cube(self, dim: int) -> list[Fraction]:
        lo = sum(Fraction(min(-a, 0)) for a in self.normal)
        hi = sum(Fraction(max(-a, 0)) for a in self.normal)
        first = self.offset + Fraction(int(lo - self.offset) - 2)
        levels = []
        c = first
        while c <= hi:
            if c >= lo:
                levels.append(c)
            c += 1
        return levels


@dataclass(frozen=True)
class TorusCell:
    index: int
    key: tuple  # per-family descriptor ("at", i) or ("gap", i)
    dim: int
    witness: tuple[Fraction, ...]  # canonical lift, inside [-1, 0)^n
    lift: NncPolyhedron  # canonical lift as a relatively open polyhedron
    basis: tuple[tuple[Fraction, ...], ...]  # orientation basis of the span

    def __repr__(self):
        return f"TorusCell({self.index}, dim={self.dim})"


def _cube_constraints(dim: int) -> list[tuple]:
    cons = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        cons.append((tuple(e), Fraction(-1), False))
        cons.append((tuple(-x for x in e), F0, False))
    return cons


class TorusCellComplex:
    """Cells of the periodic arrangement, face relations with lift shifts,
    and signed incidence numbers."""

    def __init__(self, dim: int, hyperplanes=()):
        self.dim = dim
        fams = {}
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            f = Family.make(tuple(e), 0)
            fams[(f.normal, f.offset)] = f
        for h in hyperplanes:
            f = Family.make(h[0], h[1])
            fams[(f.normal, f.offset)] = f
        self.families: tuple[Family, ...] = tuple(sorted(fams.values(), key=lambda f: (f.normal, f.offset)))
        self._levels = [f.levels_in_cube(dim) for f in self.families]
        self.cells: list[TorusCell] = []
        self._by_key: dict[tuple, TorusCell] = {}
        self._build_cells()
        self._faces: dict[tuple[int, int], tuple[tuple[int, ...], ...]] = {}
        self._build_faces()
        self._incidence: dict[tuple[int, int], int] = {}
        self._build_incidence()

    # -- construction

    def _build_cells(self):
        dim = self.dim
        cube = _cube_constraints(dim)
        found: dict[tuple, dict] = {}

        def rec(fi, constraints, descriptor):
            if fi == len(self.families):
                w = fm_witness(constraints, dim)
                if w is None:
                    return
                canon = tuple(x - 1 if x == 0 else x for x in w)
                key = self._descriptor_of_point(canon)
                if key not in found:
                    found[key] = {"witness": canon}
                return
            fam = self.families[fi]
            levels = self._levels[fi]
            options = []
            for i, lv in enumerate(levels):
                options.append((("at", i), [ (fam.normal, lv, False), (tuple(-x for x in fam.normal), -lv, False) ]))
            for i in range(-1, len(levels)):
                cons = []
                if i >= 0:
                    cons.append((fam.normal, levels[i], True))
                if i + 1 < len(levels):
                    cons.append((tuple(-x for x in fam.normal), -levels[i + 1], True))
                options.append((("gap", i), cons))
            for desc, cons in options:
                newcons = constraints + cons
                if fm_witness(newcons, dim) is not None:
                    rec(fi + 1, newcons, descriptor + (desc,))

        rec(0, list(cube), ())
        # deterministic ordering: by (dim, key)
        entries = []
        for key, data in found.items():
            poly = self._polyhedron_for_key(key)
            eq_normals = [frac_vec(self.families[i].normal) for i, (tag, _) in enumerate(key) if tag == "at"]
            cdim = self.dim - (rank_dense(eq_normals, self.dim) if eq_normals else 0)
            basis = tuple(kernel_basis(eq_normals, self.dim)) if eq_normals else tuple(
                tuple(F1 if j == i else F0 for j in range(self.dim)) for i in range(self.dim)
            )
            entries.append((cdim, key, data["witness"], poly, basis))
        entries.sort(key=lambda e: (e[0], e[1]))
        for idx, (cdim, key, wit, poly, basis) in enumerate(entries):
            cell = TorusCell(idx, key, cdim, wit, poly, basis)
            self.cells.append(cell)
            self._by_key[key] = cell

    def _descriptor_of_point(self, point) -> tuple:
        desc = []
        for fam, levels in zip(self.families, self._levels):
            t = dot(fam.normal, point)
            tag = None
            for i, lv in enumerate(levels):
                if t == lv:
                    tag = ("at", i)
                    break
                if t < lv:
                    tag = ("gap", i - 1)
                    break
            if tag is None:
                tag = ("gap", len(levels) - 1)
            desc.append(tag)
        return tuple(desc)

    def _polyhedron_for_key(self, key) -> NncPolyhedron:
        cons = list(_cube_constraints(self.dim))
        for (tag, i), fam, levels in zip(key, self.families, self._levels):
            if tag == "at":
                cons.append((fam.normal, levels[i], False))
                cons.append((tuple(-x for x in fam.normal), -levels[i], False))
            else:
                if i >= 0:
                    cons.append((fam.normal, levels[i], True))
                if i + 1 < len(levels):
                    cons.append((tuple(-x for x in fam.normal), -levels[i + 1], True))
        return NncPolyhedron.from_constraints(self.dim, cons, prune=False)

    def cell_of_point(self, point) -> TorusCell:
        """The torus cell containing a point of M_R (reduced mod M)."""
        import math

        p = frac_vec(point)
        reduced = tuple(x - Fraction(math.floor(x)) - 1 for x in p)  # in [-1, 0)
        key = self._descriptor_of_point(reduced)
        return self._by_key[key]

    # -- face relations

    def _build_faces(self):
        shifts = list(itertools.product((-1, 0, 1), repeat=self.dim))
        by_dim: dict[int, list[TorusCell]] = {}
        for c in self.cells:
            by_dim.setdefault(c.dim, []).append(c)
        for c in self.cells:
            for d2 in range(c.dim, self.dim + 1):
                for cc in by_dim.get(d2, []):
                    if cc.dim == c.dim and cc.index != c.index:
                        continue
                    ws = []
                    for v in shifts:
                        moved = tuple(x - Fraction(vv) for x, vv in zip(c.witness, v))
                        if cc.lift.closure_contains(moved):
                            ws.append(v)
                    if ws:
                        self._faces[(c.index, cc.index)] = tuple(ws)

    def face_le(self, c: TorusCell, cc: TorusCell) -> bool:
        return (c.index, cc.index) in self._faces

    def lift_shifts(self, c: TorusCell, cc: TorusCell) -> tuple[tuple[int, ...], ...]:
        return self._faces.get((c.index, cc.index), ())

    def is_embedded(self) -> bool:
        """Every cell closure embeds in the torus: at most one lift contact
        per face pair."""
        return all(len(ws) <= 1 for ws in self._faces.values())

    # -- incidence numbers

    def _build_incidence(self):
        for (i, j), shifts in self._faces.items():
            c, cc = self.cells[i], self.cells[j]
            if cc.dim != c.dim + 1:
                continue
            total = 0
            for v in shifts:
                total += self._lift_sign(c, cc, v)
            self._incidence[(i, j)] = total

    def _lift_sign(self, c: TorusCell, cc: TorusCell, shift) -> int:
        target_witness = tuple(w + Fraction(s) for w, s in zip(cc.witness, shift))
        u = tuple(tw - w for tw, w in zip(target_witness, c.witness))
        cols = [u] + [list(b) for b in c.basis]
        mat = []
        for col in cols:
            coeffs = solve_dense([[cc.basis[j][i] for j in range(len(cc.basis))] for i in range(self.dim)], list(col))
            if coeffs is None:
                raise CellError("face direction outside the span of the coface")
            mat.append(coeffs)
        d = det([frac_vec(r) for r in zip(*mat)])
        if d == 0:
            raise CellError("degenerate orientation data")
        return 1 if d > 0 else -1

    def incidence(self, c: TorusCell, cc: TorusCell) -> int:
        return self._incidence.get((c.index, cc.index), 0)

    # -- convenience

    def cells_of_dim(self, d: int) -> list[TorusCell]:
        return [c for c in self.cells if c.dim == d]

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.cells_of_dim(d)) for d in range(self.dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def cell_union_is_open(self, indices) -> bool:
        s = set(indices)
        for i in s:
            for (a, b) in self._faces:
                if a == i and b not in s:
                    return False
        return True

    def region_cells(self, region, check_adapted=True) -> list[TorusCell]:
        """Cells whose canonical lift lies in the region (an NncPolyhedron
        or RegionUnion in the fundamental domain); verifies per-cell
        membership constancy when asked."""
        out = []
        pieces = _region_pieces(region)
        for c in self.cells:
            inside = region.contains(c.witness)
            if check_adapted:
                if inside and not _poly_cover_check(c.lift, pieces):
                    raise CellError("region is not adapted to the complex")
                if not inside and any(not p.intersect(c.lift).is_empty() for p in pieces):
                    raise CellError("region is not adapted to the complex")
            if inside:
                out.append(c)
        return out

    def image_cells(self, region, bound_pad: int = 1, check_adapted: bool = True) -> set[int]:
        """Cells of the torus image of a bounded region upstairs: any lift
        of the cell lies in the region.  Lifts must be wholly inside or
        wholly outside when adaptedness is checked."""
        from .regions import RegionUnion

        if isinstance(region, NncPolyhedron):
            region = RegionUnion.of(region)
        box = region.bounding_box()
        if box is None:
            raise CellError("image of an unbounded region")
        pieces = list(region.pieces)
        out = set()
        for c in self.cells:
            ranges = [range(int(lo) - bound_pad, int(hi) + bound_pad + 1) for lo, hi in box]
            for v in itertools.product(*ranges):
                moved = tuple(w + Fraction(x) for w, x in zip(c.witness, v))
                if not region.contains(moved):
                    continue
                if check_adapted:
                    shifted = c.lift.translate([Fraction(x) for x in v])
                    if not _poly_cover_check(shifted, pieces):
                        raise CellError("region is not adapted to the complex")
                    if c.dim > 0 and any(shifted.contains(h) for h in region.holes):
                        raise CellError("removed point interior to a cell lift")
                out.add(c.index)
                break
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "families": [
                {"normal": list(f.normal), "offset": str(f.offset)} for f in self.families
            ],
            "cells": [
                {
                    "id": c.index,
                    "dim": c.dim,
                    "witness": [str(x) for x in c.witness],
                }
                for c in self.cells
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "TorusCellComplex":
        fams = [(tuple(f["normal"]), Fraction(f["offset"])) for f in data["families"]]
        return TorusCellComplex(int(data["dim"]), fams)


def _region_pieces(region):
    if isinstance(region, NncPolyhedron):
        return [region]
    return list(region.pieces)


def _poly_cover_check(cell_poly: NncPolyhedron, pieces) -> bool:
    from .geometry import difference_pieces

    return not difference_pieces([cell_poly], pieces)


def build_complex(dim: int, hyperplanes=(), regions=()) -> TorusCellComplex:
    """The coarsest periodic complex slicing the cube by the given
    hyperplanes, with every given region's boundary included."""
    hs = list(hyperplanes)
    for region in regions:
        for piece in _region_pieces(region):
            for c in piece.constraints:
                hs.append((c.normal, c.offset))
    return TorusCellComplex(dim, hs)


def midwall_families(dim: int) -> list[tuple[tuple[int, ...], Fraction]]:
    fams = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        fams.append((tuple(e), Fraction(1, 2)))
    return fams


# ---------------------------------------------------------------------------
# plain (non-periodic) arrangement cells inside a window


def arrangement_cells(hyperplanes, window: NncPolyhedron):
    """Relatively open cells of the arrangement of affine hyperplanes
    (normal, offset) within a convex window.  Returns (signs, witness, dim)
    triples; signs in {-1, 0, 1} per hyperplane."""
    dim = window.dim
    base = [c.as_tuple() for c in window.constraints]
    out = []

    def rec(hi, constraints, signs):
        if hi == len(hyperplanes):
            w = fm_witness(constraints, dim)
            if w is None:
                return
            eqs = [frac_vec(hyperplanes[i][0]) for i, s in enumerate(signs) if s == 0]
            cdim = dim - (rank_dense(eqs, dim) if eqs else 0)
            out.append((tuple(signs), w, cdim))
            return
        normal, offset = hyperplanes[hi]
        offset = Fraction(offset)
        options = [
            (0, [(normal, offset, False), (tuple(-x for x in normal), -offset, False)]),
            (1, [(normal, offset, True)]),
            (-1, [(tuple(-x for x in normal), -offset, True)]),
        ]
        for s, cons in options:
            newcons = constraints + cons
            if fm_witness(newcons, dim) is not None:
                rec(hi + 1, newcons, signs + [s])

    rec(0, list(base), [])
    return out
