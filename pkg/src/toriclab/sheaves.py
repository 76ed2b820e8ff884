"""Cellular sheaves on a torus cell complex: constructors, cohomology,
tensor and shriek operations, Ext via projective resolutions with an
independent bar-complex oracle, half-space Morse groups, and the
microsupport containment test.

A cellular sheaf is a face-poset representation: a finite dimensional
rational stalk per cell and a generization matrix per face relation,
functorial along chains.  Ext and Morse computations require complexes
whose cell closures embed in the torus; the constructors enforce this
where the face-poset model would otherwise be ambiguous.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cells import TorusCell, TorusCellComplex
from .fans import Fan
from .geometry import NncPolyhedron, difference_pieces, fm_witness
from .qlinalg import (
    dot,
    frac_vec,
    kernel_basis,
    primitive_int_vector,
    rank_dense,
    rref,
    sparse_rank,
)
from .skeleton import skeleton_member

F0 = Fraction(0)
F1 = Fraction(1)

Matrix = tuple[tuple[Fraction, ...], ...]


class SheafError(ValueError):
    pass


def _zeros(rows: int, cols: int) -> Matrix:
    return tuple(tuple(F0 for _ in range(cols)) for _ in range(rows))


def _identity(n: int) -> Matrix:
    return tuple(tuple(F1 if i == j else F0 for j in range(n)) for i in range(n))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return _zeros(len(a), len(b[0]) if b else 0)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), F0) for j in range(len(b[0])))
        for i in range(len(a))
    )


def _kron(a: Matrix, b: Matrix) -> Matrix:
    ra, rb = len(a), len(b)
    ca = len(a[0]) if a else 0
    cb = len(b[0]) if b else 0
    return tuple(
        tuple(a[i // rb][j // cb] * b[i % rb][j % cb] for j in range(ca * cb))
        for i in range(ra * rb)
    )


# ---------------------------------------------------------------------------
# chain complexes over Q


@dataclass
class ChainComplexQ:
    """Bounded complex of finite dimensional rational spaces; differentials
    as sparse row dicts (row index in the target, column in the source)."""

    dims: dict[int, int]
    diffs: dict[int, list[dict[int, Fraction]]]  # degree k: C^k -> C^{k+1}

    def validate(self):
        for k, rows in self.diffs.items():
            assert len(rows) == self.dims.get(k + 1, 0), f"differential {k} shape"
            nxt = self.diffs.get(k + 1)
            if nxt is None:
                continue
            # d o d = 0
            for i, row in enumerate(nxt):
                acc: dict[int, Fraction] = {}
                for j, v in row.items():
                    for col, w in rows[j].items() if j < len(rows) else ():
                        acc[col] = acc.get(col, F0) + v * w
                assert all(x == 0 for x in acc.values()), "d^2 != 0"

    def cohomology_dims(self) -> dict[int, int]:
        degrees = sorted(set(self.dims) | {k + 1 for k in self.diffs})
        out = {}
        for k in degrees:
            dim = self.dims.get(k, 0)
            rk = sparse_rank(self.diffs.get(k, [])) if self.diffs.get(k) else 0
            rk_prev = sparse_rank(self.diffs.get(k - 1, [])) if self.diffs.get(k - 1) else 0
            out[k] = dim - rk - rk_prev
        return {k: v for k, v in out.items() if self.dims.get(k, 0) > 0 or v != 0}


def _graded_tuple(dims: dict[int, int], top: int) -> tuple[int, ...]:
    return tuple(dims.get(k, 0) for k in range(top + 1))


def mapping_fiber(full: ChainComplexQ, sub: ChainComplexQ, projection: dict[int, list[dict[int, Fraction]]]) -> ChainComplexQ:
    """The fiber of a degreewise-surjective chain map full -> sub:
    E^k = full^k (+) sub^{k-1}, d(a, b) = (d a, pi(a) - d b)."""
    dims = {}
    degrees = sorted(set(full.dims) | {k + 1 for k in sub.dims})
    for k in set(list(full.dims) + [d + 1 for d in sub.dims]):
        dims[k] = full.dims.get(k, 0) + sub.dims.get(k - 1, 0)
    diffs: dict[int, list[dict[int, Fraction]]] = {}
    for k in sorted(dims):
        rows: list[dict[int, Fraction]] = []
        fa, fb = full.dims.get(k, 0), sub.dims.get(k - 1, 0)
        ta, tb = full.dims.get(k + 1, 0), sub.dims.get(k, 0)
        if ta + tb == 0:
            continue
        dfull = full.diffs.get(k, [])
        proj = projection.get(k, [])
        dsub = sub.diffs.get(k - 1, [])
        for i in range(ta):
            row = dict(dfull[i]) if i < len(dfull) else {}
            rows.append(row)
        for i in range(tb):
            row: dict[int, Fraction] = {}
            if i < len(proj):
                for j, v in proj[i].items():
                    row[j] = row.get(j, F0) + v
            if i < len(dsub):
                for j, v in dsub[i].items():
                    row[fa + j] = row.get(fa + j, F0) - v
            rows.append(row)
        diffs[k] = rows
    return ChainComplexQ(dims, diffs)


# ---------------------------------------------------------------------------
# cellular sheaves


class CellularSheaf:
    """Stalk dimensions and generization matrices over the face poset."""

    def __init__(self, cx: TorusCellComplex, dims: dict[int, int], maps: dict[tuple[int, int], Matrix], lift_uniform: bool = False, labels: dict[int, tuple] | None = None):
        self.cx = cx
        self.dims = {i: int(d) for i, d in dims.items()}
        self.maps = maps
        self.lift_uniform = lift_uniform
        self.labels = labels or {}

    def dim_at(self, cell_index: int) -> int:
        return self.dims.get(cell_index, 0)

    def map(self, c: int, cc: int) -> Matrix:
        if c == cc:
            return _identity(self.dim_at(c))
        m = self.maps.get((c, cc))
        if m is None:
            return _zeros(self.dim_at(cc), self.dim_at(c))
        return m

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def validate(self):
        cx = self.cx
        for (a, b), m in self.maps.items():
            assert len(m) == self.dim_at(b) and (not m or len(m[0]) == self.dim_at(a))
        for a in cx.cells:
            if self.dim_at(a.index) == 0:
                continue
            for b in cx.cells:
                if not cx.face_le(a, b) or a.index == b.index:
                    continue
                for c in cx.cells:
                    if not cx.face_le(b, c) or b.index == c.index or c.index == a.index:
                        continue
                    if not cx.face_le(a, c) or self.dim_at(c.index) == 0:
                        continue
                    if self.dim_at(b.index) == 0:
                        lhs = _zeros(self.dim_at(c.index), self.dim_at(a.index))
                    else:
                        lhs = _matmul(self.map(b.index, c.index), self.map(a.index, b.index))
                    rhs = self.map(a.index, c.index)
                    assert lhs == rhs, f"functoriality fails along {a.index} <= {b.index} <= {c.index}"

    def to_json(self) -> dict:
        return {
            "cells": [{"id": i, "dim": d} for i, d in sorted(self.dims.items()) if d],
            "maps": [
                {"src": a, "dst": b, "matrix": [[str(x) for x in row] for row in m]}
                for (a, b), m in sorted(self.maps.items())
                if any(any(x != 0 for x in row) for row in m)
            ],
        }

    @staticmethod
    def from_json(cx: TorusCellComplex, data: dict) -> "CellularSheaf":
        dims = {int(c["id"]): int(c["dim"]) for c in data["cells"]}
        maps = {}
        for m in data["maps"]:
            mat = tuple(tuple(Fraction(x) for x in row) for row in m["matrix"])
            maps[(int(m["src"]), int(m["dst"]))] = mat
        sheaf = CellularSheaf(cx, dims, maps, lift_uniform=False)
        sheaf.validate()
        return sheaf


# -- constructors


def indicator_sheaf(cx: TorusCellComplex, region_or_cells, check_adapted=True) -> CellularSheaf:
    """Rank one on the cells of a locally closed cell-adapted region, with
    identity generization inside."""
    if isinstance(region_or_cells, (set, frozenset, list, tuple)):
        inside = {int(i) for i in region_or_cells}
    else:
        inside = {c.index for c in cx.region_cells(region_or_cells, check_adapted=check_adapted)}
    dims = {i: 1 for i in inside}
    maps = {}
    for (a, b) in cx._faces:
        if a in inside and b in inside and a != b:
            maps[(a, b)] = ((F1,),)
    sheaf = CellularSheaf(cx, dims, maps, lift_uniform=True)
    sheaf.validate()
    return sheaf


def constant_sheaf(cx: TorusCellComplex) -> CellularSheaf:
    return indicator_sheaf(cx, [c.index for c in cx.cells])


def skyscraper_sheaf(cx: TorusCellComplex, point) -> CellularSheaf:
    cell = cx.cell_of_point(point)
    if cell.dim != 0:
        raise SheafError("skyscraper point must be a vertex of the complex")
    return indicator_sheaf(cx, [cell.index])


def pushforward_indicator(cx: TorusCellComplex, region, bound_pad: int = 1) -> CellularSheaf:
    """Pushforward to the torus of the indicator sheaf of a bounded region
    upstairs: the stalk at a cell collects the lifts of the cell inside the
    region, and generization matches lifts through the unique contact
    shift."""
    if not cx.is_embedded():
        raise SheafError("pushforward sheaves need a complex with embedded cell closures")
    from .regions import RegionUnion

    if isinstance(region, NncPolyhedron):
        region = RegionUnion.of(region)
    box = region.bounding_box()
    if box is None:
        raise SheafError("pushforward requires a bounded region")
    pieces = list(region.pieces)
    # holes must sit at vertices of the complex, else the region is not
    # cell-adapted
    for h in region.holes:
        if cx.cell_of_point(h).dim != 0:
            raise SheafError("removed points must be vertices of the complex")
    labels: dict[int, tuple] = {}
    dims: dict[int, int] = {}
    for c in cx.cells:
        lifts = []
        ranges = [range(int(lo) - bound_pad, int(hi) + bound_pad + 1) for lo, hi in box]
        for v in itertools.product(*ranges):
            moved = tuple(w + Fraction(x) for w, x in zip(c.witness, v))
            if not region.contains(moved):
                continue
            shifted = c.lift.translate([Fraction(x) for x in v])
            if difference_pieces([shifted], pieces):
                raise SheafError("region is not adapted to the complex")
            if any(shifted.contains(h) for h in region.holes) and c.dim > 0:
                raise SheafError("removed point interior to a cell lift")
            lifts.append(v)
        if lifts:
            labels[c.index] = tuple(sorted(lifts))
            dims[c.index] = len(lifts)
    maps: dict[tuple[int, int], Matrix] = {}
    for (a, b), shifts in cx._faces.items():
        if a == b or a not in dims or b not in dims:
            continue
        (s,) = shifts
        la, lb = labels[a], labels[b]
        mat = tuple(
            tuple(F1 if tuple(x + y for x, y in zip(va, s)) == vb else F0 for va in la)
            for vb in lb
        )
        maps[(a, b)] = mat
    sheaf = CellularSheaf(cx, dims, maps, lift_uniform=False, labels=labels)
    sheaf.validate()
    return sheaf


def tensor(f: CellularSheaf, g: CellularSheaf) -> CellularSheaf:
    if f.cx is not g.cx:
        raise SheafError("tensor factors live on different complexes")
    dims = {}
    for i in f.dims:
        if g.dim_at(i):
            dims[i] = f.dim_at(i) * g.dim_at(i)
    maps = {}
    for (a, b) in f.cx._faces:
        if a != b and a in dims and b in dims:
            maps[(a, b)] = _kron(f.map(a, b), g.map(a, b))
    return CellularSheaf(f.cx, dims, maps, lift_uniform=f.lift_uniform and g.lift_uniform)


def direct_sum(f: CellularSheaf, g: CellularSheaf) -> CellularSheaf:
    if f.cx is not g.cx:
        raise SheafError("summands live on different complexes")
    dims = {}
    for i in set(f.dims) | set(g.dims):
        d = f.dim_at(i) + g.dim_at(i)
        if d:
            dims[i] = d
    maps = {}
    for (a, b) in f.cx._faces:
        if a == b or a not in dims or b not in dims:
            continue
        fa, ga = f.dim_at(a), g.dim_at(a)
        fb, gb = f.dim_at(b), g.dim_at(b)
        fm, gm = f.map(a, b), g.map(a, b)
        mat = []
        for i in range(fb):
            mat.append(tuple(fm[i]) + tuple(F0 for _ in range(ga)))
        for i in range(gb):
            mat.append(tuple(F0 for _ in range(fa)) + tuple(gm[i]))
        maps[(a, b)] = tuple(mat)
    return CellularSheaf(f.cx, dims, maps, lift_uniform=f.lift_uniform and g.lift_uniform)


def shriek_restrict(f: CellularSheaf, open_cells) -> CellularSheaf:
    """Extension by zero of the restriction to an open union of cells."""
    s = {int(getattr(c, "index", c)) for c in open_cells}
    if not f.cx.cell_union_is_open(s):
        raise SheafError("cell union is not open")
    dims = {i: d for i, d in f.dims.items() if i in s}
    maps = {(a, b): m for (a, b), m in f.maps.items() if a in s and b in s}
    return CellularSheaf(f.cx, dims, maps, lift_uniform=f.lift_uniform, labels={i: l for i, l in f.labels.items() if i in s})


# ---------------------------------------------------------------------------
# cohomology via the incidence cochain complex


def _cochain_complex(f: CellularSheaf) -> ChainComplexQ:
    cx = f.cx
    if not cx.is_embedded() and not f.lift_uniform:
        raise SheafError("cochain cohomology of a general sheaf needs embedded cell closures")
    offsets: dict[int, dict[int, int]] = {}
    dims: dict[int, int] = {}
    for d in range(cx.dim + 1):
        off = {}
        total = 0
        for c in cx.cells_of_dim(d):
            if f.dim_at(c.index):
                off[c.index] = total
                total += f.dim_at(c.index)
        offsets[d] = off
        dims[d] = total
    diffs: dict[int, list[dict[int, Fraction]]] = {}
    for d in range(cx.dim):
        rows: list[dict[int, Fraction]] = [dict() for _ in range(dims.get(d + 1, 0))]
        for cc in cx.cells_of_dim(d + 1):
            if cc.index not in offsets[d + 1]:
                continue
            for c in cx.cells_of_dim(d):
                if c.index not in offsets[d]:
                    continue
                coeff = cx.incidence(c, cc)
                if coeff == 0:
                    continue
                m = f.map(c.index, cc.index)
                ro, co = offsets[d + 1][cc.index], offsets[d][c.index]
                for i in range(len(m)):
                    for j in range(len(m[0])):
                        v = coeff * m[i][j]
                        if v != 0:
                            rows[ro + i][co + j] = rows[ro + i].get(co + j, F0) + v
        diffs[d] = rows
    return ChainComplexQ(dims, diffs)


def cohomology(f: CellularSheaf) -> tuple[int, ...]:
    """H^*(T, F) of a cellular sheaf on the compact torus, exact."""
    complex_ = _cochain_complex(f)
    return _graded_tuple(complex_.cohomology_dims(), f.cx.dim)


def compactly_supported_cohomology(f: CellularSheaf, open_cells) -> tuple[int, ...]:
    return cohomology(shriek_restrict(f, open_cells))


def euler_characteristic(f: CellularSheaf) -> int:
    h = cohomology(f)
    return sum((-1) ** i * v for i, v in enumerate(h))


# ---------------------------------------------------------------------------
# derived limits over cell subposets


def _rlim_complex(elements, le, dim_at, rho, max_len) -> tuple[ChainComplexQ, dict[int, list[tuple]]]:
    """The derived-limit cochain complex of a representation of a finite
    poset: C^k = product over strict chains c_0 < ... < c_k of the value at
    c_k.  Returns the complex and the chain bases per degree."""
    elems = list(elements)
    chains: dict[int, list[tuple]] = {0: [(e,) for e in elems]}
    k = 0
    while k + 1 < max_len:
        nxt = []
        for ch in chains.get(k, []):
            last = ch[-1]
            for e in elems:
                if e != last and le(last, e):
                    nxt.append(ch + (e,))
        if not nxt:
            break
        chains[k + 1] = nxt
        k += 1
    offsets: dict[int, dict[tuple, int]] = {}
    dims: dict[int, int] = {}
    for k, chs in chains.items():
        off = {}
        total = 0
        for ch in chs:
            off[ch] = total
            total += dim_at(ch[-1])
        offsets[k] = off
        dims[k] = total
    diffs: dict[int, list[dict[int, Fraction]]] = {}
    for k in chains:
        if k + 1 not in chains:
            continue
        rows: list[dict[int, Fraction]] = [dict() for _ in range(dims[k + 1])]
        for ch in chains[k + 1]:
            ro = offsets[k + 1][ch]
            # faces dropping an interior or initial element keep the value
            for i in range(len(ch) - 1):
                sub = ch[:i] + ch[i + 1 :]
                if sub not in offsets[k]:
                    continue
                co = offsets[k][sub]
                sign = Fraction((-1) ** i)
                for t in range(dim_at(ch[-1])):
                    rows[ro + t][co + t] = rows[ro + t].get(co + t, F0) + sign
            # dropping the last element composes with the generization
            sub = ch[:-1]
            if sub in offsets[k]:
                co = offsets[k][sub]
                sign = Fraction((-1) ** (len(ch) - 1))
                m = rho(ch[-2], ch[-1])
                for i in range(len(m)):
                    for j in range(len(m[0]) if m else 0):
                        v = sign * m[i][j]
                        if v != 0:
                            rows[ro + i][co + j] = rows[ro + i].get(co + j, F0) + v
        diffs[k] = rows
    return ChainComplexQ(dims, diffs), chains


def rlim_cohomology(f: CellularSheaf, cell_indices=None) -> dict[int, int]:
    """Sections-and-higher-limits of the sheaf over an open union of cells
    (the whole torus by default), for cross-checking the incidence cochain
    route on embedded complexes."""
    cx = f.cx
    idx = [c.index for c in cx.cells] if cell_indices is None else sorted(cell_indices)

    def le(a, b):
        return cx.face_le(cx.cells[a], cx.cells[b])

    comp, _ = _rlim_complex(idx, le, f.dim_at, lambda a, b: f.map(a, b), cx.dim + 1)
    return comp.cohomology_dims()


# ---------------------------------------------------------------------------
# Ext via projective resolutions over the face poset


class _PosetRep:
    """A plain representation of the cell poset: dims and maps, used for
    resolution kernels."""

    def __init__(self, cx, dims, maps):
        self.cx = cx
        self.dims = dims
        self.maps = maps

    def dim_at(self, i):
        return self.dims.get(i, 0)

    def map(self, a, b):
        if a == b:
            return _identity(self.dim_at(a))
        m = self.maps.get((a, b))
        if m is None:
            return _zeros(self.dim_at(b), self.dim_at(a))
        return m


@dataclass
class _ResolutionLevel:
    # generators: list of (cell index, vectors in the previous object's
    # stalk at that cell); the projective cover is the direct sum of the
    # representables at those cells
    gens: list[tuple[int, tuple]]  # (cell, tuple of coordinate vectors)

    def cells(self):
        return [c for c, _ in self.gens]


def _p_space_index(cx, gens, x) -> list[tuple[int, int]]:
    """Flat basis of P(gens)(x): pairs (generator position, copy index)."""
    out = []
    for gpos, (c, vecs) in enumerate(gens):
        if cx.face_le(cx.cells[c], cx.cells[x]):
            for t in range(len(vecs)):
                out.append((gpos, t))
    return out


def _greedy_cover(cx, rep) -> list[tuple[int, tuple]]:
    """Choose generators cell by cell, lowest dimension first, adding unit
    vectors that extend the image of what is already covered."""
    gens: list[tuple[int, tuple]] = []
    order = sorted(rep.dims, key=lambda i: (cx.cells[i].dim, i))
    for x in order:
        dx = rep.dim_at(x)
        if dx == 0:
            continue
        img_rows = []
        for (c, vecs) in gens:
            if cx.face_le(cx.cells[c], cx.cells[x]):
                m = rep.map(c, x)
                for v in vecs:
                    img_rows.append(tuple(sum((m[i][j] * v[j] for j in range(len(v))), F0) for i in range(dx)))
        base_rank = rank_dense([frac_vec(r) for r in img_rows], dx) if img_rows else 0
        new_vecs = []
        cur = list(img_rows)
        rank = base_rank
        for i in range(dx):
            e = tuple(F1 if j == i else F0 for j in range(dx))
            r2 = rank_dense([frac_vec(r) for r in cur + [e]], dx)
            if r2 > rank:
                cur.append(e)
                rank = r2
                new_vecs.append(e)
        if new_vecs:
            gens.append((x, tuple(new_vecs)))
    return gens


def _cover_kernel(cx, gens, rep) -> _PosetRep:
    """Kernel of the evaluation P(gens) -> rep as a poset representation;
    stalk bases are stored in P(gens)(x) flat coordinates."""
    dims: dict[int, int] = {}
    bases: dict[int, list[tuple]] = {}
    index_cache: dict[int, list[tuple[int, int]]] = {}
    for x in [c.index for c in cx.cells]:
        basis_idx = _p_space_index(cx, gens, x)
        index_cache[x] = basis_idx
        if not basis_idx:
            continue
        dx = rep.dim_at(x)
        rows = []
        for i in range(dx):
            row = []
            for (gpos, t) in basis_idx:
                c, vecs = gens[gpos]
                m = rep.map(c, x)
                v = vecs[t]
                row.append(sum((m[i][j] * v[j] for j in range(len(v))), F0))
            rows.append(tuple(row))
        if dx == 0:
            kb = [tuple(F1 if j == i else F0 for j in range(len(basis_idx))) for i in range(len(basis_idx))]
        else:
            kb = kernel_basis(rows, len(basis_idx))
        if kb:
            dims[x] = len(kb)
            bases[x] = [tuple(v) for v in kb]
    maps: dict[tuple[int, int], Matrix] = {}
    for (a, b) in cx._faces:
        if a == b or a not in dims or b not in dims:
            continue
        ia, ib = index_cache[a], index_cache[b]
        pos_b = {key: p for p, key in enumerate(ib)}
        # inclusion P(a) -> P(b) in flat coordinates
        cols = []
        for v in bases[a]:
            w = [F0] * len(ib)
            for p, key in enumerate(ia):
                if v[p] != 0:
                    w[pos_b[key]] += v[p]
            cols.append(tuple(w))
        # express each included vector in the kernel basis at b
        bmat = [[bases[b][j][i] for j in range(len(bases[b]))] for i in range(len(ib))]
        from .qlinalg import solve_dense

        mat_cols = []
        for w in cols:
            sol = solve_dense(bmat, list(w))
            if sol is None:
                raise SheafError("kernel is not closed under generization")
            mat_cols.append(sol)
        maps[(a, b)] = tuple(tuple(mat_cols[j][i] for j in range(len(mat_cols))) for i in range(len(bases[b])))
    return _PosetRep(cx, dims, maps), bases, index_cache


def _resolution(f: CellularSheaf, max_levels=None):
    """Projective resolution data: a list of levels, each with generators
    and, from level one on, differential coordinates in the previous
    projective's flat basis."""
    cx = f.cx
    if max_levels is None:
        max_levels = cx.dim + 2
    levels = []
    rep = _PosetRep(cx, dict(f.dims), dict(f.maps))
    current = rep
    diff_vectors = None  # for level i >= 1: gens' vectors in P^{i-1} coords
    for level in range(max_levels + 1):
        gens = _greedy_cover(cx, current)
        if not gens:
            if current.dims:
                raise SheafError("cover failed to terminate")
            break
        if level == 0:
            levels.append({"gens": gens, "diff": None})
        else:
            # current's stalk bases live in P^{level-1} coordinates
            diff = []
            for (c, vecs) in gens:
                expanded = []
                for v in vecs:
                    w = [F0] * len(prev_index[c])
                    for p in range(len(v)):
                        basis_vec = prev_bases[c][p]
                        for q in range(len(w)):
                            w[q] += v[p] * basis_vec[q]
                    expanded.append(tuple(w))
                diff.append((c, tuple(expanded)))
            levels.append({"gens": gens, "diff": diff})
        kernel, bases, index_cache = _cover_kernel(cx, gens, current)
        prev_bases = bases
        prev_index = {x: _p_space_index(cx, gens, x) for x in [c.index for c in cx.cells]}
        if not kernel.dims:
            break
        current = kernel
    else:
        raise SheafError("resolution exceeded the poset chain bound")
    return levels


def ext_groups(f: CellularSheaf, g: CellularSheaf) -> tuple[int, ...]:
    """Ext^*(F, G) through a projective resolution of F by representable
    cell sheaves; exact."""
    cx = f.cx
    if cx is not g.cx:
        raise SheafError("Ext arguments live on different complexes")
    if not cx.is_embedded():
        raise SheafError("Ext needs a complex with embedded cell closures")
    levels = _resolution(f)
    # Hom(P^i, G) has a block G(c)^{copies} per generator (c, vecs)
    hom_dims: dict[int, int] = {}
    hom_offsets: list[list[int]] = []
    for i, lv in enumerate(levels):
        offs = []
        total = 0
        for (c, vecs) in lv["gens"]:
            offs.append(total)
            total += len(vecs) * g.dim_at(c)
        hom_offsets.append(offs)
        hom_dims[i] = total
    diffs: dict[int, list[dict[int, Fraction]]] = {}
    for i in range(1, len(levels)):
        rows: list[dict[int, Fraction]] = [dict() for _ in range(hom_dims[i])]
        prev = levels[i - 1]["gens"]
        prev_flat: dict[int, list[tuple[int, int]]] = {}
        for gpos, (cprime, vecs) in enumerate(levels[i]["diff"]):
            # each copy t of the generator at cprime contributes a row block
            for t, w in enumerate(vecs):
                flat = _p_space_index(cx, prev, cprime)
                ro = hom_offsets[i][gpos] + t * g.dim_at(cprime)
                for p, (qpos, s) in enumerate(flat):
                    if w[p] == 0:
                        continue
                    c_prev = prev[qpos][0]
                    rg = g.map(c_prev, cprime)  # G(c_prev) -> G(cprime)
                    co = hom_offsets[i - 1][qpos] + s * g.dim_at(c_prev)
                    for r in range(g.dim_at(cprime)):
                        for cidx in range(g.dim_at(c_prev)):
                            v = w[p] * rg[r][cidx]
                            if v != 0:
                                rows[ro + r][co + cidx] = rows[ro + r].get(co + cidx, F0) + v
        diffs[i - 1] = rows
    comp = ChainComplexQ(hom_dims, diffs)
    return _graded_tuple(comp.cohomology_dims(), cx.dim)


def bar_ext_groups(f: CellularSheaf, g: CellularSheaf) -> tuple[int, ...]:
    """Independent oracle: the normalized chain-indexed double complex
    computing Ext in the representation category, built from strict chains
    in the face poset with no resolution machinery."""
    cx = f.cx
    if cx is not g.cx:
        raise SheafError("Ext arguments live on different complexes")
    idx = [c.index for c in cx.cells]

    def le(a, b):
        return a != b and cx.face_le(cx.cells[a], cx.cells[b])

    chains: dict[int, list[tuple]] = {0: [(e,) for e in idx]}
    k = 0
    while k + 1 <= cx.dim + 1:
        nxt = []
        for ch in chains[k]:
            for e in idx:
                if le(ch[-1], e):
                    nxt.append(ch + (e,))
        if not nxt:
            break
        chains[k + 1] = nxt
        k += 1
    offsets: dict[int, dict[tuple, int]] = {}
    dims: dict[int, int] = {}
    for k, chs in chains.items():
        off = {}
        total = 0
        for ch in chs:
            off[ch] = total
            total += f.dim_at(ch[0]) * g.dim_at(ch[-1])
        offsets[k] = off
        dims[k] = total

    def block(ch):
        return f.dim_at(ch[0]), g.dim_at(ch[-1])

    diffs: dict[int, list[dict[int, Fraction]]] = {}
    for k in chains:
        if k + 1 not in chains:
            continue
        rows: list[dict[int, Fraction]] = [dict() for _ in range(dims[k + 1])]
        for ch in chains[k + 1]:
            df, dg = block(ch)
            if df * dg == 0:
                continue
            ro = offsets[k + 1][ch]

            def add_term(sub, sign, left=None, right=None):
                # phi' = left o phi o right with scalar sign
                if sub not in offsets[k]:
                    return
                sf, sg = block(sub)
                if sf * sg == 0:
                    return
                co = offsets[k][sub]
                # entry (a, b) of phi maps F(sub0) basis b to G(sub-last) a
                for a in range(sf):
                    for b in range(sg):
                        src_col = co + a * sg + b
                        # compose: rows index target phi' entries
                        lm = left if left is not None else _identity(dg)
                        rm = right if right is not None else _identity(df)
                        # phi'(i, j) = sum lm[jg][b'] phi[a', b'] rm[a'][i]
                        for i in range(df):
                            if rm[a][i] == 0:
                                continue
                            for jg in range(dg):
                                v = Fraction(sign) * lm[jg][b] * rm[a][i]
                                if v != 0:
                                    r = ro + i * dg + jg
                                    rows[r][src_col] = rows[r].get(src_col, F0) + v

            # term 1: compose with G along the last arrow
            sub = ch[:-1]
            if sub in offsets[k]:
                add_term(sub, 1, left=g.map(ch[-2], ch[-1]), right=None)
            # middle deletions
            for t in range(1, len(ch) - 1):
                sub = ch[:t] + ch[t + 1 :]
                add_term(sub, (-1) ** (len(ch) - 1 - t), left=None, right=None)
            # term last: precompose with F along the first arrow
            sub = ch[1:]
            if sub in offsets[k]:
                add_term(sub, (-1) ** (len(ch) - 1), left=None, right=f.map(ch[0], ch[1]))
        diffs[k] = rows
    comp = ChainComplexQ(dims, diffs)
    return _graded_tuple(comp.cohomology_dims(), cx.dim)


# ---------------------------------------------------------------------------
# Morse groups and microsupport


def _local_cells(cx: TorusCellComplex, cell: TorusCell, xi):
    """Sign cells of the active hyperplane arrangement at the cell witness,
    refined by the covector wall, each tagged with its torus cell."""
    x0 = cell.witness
    normals = []
    gaps = []  # per family: distance to the nearest inactive level
    for fam in cx.families:
        t = dot(fam.normal, x0)
        frac = (t - fam.offset) % 1
        if frac == 0:
            normals.append(fam.normal)
            gaps.append((fam.normal, Fraction(1)))
        else:
            gaps.append((fam.normal, min(frac, 1 - frac)))
    xiv = primitive_int_vector(xi)
    xi_parallel = any(
        xiv == n or xiv == tuple(-x for x in n) for n in normals
    )
    arrangement = list(normals)
    if not xi_parallel and not all(x == 0 for x in xiv):
        arrangement.append(xiv)
    dim = cx.dim
    cells = []

    def rec(i, cons, signs):
        if i == len(arrangement):
            w = fm_witness(cons, dim)
            if w is None:
                return
            cells.append((tuple(signs), w))
            return
        a = arrangement[i]
        for s, cc in [
            (0, [(a, F0, False), (tuple(-x for x in a), F0, False)]),
            (1, [(a, F0, True)]),
            (-1, [(tuple(-x for x in a), F0, True)]),
        ]:
            nc = cons + cc
            if fm_witness(nc, dim) is not None:
                rec(i + 1, nc, signs + [s])

    rec(0, [], [])
    out = []
    for signs, w in cells:
        if all(x == 0 for x in w):
            torus_cell = cell.index
        else:
            scale_bound = None
            for a, gap in gaps:
                s = dot(a, w)
                if s != 0:
                    cand = gap / (2 * abs(s))
                    scale_bound = cand if scale_bound is None else min(scale_bound, cand)
            delta = scale_bound if scale_bound is not None else Fraction(1, 4)
            p = tuple(x + delta * y for x, y in zip(x0, w))
            torus_cell = cx.cell_of_point(p).index
        xi_sign = dot(xiv, w)
        xi_sign = (xi_sign > 0) - (xi_sign < 0)
        out.append({"signs": signs, "witness": w, "torus_cell": torus_cell, "xi_sign": xi_sign})
    return out


def _local_le(a, b) -> bool:
    return all(sa == 0 or sa == sb for sa, sb in zip(a["signs"], b["signs"]))


def morse_group(f: CellularSheaf, cell: TorusCell, xi) -> tuple[int, ...]:
    """Graded dimensions of the sections supported in the closed half-space
    through a point of the cell in codirection xi: the fiber of the
    restriction from the local star to its open lower part.

    The local star poset has the cell itself as minimum, so its derived
    limit is the stalk in degree zero; only the lower part needs the full
    chain complex."""
    cx = f.cx
    if not cx.is_embedded():
        raise SheafError("Morse groups need a complex with embedded cell closures")
    xiv = frac_vec(xi)
    if all(x == 0 for x in xiv):
        raise SheafError("covector must be nonzero")
    # quick exit: nothing supported on the closed star
    if all(
        f.dim_at(cc.index) == 0
        for cc in cx.cells
        if cx.face_le(cell, cc)
    ):
        return tuple(0 for _ in range(cx.dim + 1))
    local = _local_cells(cx, cell, xi)
    ids = list(range(len(local)))

    def le(i, j):
        return _local_le(local[i], local[j])

    def dim_at(i):
        return f.dim_at(local[i]["torus_cell"])

    def rho(i, j):
        return f.map(local[i]["torus_cell"], local[j]["torus_cell"])

    center = f.dim_at(cell.index)
    full = ChainComplexQ({0: center}, {})
    lower = [i for i in ids if local[i]["xi_sign"] < 0]
    sub, sub_chains = _rlim_complex(lower, le, dim_at, rho, cx.dim + 2)
    # the restriction sends the stalk at the minimum through generization
    rows: list[dict[int, Fraction]] = []
    for ch in sub_chains.get(0, []):
        m = f.map(cell.index, local[ch[0]]["torus_cell"])
        for i in range(dim_at(ch[0])):
            rows.append({j: m[i][j] for j in range(center) if m[i][j] != 0})
    projection = {0: rows}
    fib = mapping_fiber(full, sub, projection)
    dims = fib.cohomology_dims()
    top = max([cx.dim] + [k for k in dims])
    return tuple(dims.get(k, 0) for k in range(top + 1))


def conormal_test_covectors(cx: TorusCellComplex, cell: TorusCell) -> list[tuple[int, ...]]:
    """One rational covector per face of the conormal arrangement of the
    cell: inside the annihilator of the cell's span, the walls are cut by
    the directions of the incident cells."""
    span_rows = [frac_vec(b) for b in cell.basis]
    perp = kernel_basis(span_rows, cx.dim) if span_rows else [
        tuple(F1 if j == i else F0 for j in range(cx.dim)) for i in range(cx.dim)
    ]
    if not perp:
        return []
    k = len(perp)
    # local ray directions: tangent cone generators of the incident cells
    rays = set()
    for cc in cx.cells:
        for v in cx.lift_shifts(cell, cc):
            shifted = cc.lift.translate([Fraction(x) for x in v])
            active = shifted.active_normals_at(cell.witness)
            from .geometry import cone_from_hrep

            cone = cone_from_hrep("M", cx.dim, active) if active else None
            gens = cone.generators if cone else ()
            for gvec in gens:
                rays.add(gvec)
    walls = []
    for r in rays:
        row = tuple(dot(b, r) for b in perp)
        if any(x != 0 for x in row):
            walls.append(row)
    walls = sorted(set(walls))
    out = []

    def rec(i, cons, signs):
        if i == len(walls):
            w = fm_witness(cons, k)
            if w is None or all(x == 0 for x in w):
                return
            xi = tuple(sum((w[t] * perp[t][j] for t in range(k)), F0) for j in range(cx.dim))
            out.append(primitive_int_vector(xi))
            return
        a = walls[i]
        for s, cc in [
            (0, [(a, F0, False), (tuple(-x for x in a), F0, False)]),
            (1, [(a, F0, True)]),
            (-1, [(tuple(-x for x in a), F0, True)]),
        ]:
            nc = cons + cc
            if fm_witness(nc, k) is not None:
                rec(i + 1, nc, signs + [s])

    rec(0, [], [])
    if not walls:
        # no walls: probe representative directions of the whole annihilator
        basis_dirs = []
        for t in range(k):
            for sgn in (1, -1):
                xi = tuple(sgn * perp[t][j] for j in range(cx.dim))
                basis_dirs.append(primitive_int_vector(xi))
        out.extend(basis_dirs)
    return sorted(set(out))


def ss_contained_in_skeleton(f: CellularSheaf, fan: Fan, side: str = "plus") -> dict:
    """Does every nonvanishing Morse direction land in the skeleton of the
    fan (or its antipode)?  Returns {ok, violations, checked}."""
    cx = f.cx
    fam_normals = {fam.normal for fam in cx.families}
    for ray in fan.rays:
        n = primitive_int_vector(ray)
        nn = tuple(-x for x in n)
        if n not in fam_normals and nn not in fam_normals:
            raise SheafError("complex too coarse for the fan's perp strata")
    violations = []
    checked = 0
    for cell in cx.cells:
        for xi in conormal_test_covectors(cx, cell):
            dims = morse_group(f, cell, xi)
            checked += 1
            if any(dims):
                probe = xi if side == "plus" else tuple(-x for x in xi)
                res = skeleton_member(fan, cell.witness, probe)
                if not res["member"]:
                    violations.append(
                        {"cell": cell.index, "witness": [str(x) for x in cell.witness], "xi": list(xi), "morse": list(dims)}
                    )
    return {"ok": not violations, "violations": violations, "checked": checked, "side": side}
