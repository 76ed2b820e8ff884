"""Exact lattice, cone, and not-necessarily-closed polyhedron arithmetic.

Everything is over arbitrary-precision rationals.  Feasibility of systems
of mixed strict/closed linear inequalities is decided by Fourier-Motzkin
elimination with back-substituted witness points, which is adequate at the
scale this package targets (ambient dimension <= 4, a few dozen
constraints).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from .qlinalg import (
    Vec,
    dot,
    frac_vec,
    is_zero_vec,
    kernel_basis,
    primitive_int_vector,
    rank_dense,
    rref,
)

ZERO = Fraction(0)


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Lattice vectors


@dataclass(frozen=True)
class LatticeVector:
    """Integer vector tagged with the lattice it lives in.

    Side "M" is the character lattice, side "N" its dual.  The pairing is
    only defined across sides.
    """

    coords: tuple[int, ...]
    side: str

    def __post_init__(self):
        if self.side not in ("M", "N"):
            raise GeometryError(f"side must be 'M' or 'N', got {self.side!r}")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def primitive(self) -> "LatticeVector":
        return LatticeVector(primitive_int_vector(self.coords), self.side)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-c for c in self.coords), self.side)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        if other.side != self.side:
            raise GeometryError("cannot add vectors from dual lattices")
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.side)


def pair(m: LatticeVector, n: LatticeVector) -> int:
    """The canonical pairing <m, n>; defined only across sides."""
    if m.side == n.side:
        raise GeometryError("pairing requires one M-side and one N-side vector")
    return sum(a * b for a, b in zip(m.coords, n.coords))


def dual_side(side: str) -> str:
    return "N" if side == "M" else "M"


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility with strictness flags

# An inequality is (coeffs, rhs, strict) meaning <coeffs, x> >= rhs,
# with > instead of >= when strict is True.


def _normalize_ineq(coeffs, rhs, strict):
    co = frac_vec(coeffs)
    nv = primitive_int_vector(co)
    if all(c == 0 for c in nv):
        return (nv, Fraction(rhs), strict)
    # positive scale factor relating co to nv
    for a, b in zip(co, nv):
        if b != 0:
            scale = Fraction(b) / a
            break
    return (nv, Fraction(rhs) * scale, strict)


def _dedupe(ineqs):
    best: dict[tuple, tuple[Fraction, bool]] = {}
    for coeffs, rhs, strict in ineqs:
        key = tuple(coeffs)
        cur = best.get(key)
        if cur is None or rhs > cur[0] or (rhs == cur[0] and strict and not cur[1]):
            best[key] = (rhs, strict)
    return [(k, v[0], v[1]) for k, v in best.items()]


def _substitute_equalities(ineqs, eqs, dim):
    """Reduce by equalities.  Returns (new_ineqs, free_cols, lift) where
    lift maps a point in free coordinates back to the full space, or None
    when the equalities are inconsistent."""
    if not eqs:
        return ineqs, list(range(dim)), lambda p: p
    aug = [frac_vec(c) + (Fraction(r),) for c, r in eqs]
    red, pivots = rref(aug, dim + 1)
    if dim in pivots:
        return None
    pivots = [p for p in pivots if p < dim]
    free = [c for c in range(dim) if c not in pivots]
    # x_pivot = red_rhs - sum over free cols
    rows = red[: len(pivots)]

    def lift(p):
        full = [ZERO] * dim
        for fc, val in zip(free, p):
            full[fc] = Fraction(val)
        for row, pc in zip(rows, pivots):
            v = row[dim] - sum(row[fc] * full[fc] for fc in free)
            full[pc] = v
        return tuple(full)

    new_ineqs = []
    for coeffs, rhs, strict in ineqs:
        co = frac_vec(coeffs)
        # substitute pivot variables
        new_rhs = Fraction(rhs)
        newco = [co[fc] for fc in free]
        for row, pc in zip(rows, pivots):
            if co[pc] != 0:
                new_rhs -= co[pc] * row[dim]
                for j, fc in enumerate(free):
                    newco[j] -= co[pc] * row[fc]
        new_ineqs.append((tuple(newco), new_rhs, strict))
    return new_ineqs, free, lift


def _fm_eliminate(ineqs, nvars):
    """Eliminate all variables; returns the list of per-stage data
    [(var_index_in_stage_space, stage_ineqs), ...] outermost first, plus the
    final constant constraints, or None if a trivial contradiction appears."""
    stages = []
    current = [_normalize_ineq(*iq) for iq in ineqs]
    n = nvars
    while n > 0:
        current = _dedupe(current)
        consts = [iq for iq in current if all(c == 0 for c in iq[0])]
        for _, rhs, strict in consts:
            if rhs > 0 or (rhs == 0 and strict):
                return None
        live = [iq for iq in current if not all(c == 0 for c in iq[0])]
        # choose the variable minimizing the product of positive/negative rows
        best_var, best_cost = 0, None
        for v in range(n):
            pos = sum(1 for c, _, _ in live if c[v] > 0)
            neg = sum(1 for c, _, _ in live if c[v] < 0)
            zero = len(live) - pos - neg
            if pos + neg == 0:
                continue
            cost = pos * neg + zero
            if best_cost is None or cost < best_cost:
                best_var, best_cost = v, cost
        v = best_var
        stages.append((v, current))
        pos = [iq for iq in live if iq[0][v] > 0]
        neg = [iq for iq in live if iq[0][v] < 0]
        rest = [iq for iq in live if iq[0][v] == 0]
        nxt = list(consts)

        def drop(vec):
            return vec[:v] + vec[v + 1 :]

        for c, r, s in rest:
            nxt.append((drop(c), r, s))
        for (cp, rp, sp), (cn, rn, sn) in itertools.product(pos, neg):
            a, b = cp[v], -cn[v]
            comb = tuple(b * x + a * y for x, y in zip(drop(cp), drop(cn)))
            rhs = b * rp + a * rn
            nxt.append(_normalize_ineq(comb, rhs, sp or sn))
        current = nxt
        n -= 1
    current = _dedupe(current)
    for _, rhs, strict in current:
        if rhs > 0 or (rhs == 0 and strict):
            return None
    return stages, current


def fm_witness(ineqs, dim, eqs=()):
    """A rational point satisfying all inequalities and equalities, or None.

    Inequalities are (coeffs, rhs, strict) meaning <coeffs, x> >= rhs
    (strictly when flagged)."""
    sub = _substitute_equalities(list(ineqs), list(eqs), dim)
    if sub is None:
        return None
    red_ineqs, free, lift = sub
    k = len(free)
    out = _fm_eliminate(red_ineqs, k)
    if out is None:
        return None
    stages, _ = out
    # back-substitute
    values: list[Fraction] = []
    # stages[i] eliminated variable stages[i][0] from a space of dimension k-i
    point: list[Fraction] = []
    for var, stage_ineqs in reversed(stages):
        if var is None:
            continue
        lo, lo_strict, hi, hi_strict = None, False, None, False
        for c, r, s in stage_ineqs:
            cv = c[var]
            if cv == 0:
                continue
            rest = c[:var] + c[var + 1 :]
            val = (Fraction(r) - dot(rest, point)) / cv
            if cv > 0:
                if lo is None or val > lo:
                    lo, lo_strict = val, s
                elif val == lo:
                    lo_strict = lo_strict or s
            else:
                if hi is None or val < hi:
                    hi, hi_strict = val, s
                elif val == hi:
                    hi_strict = hi_strict or s
        if lo is None and hi is None:
            x = ZERO
        elif lo is None:
            x = hi - 1 if hi_strict else hi
        elif hi is None:
            x = lo + 1 if lo_strict else lo
        elif lo == hi:
            x = lo
        else:
            x = (lo + hi) / 2
        point.insert(var, x)
    full = lift(tuple(point))
    # safety: verify
    for c, r, s in ineqs:
        v = dot(c, full)
        if v < r or (s and v == r):
            return None
    for c, r in eqs:
        if dot(c, full) != Fraction(r):
            return None
    return full


def fm_feasible(ineqs, dim, eqs=()) -> bool:
    return fm_witness(ineqs, dim, eqs) is not None


def project_interval(ineqs, dim, coord):
    """Exact projection of a feasible system onto one coordinate.

    Returns (lo, lo_strict, hi, hi_strict) with None endpoints when
    unbounded; returns None when the system is infeasible."""
    current = [_normalize_ineq(*iq) for iq in ineqs]
    order = [v for v in range(dim) if v != coord]
    for v in sorted(order, reverse=True):
        current = _dedupe(current)
        pos = [iq for iq in current if iq[0][v] > 0]
        neg = [iq for iq in current if iq[0][v] < 0]
        rest = [iq for iq in current if iq[0][v] == 0]

        def drop(vec, at=v):
            return vec[:at] + vec[at + 1 :]

        nxt = [(drop(c), r, s) for c, r, s in rest]
        for (cp, rp, sp), (cn, rn, sn) in itertools.product(pos, neg):
            a, b = cp[v], -cn[v]
            comb = tuple(b * x + a * y for x, y in zip(drop(cp), drop(cn)))
            nxt.append(_normalize_ineq(comb, b * rp + a * rn, sp or sn))
        current = nxt
    lo, lo_strict, hi, hi_strict = None, False, None, False
    for c, r, s in _dedupe(current):
        cv = c[0]
        if cv == 0:
            if r > 0 or (r == 0 and s):
                return None
            continue
        val = Fraction(r) / cv
        if cv > 0:
            if lo is None or val > lo:
                lo, lo_strict = val, s
            elif val == lo:
                lo_strict = lo_strict or s
        else:
            if hi is None or val < hi:
                hi, hi_strict = val, s
            elif val == hi:
                hi_strict = hi_strict or s
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            return None
    return (lo, lo_strict, hi, hi_strict)


# ---------------------------------------------------------------------------
# Constraints and NncPolyhedron


@dataclass(frozen=True)
class Constraint:
    """<normal, x> >= offset, strict when flagged.  normal is a primitive
    integer vector (after positive rescaling)."""

    normal: tuple[int, ...]
    offset: Fraction
    strict: bool = False

    def satisfied_by(self, point) -> bool:
        v = dot(self.normal, point)
        return v > self.offset if self.strict else v >= self.offset

    def negation(self) -> "Constraint":
        # not(a.x >= b) is -a.x > -b ; not(a.x > b) is -a.x >= -b
        return Constraint(tuple(-c for c in self.normal), -self.offset, not self.strict)

    def relaxed(self) -> "Constraint":
        return Constraint(self.normal, self.offset, False)

    def as_tuple(self):
        return (self.normal, self.offset, self.strict)


def make_constraint(normal, offset, strict=False) -> Constraint:
    nv, rhs, s = _normalize_ineq(normal, offset, strict)
    return Constraint(nv, rhs, s)


_CONSTRAINT_SORT = lambda c: (c.normal, c.offset, c.strict)


@dataclass(frozen=True)
class NncPolyhedron:
    """Finite conjunction of closed and strict affine half-spaces over Q.

    Canonical form: constraints normalized to primitive integer normals by
    positive rescaling, deduplicated, redundancy-pruned, and sorted by
    (normal, offset, strictness).  Set equality is decided exactly by
    symmetric-difference emptiness, never by comparing representations.
    """

    dim: int
    constraints: tuple[Constraint, ...]

    @staticmethod
    def from_constraints(dim, constraints, prune=True) -> "NncPolyhedron":
        cons = [make_constraint(*c.as_tuple()) if isinstance(c, Constraint) else make_constraint(*c) for c in constraints]
        cons = [c for c in cons if not (is_zero_vec(c.normal) and (c.offset < 0 or (c.offset == 0 and not c.strict)))]
        for c in cons:
            if is_zero_vec(c.normal):
                # unsatisfiable constant constraint
                return NncPolyhedron(dim, (Constraint(tuple(0 for _ in range(dim)), Fraction(1), False),))
        # dedupe keeping the tightest per normal direction is wrong for
        # polyhedra (same normal, different offsets both matter only via max);
        # keep max offset per (normal), strict beating closed on ties.
        dd = _dedupe([c.as_tuple() for c in cons])
        cons = sorted((Constraint(n, r, s) for n, r, s in dd), key=_CONSTRAINT_SORT)
        poly = NncPolyhedron(dim, tuple(cons))
        if poly.is_empty():
            return NncPolyhedron(dim, (Constraint(tuple(0 for _ in range(dim)), Fraction(1), False),))
        if prune:
            kept = list(cons)
            i = 0
            while i < len(kept):
                trial = kept[:i] + kept[i + 1 :]
                system = [c.as_tuple() for c in trial] + [kept[i].negation().as_tuple()]
                if not fm_feasible(system, dim):
                    kept = trial
                else:
                    i += 1
            poly = NncPolyhedron(dim, tuple(sorted(kept, key=_CONSTRAINT_SORT)))
        return poly

    @staticmethod
    def whole_space(dim) -> "NncPolyhedron":
        return NncPolyhedron(dim, ())

    @staticmethod
    def empty(dim) -> "NncPolyhedron":
        return NncPolyhedron(dim, (Constraint(tuple(0 for _ in range(dim)), Fraction(1), False),))

    # -- basic predicates

    def is_empty(self) -> bool:
        return self.witness() is None

    def witness(self) -> Vec | None:
        return fm_witness([c.as_tuple() for c in self.constraints], self.dim)

    def contains(self, point) -> bool:
        p = frac_vec(point)
        return all(c.satisfied_by(p) for c in self.constraints)

    def closure_contains(self, point) -> bool:
        p = frac_vec(point)
        return all(c.relaxed().satisfied_by(p) for c in self.constraints)

    def closure(self) -> "NncPolyhedron":
        return NncPolyhedron.from_constraints(self.dim, [c.relaxed() for c in self.constraints])

    # -- operations

    def intersect(self, other: "NncPolyhedron") -> "NncPolyhedron":
        if other.dim != self.dim:
            raise GeometryError("mismatched ambient dimension")
        return NncPolyhedron.from_constraints(self.dim, self.constraints + other.constraints)

    def translate(self, m) -> "NncPolyhedron":
        mv = frac_vec(m)
        if len(mv) != self.dim:
            raise GeometryError("mismatched ambient dimension")
        return NncPolyhedron.from_constraints(
            self.dim,
            [Constraint(c.normal, c.offset + dot(c.normal, mv), c.strict) for c in self.constraints],
            prune=False,
        )

    def scale(self, k) -> "NncPolyhedron":
        k = Fraction(k)
        if k == 0:
            raise GeometryError("scale factor must be nonzero")
        if k > 0:
            cons = [Constraint(c.normal, c.offset * k, c.strict) for c in self.constraints]
        else:
            cons = [Constraint(tuple(-x for x in c.normal), -c.offset * k, c.strict) for c in self.constraints]
        return NncPolyhedron.from_constraints(self.dim, cons, prune=False)

    def recession_cone(self, side: str = "M") -> "Cone":
        if self.is_empty():
            return Cone.from_generators(side, self.dim, [])
        return cone_from_hrep(side, self.dim, [c.normal for c in self.constraints])

    def subtract(self, other: "NncPolyhedron") -> list["NncPolyhedron"]:
        """self minus other as a list of disjoint nonempty pieces."""
        if other.dim != self.dim:
            raise GeometryError("mismatched ambient dimension")
        pieces = []
        sofar: list[Constraint] = []
        for c in other.constraints:
            cand = NncPolyhedron.from_constraints(
                self.dim, list(self.constraints) + sofar + [c.negation()]
            )
            if not cand.is_empty():
                pieces.append(cand)
            sofar.append(c)
        return pieces

    def affine_hull_equality_normals(self) -> list[tuple[int, ...]]:
        """Normals of constraints forced to equality on the whole set."""
        out = []
        system = [c.as_tuple() for c in self.constraints]
        for c in self.constraints:
            if c.strict:
                continue
            # forced to equality iff <normal, x> > offset is infeasible
            loose = system + [(c.normal, c.offset, True)]
            if not fm_feasible(loose, self.dim):
                out.append(c.normal)
        return out

    def affine_dim(self) -> int:
        if self.is_empty():
            return -1
        eqs = self.affine_hull_equality_normals()
        return self.dim - rank_dense([frac_vec(n) for n in eqs], self.dim) if eqs else self.dim

    def active_normals_at(self, point) -> list[tuple[int, ...]]:
        p = frac_vec(point)
        return [c.normal for c in self.constraints if dot(c.normal, p) == c.offset]

    def same_set(self, other: "NncPolyhedron") -> bool:
        return symmetric_difference_empty(self, other)

    def __eq__(self, other):
        if not isinstance(other, NncPolyhedron):
            return NotImplemented
        return self.dim == other.dim and symmetric_difference_empty(self, other)

    def __hash__(self):
        return hash(self.dim)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "constraints": [
                {"normal": list(c.normal), "offset": str(c.offset), "strict": c.strict}
                for c in self.constraints
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "NncPolyhedron":
        cons = [
            (tuple(c["normal"]), Fraction(c["offset"]), bool(c["strict"]))
            for c in data["constraints"]
        ]
        return NncPolyhedron.from_constraints(int(data["dim"]), cons)


def intersect(a: NncPolyhedron, b: NncPolyhedron) -> NncPolyhedron:
    return a.intersect(b)


def translate(a: NncPolyhedron, m) -> NncPolyhedron:
    return a.translate(m)


def scale(k, a: NncPolyhedron) -> NncPolyhedron:
    return a.scale(k)


def recession_cone(a: NncPolyhedron, side: str = "M") -> "Cone":
    return a.recession_cone(side)


def difference_pieces(pieces_a: list[NncPolyhedron], pieces_b: list[NncPolyhedron]) -> list[NncPolyhedron]:
    """(union of pieces_a) minus (union of pieces_b), as disjointish pieces."""
    current = list(pieces_a)
    for b in pieces_b:
        nxt: list[NncPolyhedron] = []
        for piece in current:
            nxt.extend(piece.subtract(b))
        current = nxt
    return [p for p in current if not p.is_empty()]


def symmetric_difference_empty(a: NncPolyhedron, b: NncPolyhedron) -> bool:
    """Exact set equality test for NncPolyhedra."""
    if a.dim != b.dim:
        raise GeometryError("mismatched ambient dimension")
    return not difference_pieces([a], [b]) and not difference_pieces([b], [a])


# ---------------------------------------------------------------------------
# Cones


def _vrep_to_hrep(generators: tuple[tuple[int, ...], ...], dim: int) -> tuple[tuple[int, ...], ...]:
    """A halfspace description {x : <h, x> >= 0 for all h in H} of
    cone(generators), via Fourier-Motzkin elimination of the multipliers.

    The output is a valid (not necessarily irredundant) homogeneous H-rep;
    for cones that span a proper subspace it includes the +-pairs cutting
    out the span."""
    k = len(generators)
    if k == 0:
        out = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            out.append(tuple(e))
            out.append(tuple(-x for x in e))
        return tuple(sorted(out))
    # Columns 0..k-1 are the multipliers lambda_j, columns k..k+dim-1 are x.
    # Equality rows: sum_j g_j[i] lambda_j - x_i = 0.  With lambdas first,
    # rref pivots prefer lambda columns; rows pivoting on an x column carry
    # no lambda entries and are pure span relations on x.
    rows = []
    for i in range(dim):
        co = [Fraction(generators[j][i]) for j in range(k)]
        co += [Fraction(-1) if t == i else ZERO for t in range(dim)]
        rows.append(tuple(co))
    red, pivots = rref(rows, k + dim)
    span_normals = []
    for row, pc in zip(red, pivots):
        if pc >= k:
            span_normals.append(primitive_int_vector(row[k:]))
    free = [c for c in range(k + dim) if c not in pivots]
    # lambda_j >= 0, expressed over the free columns as sparse dicts.
    cons: list[dict[int, Fraction]] = []
    for j in range(k):
        if j in pivots:
            i = pivots.index(j)
            co = {fc: -red[i][fc] for fc in free if red[i][fc] != 0}
        else:
            co = {j: Fraction(1)}
        cons.append(co)

    def dedupe_dirs(cs):
        seen = {}
        for c in cs:
            if not c:
                continue
            items = tuple(sorted(c.items()))
            vec = primitive_int_vector([v for _, v in items])
            key = (tuple(cc for cc, _ in items), vec)
            seen[key] = {cc: Fraction(vv) for (cc, _), vv in zip(items, vec)}
        return list(seen.values())

    lam_free = [c for c in free if c < k]
    for lc in sorted(lam_free, reverse=True):
        cons = dedupe_dirs(cons)
        pos = [c for c in cons if c.get(lc, ZERO) > 0]
        neg = [c for c in cons if c.get(lc, ZERO) < 0]
        rest = [c for c in cons if c.get(lc, ZERO) == 0]
        nxt = list(rest)
        for cp, cn in itertools.product(pos, neg):
            a, b = cp[lc], -cn[lc]
            comb: dict[int, Fraction] = {}
            for cc, v in cp.items():
                comb[cc] = comb.get(cc, ZERO) + b * v
            for cc, v in cn.items():
                comb[cc] = comb.get(cc, ZERO) + a * v
            comb = {cc: v for cc, v in comb.items() if v != 0 and cc != lc}
            if comb:
                nxt.append(comb)
        cons = nxt
    normals = set()
    for c in dedupe_dirs(cons):
        func = [ZERO] * dim
        for cc, v in c.items():
            if cc < k:
                raise GeometryError("lambda column survived elimination")
            func[cc - k] = v
        nv = primitive_int_vector(func)
        if not is_zero_vec(nv):
            normals.add(nv)
    for s in span_normals:
        normals.add(s)
        normals.add(tuple(-x for x in s))
    return tuple(sorted(normals))


def _extremal_reduce(side: str, dim: int, gens: list[tuple[int, ...]]) -> tuple[tuple[int, ...], ...]:
    uniq = sorted({primitive_int_vector(g) for g in gens if not is_zero_vec(g)})
    changed = True
    while changed:
        changed = False
        for g in list(uniq):
            others = [h for h in uniq if h != g]
            if not others:
                continue
            k = len(others)
            eqs = []
            for i in range(dim):
                co = [Fraction(others[j][i]) for j in range(k)]
                eqs.append((tuple(co), Fraction(g[i])))
            ineqs = []
            for j in range(k):
                co = [ZERO] * k
                co[j] = Fraction(1)
                ineqs.append((tuple(co), ZERO, False))
            if fm_feasible(ineqs, k, eqs):
                uniq.remove(g)
                changed = True
                break
    return tuple(uniq)


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone given by extremal generators, all on one
    side (M or N).  Not necessarily proper: generator sets may span lines."""

    side: str
    dim: int
    generators: tuple[tuple[int, ...], ...]
    _hrep_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @staticmethod
    def from_generators(side, dim, vectors) -> "Cone":
        gens = []
        for v in vectors:
            if isinstance(v, LatticeVector):
                if v.side != side:
                    raise GeometryError("generator side mismatch")
                gens.append(v.coords)
            else:
                gens.append(tuple(int(x) for x in v))
        return Cone(side, dim, _extremal_reduce(side, dim, gens))

    def hrep(self) -> tuple[tuple[int, ...], ...]:
        """Normals h (dual side) with cone = {x : <h, x> >= 0 for all h}."""
        if "h" not in self._hrep_cache:
            self._hrep_cache["h"] = _vrep_to_hrep(self.generators, self.dim)
        return self._hrep_cache["h"]

    def dual(self) -> "Cone":
        return Cone.from_generators(dual_side(self.side), self.dim, self.hrep())

    def contains_point(self, v) -> bool:
        vv = frac_vec(v if not isinstance(v, LatticeVector) else v.coords)
        return all(dot(h, vv) >= 0 for h in self.hrep())

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains_point(g) for g in other.generators)

    def cone_dim(self) -> int:
        if not self.generators:
            return 0
        return rank_dense([frac_vec(g) for g in self.generators], self.dim)

    def is_proper(self) -> bool:
        """C is proper (strongly convex) iff C meets -C only at 0."""
        return rank_dense([frac_vec(h) for h in self.hrep()], self.dim) == self.dim

    def lineality_basis(self) -> list[tuple[int, ...]]:
        basis = kernel_basis([frac_vec(h) for h in self.hrep()], self.dim)
        return [primitive_int_vector(b) for b in basis]

    def negated(self) -> "Cone":
        return Cone.from_generators(self.side, self.dim, [tuple(-x for x in g) for g in self.generators])

    def minkowski_sum(self, other: "Cone") -> "Cone":
        if other.side != self.side or other.dim != self.dim:
            raise GeometryError("operands must share side and dimension")
        return Cone.from_generators(self.side, self.dim, self.generators + other.generators)

    def as_polyhedron(self) -> NncPolyhedron:
        return NncPolyhedron.from_constraints(
            self.dim, [(h, ZERO, False) for h in self.hrep()], prune=False
        )

    def relative_interior_point(self) -> Vec:
        if not self.generators:
            return tuple(ZERO for _ in range(self.dim))
        acc = [ZERO] * self.dim
        for g in self.generators:
            acc = [a + Fraction(x) for a, x in zip(acc, g)]
        return tuple(acc)

    def faces(self) -> list["Cone"]:
        """All faces, this cone included, deduplicated."""
        hs = self.hrep()
        seen = {}
        for r in range(len(hs) + 1):
            for subset in itertools.combinations(range(len(hs)), r):
                gens = _face_generators(self, subset)
                face = Cone.from_generators(self.side, self.dim, gens)
                seen.setdefault(face.generators, face)
        return sorted(seen.values(), key=lambda c: (c.cone_dim(), c.generators))

    def __eq__(self, other):
        if not isinstance(other, Cone):
            return NotImplemented
        return (
            self.side == other.side
            and self.dim == other.dim
            and self.contains_cone(other)
            and other.contains_cone(self)
        )

    def __hash__(self):
        return hash((self.side, self.dim))


def _face_generators(cone: Cone, tight_indices) -> list[tuple[int, ...]]:
    hs = cone.hrep()
    out = []
    for g in cone.generators:
        if all(dot(hs[i], frac_vec(g)) == 0 for i in tight_indices):
            out.append(g)
    return out


def cone_from_hrep(side: str, dim: int, normals) -> Cone:
    """The cone {x : <h, x> >= 0 for all h}, described by generators."""
    norm_t = tuple(primitive_int_vector(h) for h in normals)
    gens = _vrep_to_hrep(tuple(sorted(set(norm_t))), dim)
    return Cone.from_generators(side, dim, gens)


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def conormal_cone(z: NncPolyhedron, x, side: str = "N") -> Cone:
    """Conormal cone of a convex NncPolyhedron at a point of its closure,
    generated by the active constraint normals."""
    p = frac_vec(x)
    if not z.closure_contains(p):
        raise GeometryError("point not in closure")
    active = z.active_normals_at(p)
    return Cone.from_generators(side, z.dim, active)


def conormal_cone_complement(z: NncPolyhedron, x, side: str = "N") -> Cone:
    """Conormal cone of the complement of z at a boundary point; the
    antipode of the conormal of z."""
    return conormal_cone(z, x, side).negated()
