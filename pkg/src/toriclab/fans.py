"""Smooth complete fans, star subdivision, blow-downs, and the surface
minimal model driver."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Cone, LatticeVector, difference_pieces
from .qlinalg import frac_vec, primitive_int_vector, rank_dense, smith_normal_form


class FanError(ValueError):
    pass


@dataclass(frozen=True)
class MinimalModelClass:
    """Classification tag of a minimal toric surface."""

    tag: str  # "P2" | "P1xP1" | "Hirzebruch"
    index: int = 0  # Hirzebruch index a >= 1; 0 otherwise

    def __str__(self):
        if self.tag == "Hirzebruch":
            return f"Hirzebruch({self.index})"
        return self.tag


P2 = MinimalModelClass("P2")
P1XP1 = MinimalModelClass("P1xP1")


def hirzebruch_class(a: int) -> MinimalModelClass:
    if a == 0:
        return P1XP1
    return MinimalModelClass("Hirzebruch", abs(a))


@dataclass(frozen=True)
class Fan:
    """A fan given by primitive rays and maximal cones as ray-index sets."""

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[frozenset[int], ...]

    @staticmethod
    def make(dim, rays, max_cones) -> "Fan":
        rays_t = tuple(tuple(int(x) for x in r) for r in rays)
        if len(set(rays_t)) != len(rays_t):
            raise FanError("duplicate rays")
        if not max_cones:
            raise FanError("empty cone list")
        mc = []
        for c in max_cones:
            s = frozenset(int(i) for i in c)
            for i in s:
                if not (0 <= i < len(rays_t)):
                    raise FanError(f"ray index {i} out of range")
            mc.append(s)
        mc_sorted = tuple(sorted(set(mc), key=lambda s: sorted(s)))
        return Fan(dim, rays_t, mc_sorted)

    # -- derived structure

    def ray_vectors(self) -> list[LatticeVector]:
        return [LatticeVector(r, "N") for r in self.rays]

    def all_cones(self) -> list[frozenset[int]]:
        """All cones of the fan as ray-index sets (smooth fans are
        simplicial, so faces are subsets), including the zero cone."""
        seen = {frozenset()}
        for c in self.max_cones:
            for r in range(1, len(c) + 1):
                for sub in itertools.combinations(sorted(c), r):
                    seen.add(frozenset(sub))
        return sorted(seen, key=lambda s: (len(s), sorted(s)))

    def cone_geometry(self, index_set) -> Cone:
        return Cone.from_generators("N", self.dim, [self.rays[i] for i in index_set])

    def contains_direction(self, v) -> frozenset[int] | None:
        """A maximal cone containing the direction v, or None."""
        for c in self.max_cones:
            if self.cone_geometry(c).contains_point(v):
                return c
        return None

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [sorted(c) for c in self.max_cones],
        }

    @staticmethod
    def from_json(data: dict) -> "Fan":
        return Fan.make(int(data["dim"]), data["rays"], data["max_cones"])


# ---------------------------------------------------------------------------
# named fans


def fan_p2() -> Fan:
    return Fan.make(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)])


def fan_p1p1() -> Fan:
    return Fan.make(2, [(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


def fan_hirzebruch(a: int) -> Fan:
    return Fan.make(2, [(1, 0), (0, 1), (-1, a), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


def fan_p3() -> Fan:
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    return Fan.make(3, rays, [c for c in itertools.combinations(range(4), 3)])


def fan_pn(n: int) -> Fan:
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    return Fan.make(n, rays, [c for c in itertools.combinations(range(n + 1), n)])


# ---------------------------------------------------------------------------
# validation


def _is_unimodular_simplex_cone(rays: list[tuple[int, ...]]) -> bool:
    """Ray generators extend to a Z-basis: all elementary divisors are 1."""
    if not rays:
        return True
    mat = [list(r) for r in rays]
    if rank_dense([frac_vec(r) for r in rays]) != len(rays):
        return False
    _, d, _ = smith_normal_form(mat)
    return all(d[i][i] == 1 for i in range(len(rays)))


def cyclic_ray_order(rays) -> list[int]:
    """Indices of 2-d rays sorted counterclockwise starting from the ray of
    smallest angle class; exact, no floating point."""

    def half(v):
        x, y = v
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp_key(i):
        return (half(rays[i]), 0)

    idx = list(range(len(rays)))

    def less(i, j):
        hi, hj = half(rays[i]), half(rays[j])
        if hi != hj:
            return hi < hj
        xi, yi = rays[i]
        xj, yj = rays[j]
        cross = xi * yj - yi * xj
        return cross > 0

    # insertion sort with the exact comparator
    out: list[int] = []
    for i in idx:
        k = 0
        while k < len(out) and less(out[k], i):
            k += 1
        out.insert(k, i)
    return out


def validate_fan(f: Fan) -> dict:
    """Report {smooth, complete, violations}; malformed input raises."""
    violations: list[str] = []
    for r in f.rays:
        if primitive_int_vector(r) != r:
            raise FanError(f"ray {r} is not primitive")
    smooth = True
    for c in f.max_cones:
        rays = [f.rays[i] for i in sorted(c)]
        if len(c) != f.dim:
            smooth = False
            violations.append(f"cone {sorted(c)} is not full-dimensional simplicial")
            continue
        if not _is_unimodular_simplex_cone(rays):
            smooth = False
            violations.append(f"cone {sorted(c)} is not smooth (determinant != +-1)")
    complete = True
    if f.dim == 2:
        order = cyclic_ray_order(f.rays)
        used = set()
        for k in range(len(order)):
            i, j = order[k], order[(k + 1) % len(order)]
            xi, yi = f.rays[i]
            xj, yj = f.rays[j]
            if xi * yj - yi * xj <= 0:
                complete = False
                violations.append(f"consecutive rays {f.rays[i]}, {f.rays[j]} do not span positively")
            if frozenset((i, j)) not in f.max_cones:
                complete = False
                violations.append(f"missing cone on consecutive rays {sorted((i, j))}")
            used.add(frozenset((i, j)))
        for c in f.max_cones:
            if c not in used:
                complete = False
                violations.append(f"cone {sorted(c)} is not spanned by consecutive rays")
    else:
        # facet pairing: every facet of a maximal cone lies in exactly two
        facet_count: dict[frozenset[int], int] = {}
        for c in f.max_cones:
            if len(c) != f.dim:
                complete = False
                continue
            for facet in itertools.combinations(sorted(c), f.dim - 1):
                facet_count[frozenset(facet)] = facet_count.get(frozenset(facet), 0) + 1
        for facet, count in sorted(facet_count.items(), key=lambda kv: sorted(kv[0])):
            if count != 2:
                complete = False
                violations.append(f"facet {sorted(facet)} lies in {count} maximal cones")
        # connectivity of the adjacency graph
        if f.max_cones and complete:
            adj = {c: set() for c in f.max_cones}
            for c1, c2 in itertools.combinations(f.max_cones, 2):
                if len(c1 & c2) == f.dim - 1:
                    adj[c1].add(c2)
                    adj[c2].add(c1)
            seen = {f.max_cones[0]}
            stack = [f.max_cones[0]]
            while stack:
                cur = stack.pop()
                for nb in adj[cur]:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            if len(seen) != len(f.max_cones):
                complete = False
                violations.append("maximal cone adjacency graph is disconnected")
    # pairwise intersections must be common faces
    for c1, c2 in itertools.combinations(f.max_cones, 2):
        g1, g2 = f.cone_geometry(c1), f.cone_geometry(c2)
        common = f.cone_geometry(c1 & c2)
        inter = g1.as_polyhedron().intersect(g2.as_polyhedron())
        if not inter.same_set(common.as_polyhedron()):
            violations.append(f"cones {sorted(c1)} and {sorted(c2)} do not meet in a common face")
    return {"smooth": smooth, "complete": complete, "violations": violations}


def is_smooth_complete(f: Fan) -> bool:
    rep = validate_fan(f)
    return rep["smooth"] and rep["complete"] and not rep["violations"]


# ---------------------------------------------------------------------------
# star subdivision and blow-down


def star_subdivide_at_max_cone(f: Fan, sigma) -> Fan:
    sigma = frozenset(sigma)
    if sigma not in f.max_cones:
        raise FanError("sigma is not a maximal cone of the fan")
    rays = [f.rays[i] for i in sorted(sigma)]
    if not _is_unimodular_simplex_cone(rays):
        raise FanError("sigma is not smooth")
    e_new = tuple(sum(r[i] for r in rays) for i in range(f.dim))
    if e_new in f.rays:
        raise FanError("subdivision ray already present")
    new_rays = f.rays + (e_new,)
    new_index = len(f.rays)
    new_cones = [c for c in f.max_cones if c != sigma]
    for drop in sorted(sigma):
        new_cones.append((sigma - {drop}) | {new_index})
    return Fan.make(f.dim, new_rays, new_cones)


def blow_down_candidates(f: Fan) -> list[tuple[int, ...]]:
    """Rays v with v_prev + v_next = v in the cyclic order (2-d only)."""
    if f.dim != 2:
        raise FanError("blow-down detection is restricted to surfaces")
    order = cyclic_ray_order(f.rays)
    n = len(order)
    out = []
    for k in range(n):
        prev_ray = f.rays[order[(k - 1) % n]]
        this_ray = f.rays[order[k]]
        next_ray = f.rays[order[(k + 1) % n]]
        if tuple(a + b for a, b in zip(prev_ray, next_ray)) == this_ray:
            out.append(this_ray)
    return sorted(out)


def blow_down(f: Fan, ray: tuple[int, ...]) -> Fan:
    if f.dim != 2:
        raise FanError("blow-down is restricted to surfaces")
    if ray not in blow_down_candidates(f):
        raise FanError(f"ray {ray} is not contractible")
    idx = f.rays.index(tuple(ray))
    order = cyclic_ray_order(f.rays)
    k = order.index(idx)
    prev_idx = order[(k - 1) % len(order)]
    next_idx = order[(k + 1) % len(order)]
    new_rays = [r for i, r in enumerate(f.rays) if i != idx]

    def remap(i):
        return i if i < idx else i - 1

    new_cones = []
    for c in f.max_cones:
        if idx in c:
            continue
        new_cones.append(frozenset(remap(i) for i in c))
    new_cones.append(frozenset((remap(prev_idx), remap(next_idx))))
    return Fan.make(2, new_rays, new_cones)


def neighbor_sum_coefficients(f: Fan) -> list[int]:
    """c_i with v_{i-1} + v_{i+1} = c_i * v_i in the cyclic order."""
    order = cyclic_ray_order(f.rays)
    n = len(order)
    out = []
    for k in range(n):
        prev_ray = f.rays[order[(k - 1) % n]]
        this_ray = f.rays[order[k]]
        next_ray = f.rays[order[(k + 1) % n]]
        s = tuple(a + b for a, b in zip(prev_ray, next_ray))
        # s must be an integer multiple of this_ray for smooth complete fans
        coeff = None
        for a, b in zip(s, this_ray):
            if b != 0:
                coeff = Fraction(a, b)
                break
        if coeff is None:
            coeff = Fraction(0)
        if tuple(coeff * x for x in this_ray) != tuple(Fraction(x) for x in s):
            raise FanError("neighbor sum is not proportional to the ray")
        if coeff.denominator != 1:
            raise FanError("neighbor sum coefficient is not an integer")
        out.append(int(coeff))
    return out


def classify_minimal(f: Fan) -> MinimalModelClass:
    if f.dim != 2:
        raise FanError("classification is restricted to surfaces")
    if blow_down_candidates(f):
        raise FanError("not minimal")
    n = len(f.rays)
    if n == 3:
        return P2
    if n == 4:
        coeffs = neighbor_sum_coefficients(f)
        nonzero = [abs(c) for c in coeffs if c != 0]
        if not nonzero:
            return P1XP1
        return hirzebruch_class(max(nonzero))
    raise FanError(f"unexpected minimal surface fan with {n} rays")


def mmp_reduce(f: Fan) -> tuple[list[dict], MinimalModelClass]:
    """Repeatedly blow down the lexicographically smallest candidate ray.

    Returns (trace, classification); each trace entry records the removed
    ray and the merged cone so the reduction replays by star subdivisions.
    """
    trace: list[dict] = []
    current = f
    while True:
        cands = blow_down_candidates(current)
        if not cands:
            break
        ray = cands[0]
        idx = current.rays.index(ray)
        order = cyclic_ray_order(current.rays)
        k = order.index(idx)
        prev_ray = current.rays[order[(k - 1) % len(order)]]
        next_ray = current.rays[order[(k + 1) % len(order)]]
        nxt = blow_down(current, ray)
        trace.append({"ray": ray, "merged_cone_rays": (prev_ray, next_ray)})
        current = nxt
    return trace, classify_minimal(current)


def mmp_replay(minimal: Fan, trace: list[dict]) -> Fan:
    """Invert a reduction trace by star subdivisions, innermost last."""
    current = minimal
    for entry in reversed(trace):
        pair = entry["merged_cone_rays"]
        idx = frozenset(current.rays.index(tuple(r)) for r in pair)
        current = star_subdivide_at_max_cone(current, idx)
    return current


def refines(coarse: Fan, fine: Fan) -> bool:
    """Structural refinement: same support and every fine cone inside some
    coarse cone, every coarse cone covered by the fine cones inside it."""
    if coarse.dim != fine.dim:
        return False
    for chat in fine.max_cones:
        geom = fine.cone_geometry(chat)
        if not any(coarse.cone_geometry(c).contains_cone(geom) for c in coarse.max_cones):
            return False
    for c in coarse.max_cones:
        target = coarse.cone_geometry(c).as_polyhedron()
        inside = [
            fine.cone_geometry(chat).as_polyhedron()
            for chat in fine.max_cones
            if coarse.cone_geometry(c).contains_cone(fine.cone_geometry(chat))
        ]
        if difference_pieces([target], inside):
            return False
    return True


# ---------------------------------------------------------------------------
# canonical forms up to lattice automorphism (surfaces)


def canonical_surface_form(f: Fan) -> tuple:
    """Canonical representation of a smooth complete surface fan up to
    GL_2(Z): the lexicographically smallest cyclic ray listing over all
    choices of adjacent basis pairs and both orientations."""
    if f.dim != 2:
        raise FanError("canonical form implemented for surfaces")
    order = cyclic_ray_order(f.rays)
    seq = [f.rays[i] for i in order]
    n = len(seq)
    best = None
    for k in range(n):
        for direction in (1, -1):
            cyc = [seq[(k + direction * t) % n] for t in range(n)]
            u, v = cyc[0], cyc[1]
            d = u[0] * v[1] - u[1] * v[0]
            if abs(d) != 1:
                continue
            # lattice map sending (u, v) to the standard basis
            inv = ((v[1] * d, -v[0] * d), (-u[1] * d, u[0] * d)) if abs(d) == 1 else None
            a, b = inv
            mapped = tuple(
                (a[0] * r[0] + a[1] * r[1], b[0] * r[0] + b[1] * r[1]) for r in cyc
            )
            if best is None or mapped < best:
                best = mapped
    if best is None:
        raise FanError("no adjacent basis pair found")
    return best


def surface_fans_equivalent(f: Fan, g: Fan) -> bool:
    return canonical_surface_form(f) == canonical_surface_form(g)


# ---------------------------------------------------------------------------
# zonotopal / cragged predicates


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def is_zonotopal_unimodular(f: Fan) -> bool:
    """Rays closed under negation, the fan induced by the arrangement of
    the ray-spanning hyperplanes (walls), and every linearly independent
    subset of rays extendable to a Z-basis."""
    rayset = set(f.rays)
    for r in f.rays:
        if tuple(-x for x in r) not in rayset:
            return False
    # unimodularity of all linearly independent ray subsets
    for k in range(1, f.dim + 1):
        for sub in itertools.combinations(f.rays, k):
            if rank_dense([frac_vec(r) for r in sub]) == k and not _is_unimodular_simplex_cone(list(sub)):
                return False
    # arrangement-induced: hyperplanes spanned by the fan's walls; in the
    # surface case the walls are the ray lines themselves
    if f.dim != 2:
        raise FanError("zonotopal test implemented for surfaces")

    def line_normal(r):
        n = primitive_int_vector((r[1], -r[0]))
        for x in n:
            if x != 0:
                return n if x > 0 else tuple(-y for y in n)
        return n

    lines = sorted({line_normal(r) for r in f.rays})
    # chambers of the line arrangement must be exactly the maximal cones:
    # every maximal cone's interior point must not cross any line, and each
    # chamber must appear
    for c in f.max_cones:
        interior = f.cone_geometry(c).relative_interior_point()
        gens = [f.rays[i] for i in sorted(c)]
        for normal in lines:
            signs = {_sign(sum(a * b for a, b in zip(normal, g))) for g in gens}
            signs.discard(0)
            if len(signs) > 1:
                return False
    # count chambers: a central arrangement of m distinct lines has 2m
    # chambers, which must equal the number of maximal cones
    if len(f.max_cones) != 2 * len(lines):
        return False
    return True


def is_cragged(f: Fan) -> bool:
    """Two conditions: cone hulls of ray subsets are unions of fan cones,
    and rays inside the hull of any independent subset B generate the same
    lattice as B with B as a Z-basis."""
    all_cones = [f.cone_geometry(c) for c in f.all_cones()]
    nrays = len(f.rays)
    for r in range(1, nrays + 1):
        for sub in itertools.combinations(range(nrays), r):
            gens = [f.rays[i] for i in sub]
            hull = Cone.from_generators("N", f.dim, gens)
            inside = [c.as_polyhedron() for c in all_cones if hull.contains_cone(c)]
            if difference_pieces([hull.as_polyhedron()], inside):
                return False
    for k in range(1, f.dim + 1):
        for sub in itertools.combinations(range(nrays), k):
            gens = [f.rays[i] for i in sub]
            if rank_dense([frac_vec(g) for g in gens]) != k:
                continue
            hull = Cone.from_generators("N", f.dim, gens)
            inside_rays = [r for r in f.rays if hull.contains_point(r)]
            # lattice generated by inside_rays must have gens as a Z-basis:
            # every inside ray must be an integer combination of gens, and
            # gens must be unimodular
            if not _is_unimodular_simplex_cone(gens):
                return False
            for v in inside_rays:
                from .qlinalg import integer_solve

                sol = integer_solve([[g[i] for g in gens] for i in range(f.dim)], list(v))
                if sol is None:
                    return False
    return True
