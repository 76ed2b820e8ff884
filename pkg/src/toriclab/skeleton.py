"""The conic Lagrangian skeleton of a fan, its torus image, and the R_tau
strata attached to the faces of a dual cone.

A point of the cotangent bundle of the torus is given by a rational base
point x (mod the lattice M) and a rational covector xi in N_R.  Membership
in the skeleton union_{sigma} (sigma-perp + M) x (-sigma) is decided
symbolically: cone membership plus an integral coset test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fans import Fan, FanError, refines
from .geometry import Cone, GeometryError, NncPolyhedron
from .qlinalg import frac_vec, integer_solve


@dataclass(frozen=True)
class SkeletonStratum:
    """One stratum (sigma-perp + M) x (-sigma), tagged by the cone."""

    cone_rays: tuple[int, ...]  # ray indices into the fan
    perp_dim: int
    fiber: Cone  # -sigma

    def __str__(self):
        return f"stratum(rays={list(self.cone_rays)}, perp_dim={self.perp_dim})"


def in_coset_perp_plus_lattice(fan: Fan, index_set, x) -> bool:
    """Is x in sigma-perp + M?  Equivalent to the integer solvability of
    V m = V x where V stacks the ray generators of sigma."""
    xs = frac_vec(x)
    rays = [fan.rays[i] for i in sorted(index_set)]
    if not rays:
        return True
    rows = [list(r) for r in rays]
    rhs = [sum(Fraction(r[i]) * xs[i] for i in range(fan.dim)) for r in rays]
    if any(v.denominator != 1 for v in rhs):
        return False
    return integer_solve(rows, rhs) is not None


def skeleton_member(fan: Fan, x, xi) -> dict:
    """Membership of (x mod M, xi) in the skeleton of the fan.

    Returns {"member": bool, "witness": ray index tuple or None}; the
    witness is the minimal cone (by dimension, then ray indices) with
    -xi in sigma and x in sigma-perp + M.
    """
    xiv = frac_vec(xi)
    neg_xi = tuple(-v for v in xiv)
    for index_set in fan.all_cones():
        geom = fan.cone_geometry(index_set)
        if not geom.contains_point(neg_xi):
            continue
        if in_coset_perp_plus_lattice(fan, index_set, x):
            return {"member": True, "witness": tuple(sorted(index_set))}
    return {"member": False, "witness": None}


def skeleton_refines(coarse: Fan, fine: Fan) -> bool:
    """Containment of skeleta implied by fan refinement, checked cone by
    cone: the fine cones inside each coarse cone cover it and each has the
    larger perp."""
    if not refines(coarse, fine):
        raise FanError("second fan does not refine the first")
    from .geometry import difference_pieces
    from .qlinalg import rank_dense

    for c in coarse.all_cones():
        cg = coarse.cone_geometry(c)
        inside = [t for t in fine.all_cones() if cg.contains_cone(fine.cone_geometry(t))]
        pieces = [fine.cone_geometry(t).as_polyhedron() for t in inside]
        if difference_pieces([cg.as_polyhedron()], pieces):
            return False
        # tau inside sigma gives span(tau) <= span(sigma), hence the
        # perp-coset of sigma sits inside that of tau; check the span ranks
        span_c = rank_dense([frac_vec(coarse.rays[i]) for i in c], coarse.dim) if c else 0
        for t in inside:
            span_t = rank_dense([frac_vec(fine.rays[i]) for i in t], fine.dim) if t else 0
            if span_t > span_c:
                return False
    return True


def skeleton_strata(fan: Fan) -> list[SkeletonStratum]:
    from .qlinalg import rank_dense

    out = []
    for c in fan.all_cones():
        geom = fan.cone_geometry(c)
        span = rank_dense([frac_vec(fan.rays[i]) for i in c], fan.dim) if c else 0
        out.append(
            SkeletonStratum(
                cone_rays=tuple(sorted(c)),
                perp_dim=fan.dim - span,
                fiber=geom.negated(),
            )
        )
    return out


# ---------------------------------------------------------------------------
# R_tau strata of a full-dimensional cone


@dataclass(frozen=True)
class RTauStratum:
    """R_tau = intersection over proper cofaces sigma of (tau-perp minus
    sigma-perp), attached to a nonzero face tau of a full-dimensional cone."""

    tau: Cone
    base: NncPolyhedron  # the subspace tau-perp as a polyhedron
    exclusions: tuple[NncPolyhedron, ...]  # the sigma-perp subspaces

    def contains(self, point) -> bool:
        if not self.base.contains(point):
            return False
        return all(not ex.contains(point) for ex in self.exclusions)


def _perp_subspace(cone: Cone, dim: int) -> NncPolyhedron:
    cons = []
    for g in cone.generators:
        cons.append((g, Fraction(0), False))
        cons.append((tuple(-x for x in g), Fraction(0), False))
    return NncPolyhedron.from_constraints(dim, cons, prune=False)


def r_tau_strata(gamma_dual: Cone) -> list[RTauStratum]:
    """One stratum per nonzero face tau of gamma_dual; gamma_dual must be
    full-dimensional."""
    if gamma_dual.cone_dim() != gamma_dual.dim:
        raise GeometryError("cone is not full-dimensional")
    faces = gamma_dual.faces()
    nonzero = [f for f in faces if f.cone_dim() > 0]
    out = []
    for tau in nonzero:
        cofaces = [s for s in nonzero if s.contains_cone(tau) and s != tau]
        base = _perp_subspace(tau, gamma_dual.dim)
        exclusions = tuple(_perp_subspace(s, gamma_dual.dim) for s in cofaces)
        out.append(RTauStratum(tau=tau, base=base, exclusions=exclusions))
    return out
