"""The category whose objects are the cones of a fan and whose hom spaces
are monoid algebras on dual-cone lattice points, composed by character
addition.

Homs are infinite rank; every operation takes an explicit truncation box
and is exact within it.  Coefficients are integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fans import Fan


class ThetaError(ValueError):
    pass


Box = tuple[tuple[int, int], ...]  # per-coordinate inclusive (lo, hi)


@dataclass(frozen=True)
class ThetaHom:
    """A finitely supported integer combination of characters chi^m giving
    a morphism source -> target; nonzero only when source contains target."""

    fan: Fan
    source: frozenset[int]
    target: frozenset[int]
    support: tuple[tuple[tuple[int, ...], int], ...] = field(default=())

    def coefficients(self) -> dict[tuple[int, ...], int]:
        return dict(self.support)

    def is_zero(self) -> bool:
        return not self.support


def _cone_contains(fan: Fan, big: frozenset[int], small: frozenset[int]) -> bool:
    return fan.cone_geometry(big).contains_cone(fan.cone_geometry(small))


def _dual_contains(fan: Fan, tau: frozenset[int], m) -> bool:
    """m in dual(tau), i.e. <m, v> >= 0 for every ray v of tau."""
    return all(sum(a * b for a, b in zip(m, fan.rays[i])) >= 0 for i in tau)


def hom_basis(fan: Fan, source, target, box: Box) -> list[tuple[int, ...]]:
    """Lattice points of dual(target) inside the box when source contains
    target, else empty; a truncated basis of the degree-zero hom space."""
    src = frozenset(source)
    tgt = frozenset(target)
    cones = set(fan.all_cones())
    if src not in cones or tgt not in cones:
        raise ThetaError("cones not in the fan")
    if len(box) != fan.dim:
        raise ThetaError("box dimension mismatch")
    if not _cone_contains(fan, src, tgt):
        return []
    ranges = [range(lo, hi + 1) for lo, hi in box]
    return [m for m in itertools.product(*ranges) if _dual_contains(fan, tgt, m)]


def theta_hom(fan: Fan, source, target, coeffs: dict) -> ThetaHom:
    src = frozenset(source)
    tgt = frozenset(target)
    cones = set(fan.all_cones())
    if src not in cones or tgt not in cones:
        raise ThetaError("cones not in the fan")
    cleaned = {tuple(int(x) for x in m): int(c) for m, c in coeffs.items() if int(c) != 0}
    if cleaned and not _cone_contains(fan, src, tgt):
        raise ThetaError("hom space is zero unless the source contains the target")
    for m in cleaned:
        if not _dual_contains(fan, tgt, m):
            raise ThetaError(f"support point {m} outside the dual cone of the target")
    return ThetaHom(fan, src, tgt, tuple(sorted(cleaned.items())))


def identity_hom(fan: Fan, cone) -> ThetaHom:
    zero = tuple(0 for _ in range(fan.dim))
    return theta_hom(fan, cone, cone, {zero: 1})


def compose(g: ThetaHom, f: ThetaHom) -> ThetaHom:
    """g after f: convolution of supports; requires a composable chain
    source(f) >= target(f) = source(g) >= target(g)."""
    if g.fan is not f.fan and g.fan != f.fan:
        raise ThetaError("homs live over different fans")
    if f.target != g.source:
        raise ThetaError("non-composable homs: inner cones differ")
    fan = f.fan
    if not (_cone_contains(fan, f.source, f.target) and _cone_contains(fan, g.source, g.target)):
        raise ThetaError("non-composable homs: chain condition fails")
    out: dict[tuple[int, ...], int] = {}
    for m1, c1 in f.support:
        for m2, c2 in g.support:
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return theta_hom(fan, f.source, g.target, out)
