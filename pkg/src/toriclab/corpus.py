"""Enumeration of smooth complete surface fans up to lattice automorphism.

The corpus is generated by iterated star subdivision from the minimal
models (two or four rays), which reaches every smooth complete surface fan
because each one contracts down to a minimal model.  The unbounded family
of four-ray fans is cut off at a configurable index cap.
"""

from __future__ import annotations

from .fans import (
    Fan,
    FanError,
    canonical_surface_form,
    fan_hirzebruch,
    fan_p1p1,
    fan_p2,
    is_smooth_complete,
    star_subdivide_at_max_cone,
)

DEFAULT_HIRZEBRUCH_CAP = 4


def minimal_surface_fans(hirzebruch_cap: int = DEFAULT_HIRZEBRUCH_CAP) -> list[Fan]:
    fans = [fan_p2(), fan_p1p1()]
    for a in range(1, hirzebruch_cap + 1):
        fans.append(fan_hirzebruch(a))
    return fans


def enumerate_surface_fans(max_rays: int, hirzebruch_cap: int = DEFAULT_HIRZEBRUCH_CAP) -> list[Fan]:
    """All smooth complete surface fans with at most max_rays rays reachable
    from the minimal models with the given index cap, one representative
    per lattice-automorphism class, deterministic order."""
    if max_rays > 8:
        raise FanError("surface corpus capped at eight rays")
    seen: dict[tuple, Fan] = {}
    frontier: list[Fan] = []
    for f in minimal_surface_fans(hirzebruch_cap):
        if len(f.rays) <= max_rays:
            key = canonical_surface_form(f)
            if key not in seen:
                seen[key] = f
                frontier.append(f)
    while frontier:
        nxt = []
        for f in frontier:
            if len(f.rays) >= max_rays:
                continue
            for cone in f.max_cones:
                g = star_subdivide_at_max_cone(f, cone)
                key = canonical_surface_form(g)
                if key not in seen:
                    seen[key] = g
                    nxt.append(g)
        frontier = nxt
    out = sorted(seen.values(), key=lambda f: (len(f.rays), canonical_surface_form(f)))
    return out


def brute_force_surface_fans(max_rays: int, coord_bound: int) -> list[Fan]:
    """Independent generator used as an oracle: enumerate cyclic sequences
    of primitive rays with bounded coordinates, consecutive determinants
    one, and total turning one full revolution."""
    from .qlinalg import primitive_int_vector

    rays = []
    for x in range(-coord_bound, coord_bound + 1):
        for y in range(-coord_bound, coord_bound + 1):
            if (x, y) != (0, 0) and primitive_int_vector((x, y)) == (x, y):
                rays.append((x, y))

    def angle_key(v):
        from math import atan2

        return atan2(v[1], v[0])

    rays.sort(key=angle_key)
    found: dict[tuple, Fan] = {}

    def extend(sequence):
        if len(sequence) > max_rays:
            return
        first, last = sequence[0], sequence[-1]
        if len(sequence) >= 3:
            d = last[0] * first[1] - last[1] * first[0]
            if d == 1:
                cones = [(i, i + 1) for i in range(len(sequence) - 1)] + [(len(sequence) - 1, 0)]
                try:
                    fan = Fan.make(2, sequence, cones)
                except FanError:
                    fan = None
                if fan is not None and is_smooth_complete(fan):
                    key = canonical_surface_form(fan)
                    found.setdefault(key, fan)
        for v in rays:
            if v in sequence:
                continue
            d = last[0] * v[1] - last[1] * v[0]
            if d != 1:
                continue
            # keep the sequence strictly counterclockwise relative to start
            extend(sequence + [v])

    # fix the first ray to (1, 0) up to automorphism
    extend([(1, 0)])
    return sorted(found.values(), key=lambda f: (len(f.rays), canonical_surface_form(f)))
