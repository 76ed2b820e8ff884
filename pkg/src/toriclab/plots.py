"""Figure rendering with matplotlib: fans as ray-and-wedge diagrams and
planar regions with solid closed edges and dashed strict edges, saved to
SVG or any format the file extension selects.

Geometry is exact until the final draw call: vertices come from rational
constraint intersections, never from sampling."""

from __future__ import annotations

import itertools
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .fans import Fan
from .geometry import NncPolyhedron
from .qlinalg import det, dot, frac_vec, solve_dense

F0 = Fraction(0)


class PlotError(ValueError):
    pass


def _clip_window(dim, bound):
    cons = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        cons.append((tuple(e), Fraction(-bound), False))
        cons.append((tuple(-x for x in e), Fraction(-bound), False))
    return NncPolyhedron.from_constraints(dim, cons, prune=False)


def polygon_vertices_2d(poly: NncPolyhedron) -> list[tuple[Fraction, Fraction]]:
    """Vertices of a bounded planar polyhedron's closure, in cyclic order."""
    if poly.dim != 2:
        raise PlotError("polygon extraction needs a planar polyhedron")
    closure = poly.closure()
    cons = closure.constraints
    pts = set()
    for c1, c2 in itertools.combinations(cons, 2):
        rows = [frac_vec(c1.normal), frac_vec(c2.normal)]
        if det(rows) == 0:
            continue
        sol = solve_dense(rows, [c1.offset, c2.offset])
        if sol is not None and closure.contains(sol):
            pts.add(sol)
    if not pts:
        return []
    cx = sum((p[0] for p in pts), F0) / len(pts)
    cy = sum((p[1] for p in pts), F0) / len(pts)

    def angle_class(p):
        import math

        return math.atan2(float(p[1] - cy), float(p[0] - cx))

    return sorted(pts, key=angle_class)


def _edge_style(poly: NncPolyhedron, a, b) -> str:
    """Solid for closed supporting constraints, dashed for strict ones."""
    mid = tuple((x + y) / 2 for x, y in zip(a, b))
    for c in poly.constraints:
        if dot(c.normal, mid) == c.offset:
            return "dashed" if c.strict else "solid"
    return "solid"


def plot_regions_2d(regions, path, labels=None, window=3):
    """Render planar regions; strict faces dashed, closed faces solid,
    removed points as open circles."""
    fig, ax = plt.subplots(figsize=(6, 6))
    colors = plt.cm.tab10.colors
    labels = labels or [f"region {i}" for i in range(len(regions))]
    for idx, region in enumerate(regions):
        pieces, holes = _region_data(region)
        color = colors[idx % len(colors)]
        for piece in pieces:
            clipped = piece.intersect(_clip_window(2, window))
            if clipped.is_empty():
                continue
            verts = polygon_vertices_2d(clipped)
            if len(verts) < 2:
                continue
            xs = [float(v[0]) for v in verts]
            ys = [float(v[1]) for v in verts]
            ax.fill(xs, ys, alpha=0.2, color=color, label=labels[idx])
            labels[idx] = None  # only label once
            for i in range(len(verts)):
                a, b = verts[i], verts[(i + 1) % len(verts)]
                style = _edge_style(piece, a, b)
                ax.plot(
                    [float(a[0]), float(b[0])],
                    [float(a[1]), float(b[1])],
                    linestyle="-" if style == "solid" else "--",
                    color=color,
                    linewidth=1.6,
                )
        for h in holes:
            ax.plot([float(h[0])], [float(h[1])], marker="o", markerfacecolor="white", markeredgecolor=color)
    ax.set_aspect("equal")
    ax.axhline(0, color="gray", linewidth=0.4)
    ax.axvline(0, color="gray", linewidth=0.4)
    handles, labs = ax.get_legend_handles_labels()
    if handles:
        ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path)
    plt.close(fig)


def _region_data(region):
    from .regions import RegionUnion

    if isinstance(region, NncPolyhedron):
        return [region], []
    if isinstance(region, RegionUnion):
        return list(region.pieces), list(region.holes)
    raise PlotError(f"cannot plot object of type {type(region).__name__}")


def plot_fan_2d(fan: Fan, path):
    if fan.dim != 2:
        raise PlotError("fan plotting implemented for surfaces")
    fig, ax = plt.subplots(figsize=(6, 6))
    colors = plt.cm.tab10.colors
    scale = 1.0
    for k, cone in enumerate(sorted(fan.max_cones, key=sorted)):
        rays = [fan.rays[i] for i in sorted(cone)]
        import math

        def unit(v):
            n = math.hypot(*[float(x) for x in v])
            return (float(v[0]) / n, float(v[1]) / n)

        if len(rays) == 2:
            u1, u2 = unit(rays[0]), unit(rays[1])
            a1 = math.atan2(u1[1], u1[0])
            a2 = math.atan2(u2[1], u2[0])
            while a2 <= a1:
                a2 += 2 * math.pi
            if a2 - a1 < math.pi:  # interior wedge
                ts = [a1 + (a2 - a1) * t / 24 for t in range(25)]
                xs = [0.0] + [1.2 * math.cos(t) for t in ts] + [0.0]
                ys = [0.0] + [1.2 * math.sin(t) for t in ts] + [0.0]
                ax.fill(xs, ys, alpha=0.15, color=colors[k % len(colors)])
    for i, r in enumerate(fan.rays):
        import math

        n = math.hypot(float(r[0]), float(r[1]))
        ax.annotate(
            "",
            xy=(1.5 * float(r[0]) / n, 1.5 * float(r[1]) / n),
            xytext=(0, 0),
            arrowprops={"arrowstyle": "->", "linewidth": 1.4},
        )
        ax.annotate(f"{tuple(r)}", xy=(1.62 * float(r[0]) / n, 1.62 * float(r[1]) / n), fontsize=8, ha="center")
    ax.set_xlim(-2, 2)
    ax.set_ylim(-2, 2)
    ax.set_aspect("equal")
    fig.savefig(path)
    plt.close(fig)


def slice_polyhedron(poly: NncPolyhedron, coord: int, value) -> NncPolyhedron:
    """The planar slice of a three-dimensional polyhedron at a fixed
    coordinate, in the remaining coordinates."""
    if poly.dim != 3:
        raise PlotError("slicing expects a three-dimensional polyhedron")
    value = Fraction(value)
    cons = []
    for c in poly.constraints:
        normal = tuple(x for i, x in enumerate(c.normal) if i != coord)
        offset = c.offset - c.normal[coord] * value
        if all(x == 0 for x in normal):
            if offset > 0 or (offset == 0 and c.strict):
                return NncPolyhedron.empty(2)
            continue
        cons.append((normal, offset, c.strict))
    return NncPolyhedron.from_constraints(2, cons)
