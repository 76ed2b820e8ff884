"""JSON loading and saving for the file formats the command line speaks:
fans, polyhedra, blow-up contexts, complexes, sheaves, and reports."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .cells import TorusCellComplex
from .fans import Fan
from .geometry import NncPolyhedron
from .regions import BlowupContext
from .sheaves import CellularSheaf


class InputError(ValueError):
    pass


def _load(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise InputError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path}: {e}") from e


def load_fan(path) -> Fan:
    data = _load(path)
    try:
        return Fan.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid fan file {path}: {e}") from e


def load_polyhedron(path) -> NncPolyhedron:
    data = _load(path)
    try:
        return NncPolyhedron.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid polyhedron file {path}: {e}") from e


def load_context(path) -> BlowupContext:
    data = _load(path)
    try:
        fan = Fan.from_json(data["fan"])
        sigma = frozenset(int(i) for i in data["sigma_c"])
        name = data.get("name", Path(str(path)).stem)
        return BlowupContext.make(fan, sigma, name)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid context file {path}: {e}") from e


def save_context(ctx: BlowupContext, path):
    payload = {"dim": ctx.dim, "fan": ctx.fan.to_json(), "sigma_c": sorted(ctx.sigma_c), "name": ctx.name}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_complex(path) -> TorusCellComplex:
    data = _load(path)
    try:
        return TorusCellComplex.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid complex file {path}: {e}") from e


def load_sheaf(path, cx: TorusCellComplex) -> CellularSheaf:
    data = _load(path)
    try:
        return CellularSheaf.from_json(cx, data)
    except (KeyError, TypeError, ValueError, AssertionError) as e:
        raise InputError(f"invalid sheaf file {path}: {e}") from e


def save_json(payload, path):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def parse_fraction_vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"cannot parse rational vector {text!r}: {e}") from e


def parse_int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part.strip()) for part in text.split(","))
    except ValueError as e:
        raise InputError(f"cannot parse integer vector {text!r}: {e}") from e


def parse_box(text: str, dim: int) -> tuple[tuple[int, int], ...]:
    """Parse a truncation box like '0:2,-2:2'."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != dim:
        raise InputError(f"box needs {dim} ranges, got {len(parts)}")
    out = []
    for p in parts:
        try:
            lo, hi = p.split(":")
            out.append((int(lo), int(hi)))
        except ValueError as e:
            raise InputError(f"cannot parse box range {p!r}") from e
    return tuple(out)
