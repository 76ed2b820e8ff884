"""Command line entry point: fan, skeleton, theta, regions, sheaf, coh,
verify, plot, and corpus verbs with JSON and figure output.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on invalid input.
"""

from __future__ import annotations

import csv
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import verify as verify_mod
from .coherent import CoherentError, ext_orlov, line_bundle_cohomology
from .fans import (
    Fan,
    FanError,
    blow_down,
    blow_down_candidates,
    classify_minimal,
    mmp_reduce,
    star_subdivide_at_max_cone,
    validate_fan,
)
from .geometry import GeometryError
from .io_json import (
    InputError,
    load_complex,
    load_context,
    load_fan,
    load_sheaf,
    parse_box,
    parse_fraction_vector,
    parse_int_vector,
    save_json,
)
from .regions import (
    BlowupContext,
    RegionError,
    hat_Zk,
    image_Uk,
    region_F,
    region_shell,
    region_Z,
    region_Zk,
    tilde_Uk,
    tilde_Zk,
)
from .sheaves import SheafError, cohomology, ext_groups, ss_contained_in_skeleton
from .skeleton import skeleton_member, skeleton_refines
from .theta import hom_basis

USER_ERRORS = (InputError, FanError, GeometryError, RegionError, SheafError, CoherentError, ValueError)


@dataclass
class RunConfig:
    """Validated run options shared by the verbs."""

    json_out: str | None = None
    svg_out: str | None = None
    figures_dir: str | None = None
    jobs: int = 1
    seed: int | None = None

    def __post_init__(self):
        if self.jobs < 1:
            raise InputError("--jobs must be at least 1")


def _finish(ok: bool, payload, config: RunConfig):
    if config.json_out:
        save_json(payload, config.json_out)
    else:
        click.echo(json.dumps(payload, indent=1, sort_keys=True, default=str))
    sys.exit(0 if ok else 1)


def _config(ctx_obj, **kw) -> RunConfig:
    base = dict(ctx_obj or {})
    base.update({k: v for k, v in kw.items() if v is not None})
    return RunConfig(**base)


@click.group()
@click.option("--json-out", type=click.Path(), default=None, help="write the JSON report here")
@click.option("--svg-out", type=click.Path(), default=None, help="write the figure here")
@click.option("--jobs", type=int, default=1, show_default=True, help="parallel workers for suites")
@click.option("--seed", type=int, default=None, help="corpus sampling order only; all math is deterministic")
@click.pass_context
def main(ctx, json_out, svg_out, jobs, seed):
    """Exact toric fan, skeleton, region, and sheaf computations."""
    ctx.obj = {"json_out": json_out, "svg_out": svg_out, "jobs": jobs, "seed": seed}


def _wrap(fn):
    import functools

    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except USER_ERRORS as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)

    return inner


# ---------------------------------------------------------------------------
# fan


@main.group()
def fan():
    """Validate, subdivide, contract, and classify fans."""


@fan.command("validate")
@click.argument("fan_file", type=click.Path())
@click.pass_obj
@_wrap
def fan_validate(obj, fan_file):
    f = load_fan(fan_file)
    report = validate_fan(f)
    _finish(report["smooth"] and report["complete"] and not report["violations"], report, _config(obj))


@fan.command("blowup")
@click.argument("fan_file", type=click.Path())
@click.option("--cone", required=True, help="comma separated ray indices of the maximal cone")
@click.pass_obj
@_wrap
def fan_blowup(obj, fan_file, cone):
    f = load_fan(fan_file)
    g = star_subdivide_at_max_cone(f, frozenset(parse_int_vector(cone)))
    _finish(True, g.to_json(), _config(obj))


@fan.command("blowdown")
@click.argument("fan_file", type=click.Path())
@click.option("--ray", default=None, help="ray to contract, comma separated; default smallest candidate")
@click.pass_obj
@_wrap
def fan_blowdown(obj, fan_file, ray):
    f = load_fan(fan_file)
    cands = blow_down_candidates(f)
    if not cands:
        click.echo("error: no contractible rays", err=True)
        sys.exit(1)
    target = tuple(parse_int_vector(ray)) if ray else cands[0]
    _finish(True, blow_down(f, target).to_json(), _config(obj))


@fan.command("mmp")
@click.argument("fan_file", type=click.Path())
@click.pass_obj
@_wrap
def fan_mmp(obj, fan_file):
    f = load_fan(fan_file)
    trace, cls = mmp_reduce(f)
    payload = {
        "trace": [{"ray": list(t["ray"]), "merged_cone_rays": [list(r) for r in t["merged_cone_rays"]]} for t in trace],
        "minimal_class": str(cls),
    }
    _finish(True, payload, _config(obj))


@fan.command("classify")
@click.argument("fan_file", type=click.Path())
@click.pass_obj
@_wrap
def fan_classify(obj, fan_file):
    f = load_fan(fan_file)
    _finish(True, {"minimal_class": str(classify_minimal(f))}, _config(obj))


# ---------------------------------------------------------------------------
# skeleton


@main.group()
def skeleton():
    """Membership and refinement of the conic Lagrangian skeleton."""


@skeleton.command("member")
@click.argument("fan_file", type=click.Path())
@click.option("--x", "xtext", required=True, help="base point, comma separated rationals")
@click.option("--xi", "xitext", required=True, help="covector, comma separated rationals")
@click.pass_obj
@_wrap
def skeleton_member_cmd(obj, fan_file, xtext, xitext):
    f = load_fan(fan_file)
    res = skeleton_member(f, parse_fraction_vector(xtext), parse_fraction_vector(xitext))
    payload = {"member": res["member"], "witness": list(res["witness"]) if res["witness"] is not None else None}
    _finish(res["member"], payload, _config(obj))


@skeleton.command("refines")
@click.argument("coarse_file", type=click.Path())
@click.argument("fine_file", type=click.Path())
@click.pass_obj
@_wrap
def skeleton_refines_cmd(obj, coarse_file, fine_file):
    coarse = load_fan(coarse_file)
    fine = load_fan(fine_file)
    ok = skeleton_refines(coarse, fine)
    _finish(ok, {"refines": ok}, _config(obj))


# ---------------------------------------------------------------------------
# theta


@main.group()
def theta():
    """Hom spaces of the cone category, truncated to a box."""


@theta.command("hom")
@click.argument("fan_file", type=click.Path())
@click.option("--src", required=True, help="ray indices of the source cone, comma separated (empty for the zero cone)")
@click.option("--tgt", required=True, help="ray indices of the target cone")
@click.option("--box", required=True, help="truncation box, e.g. 0:2,-2:2")
@click.pass_obj
@_wrap
def theta_hom_cmd(obj, fan_file, src, tgt, box):
    f = load_fan(fan_file)

    def parse_cone(text):
        text = text.strip()
        return frozenset() if text in ("", "-") else frozenset(parse_int_vector(text))

    pts = hom_basis(f, parse_cone(src), parse_cone(tgt), parse_box(box, f.dim))
    _finish(True, {"points": [list(p) for p in pts], "count": len(pts)}, _config(obj))


# ---------------------------------------------------------------------------
# regions


REGION_BUILDERS = {
    "Z": lambda ctx, k: region_Z(ctx),
    "Zk": region_Zk,
    "shell": region_shell,
    "F": lambda ctx, k: region_F(ctx),
    "hatZk": hat_Zk,
    "tildeZk": tilde_Zk,
    "tildeUk": tilde_Uk,
    "Uk": lambda ctx, k: image_Uk(ctx, k)[0],
}


@main.group()
def regions():
    """Blow-up regions in basis-adapted coordinates."""


@regions.command("emit")
@click.argument("fan_file", type=click.Path())
@click.option("--cone", required=True, help="ray indices of the blown-up cone")
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--which", default="Z,Zk,F", show_default=True, help=f"regions among {','.join(REGION_BUILDERS)}")
@click.option("--format", "fmt", type=click.Choice(["json", "svg"]), default="json", show_default=True)
@click.option("--slice", "slice_spec", default=None, help="for n=3 svg: coordinate=value, e.g. 2=-1/2")
@click.pass_obj
@_wrap
def regions_emit(obj, fan_file, cone, k, which, fmt, slice_spec):
    f = load_fan(fan_file)
    ctx = BlowupContext.make(f, frozenset(parse_int_vector(cone)), Path(fan_file).stem)
    names = [w.strip() for w in which.split(",") if w.strip()]
    built = {}
    for name in names:
        if name not in REGION_BUILDERS:
            raise InputError(f"unknown region {name!r}")
        built[name] = REGION_BUILDERS[name](ctx, k)
    config = _config(obj)
    if fmt == "json":
        payload = {name: _region_json(region) for name, region in built.items()}
        _finish(True, payload, config)
    else:
        out = config.svg_out or "regions.svg"
        regions_list = list(built.values())
        if ctx.dim == 3:
            from .plots import slice_polyhedron

            if not slice_spec:
                raise InputError("three dimensional regions need --slice coordinate=value")
            coord, value = slice_spec.split("=")
            sliced = []
            for region in regions_list:
                for piece in _region_pieces_for_plot(region):
                    sliced.append(slice_polyhedron(piece, int(coord), Fraction(value)))
            from .plots import plot_regions_2d

            plot_regions_2d(sliced, out, labels=list(built.keys()) + [None] * 10)
        else:
            from .plots import plot_regions_2d

            plot_regions_2d(regions_list, out, labels=list(built.keys()))
        click.echo(f"wrote {out}")
        sys.exit(0)


def _region_pieces_for_plot(region):
    from .geometry import NncPolyhedron

    if isinstance(region, NncPolyhedron):
        return [region]
    return list(region.pieces)


def _region_json(region):
    from .geometry import NncPolyhedron

    if isinstance(region, NncPolyhedron):
        return region.to_json()
    return region.to_json()


# ---------------------------------------------------------------------------
# sheaf


@main.group()
def sheaf():
    """Cellular sheaf computations from JSON dumps."""


@sheaf.command("cohomology")
@click.argument("complex_file", type=click.Path())
@click.argument("sheaf_file", type=click.Path())
@click.pass_obj
@_wrap
def sheaf_cohomology(obj, complex_file, sheaf_file):
    cx = load_complex(complex_file)
    f = load_sheaf(sheaf_file, cx)
    _finish(True, {"cohomology": list(cohomology(f))}, _config(obj))


@sheaf.command("ext")
@click.argument("complex_file", type=click.Path())
@click.argument("sheaf_file", type=click.Path())
@click.argument("second_sheaf_file", type=click.Path())
@click.pass_obj
@_wrap
def sheaf_ext(obj, complex_file, sheaf_file, second_sheaf_file):
    cx = load_complex(complex_file)
    f = load_sheaf(sheaf_file, cx)
    g = load_sheaf(second_sheaf_file, cx)
    _finish(True, {"ext": list(ext_groups(f, g))}, _config(obj))


@sheaf.command("ss")
@click.argument("complex_file", type=click.Path())
@click.argument("sheaf_file", type=click.Path())
@click.option("--fan", "fan_file", required=True, type=click.Path())
@click.option("--side", type=click.Choice(["plus", "minus"]), default="plus", show_default=True)
@click.pass_obj
@_wrap
def sheaf_ss(obj, complex_file, sheaf_file, fan_file, side):
    cx = load_complex(complex_file)
    f = load_sheaf(sheaf_file, cx)
    fan_obj = load_fan(fan_file)
    res = ss_contained_in_skeleton(f, fan_obj, side=side)
    _finish(res["ok"], res, _config(obj))


# ---------------------------------------------------------------------------
# coh


@main.group()
def coh():
    """Coherent-side oracles."""


@coh.command("h")
@click.argument("fan_file", type=click.Path())
@click.option("--div", required=True, help="divisor coefficients, comma separated, one per ray")
@click.pass_obj
@_wrap
def coh_h(obj, fan_file, div):
    f = load_fan(fan_file)
    h = line_bundle_cohomology(f, parse_int_vector(div))
    _finish(True, {"h": list(h)}, _config(obj))


@coh.command("ext-orlov")
@click.argument("ctx_file", type=click.Path())
@click.option("--k", type=int, required=True)
@click.option("--l", type=int, required=True)
@click.pass_obj
@_wrap
def coh_ext_orlov(obj, ctx_file, k, l):
    ctx = load_context(ctx_file)
    _finish(True, {"ext": list(ext_orlov(ctx.dim, k, l))}, _config(obj))


# ---------------------------------------------------------------------------
# verify


@main.group()
def verify():
    """Cross-checks between the constructible and coherent pipelines."""


def _emit_reports(reports, config: RunConfig, figure_contexts=()):
    payload = verify_mod.run_report(reports)
    if config.figures_dir:
        _write_figures(figure_contexts, reports, config.figures_dir)
    _finish(payload["ok"], payload, config)


def _write_figures(contexts, reports, outdir):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    from .plots import plot_fan_2d, plot_regions_2d

    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["check_id", "status", "computed", "oracle"])
        for r in sorted(reports, key=lambda r: r.check_id):
            writer.writerow([r.check_id, r.status, json.dumps(r.to_json()["computed"]), json.dumps(r.to_json()["oracle"])])
    for ctx in contexts:
        if ctx.dim == 2:
            plot_fan_2d(ctx.fan_hat, out / f"{ctx.name}-fan.svg")
            plot_regions_2d(
                [region_Z(ctx), region_shell(ctx, 1), region_F(ctx)],
                out / f"{ctx.name}-regions.svg",
                labels=["Z", "shell", "F"],
            )


@verify.command("sod")
@click.argument("ctx_file", type=click.Path())
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--l", type=int, default=None, help="second twist; defaults to k")
@click.option("--figures-dir", type=click.Path(), default=None)
@click.pass_obj
@_wrap
def verify_sod(obj, ctx_file, k, l, figures_dir):
    ctx = load_context(ctx_file)
    config = _config(obj, figures_dir=figures_dir)
    reports = [
        verify_mod.check_exceptionality(ctx, k),
        verify_mod.check_unit_orthogonality(ctx, k),
    ]
    if l is not None and l != k:
        reports.append(verify_mod.check_semiorthogonality(ctx, k, l))
    _emit_reports(reports, config, [ctx])


@verify.command("cech")
@click.argument("ctx_file", type=click.Path())
@click.option("--figures-dir", type=click.Path(), default=None)
@click.pass_obj
@_wrap
def verify_cech(obj, ctx_file, figures_dir):
    ctx = load_context(ctx_file)
    config = _config(obj, figures_dir=figures_dir)
    _emit_reports([verify_mod.check_cech_quasiiso(ctx)], config, [ctx])


@verify.command("step1")
@click.argument("ctx_file", type=click.Path())
@click.option("--k", type=int, default=1, show_default=True)
@click.option(
    "--sheaf",
    "sheaf_files",
    type=click.Path(),
    multiple=True,
    help="extra corpus sheaves (JSON on the verification complex); gated by the microsupport checker",
)
@click.option("--figures-dir", type=click.Path(), default=None)
@click.pass_obj
@_wrap
def verify_step1(obj, ctx_file, k, sheaf_files, figures_dir):
    ctx = load_context(ctx_file)
    config = _config(obj, figures_dir=figures_dir)
    corpus_sheaves = verify_mod.default_step1_corpus(ctx)
    cx = verify_mod.verification_complex(ctx.dim)
    for path in sheaf_files:
        corpus_sheaves.append((Path(path).stem, load_sheaf(path, cx)))
    _emit_reports([verify_mod.check_step1_restriction(ctx, k, corpus_sheaves)], config, [ctx])


@verify.command("mmp-suite")
@click.option("--max-rays", type=int, default=6, show_default=True)
@click.option("--hirzebruch-cap", type=int, default=corpus_mod.DEFAULT_HIRZEBRUCH_CAP, show_default=True)
@click.option("--deep/--shallow", default=True, help="run the per-step blow-up checks")
@click.option("--figures-dir", type=click.Path(), default=None)
@click.pass_obj
@_wrap
def verify_mmp_suite(obj, max_rays, hirzebruch_cap, deep, figures_dir):
    config = _config(obj, figures_dir=figures_dir)
    fans = corpus_mod.enumerate_surface_fans(max_rays, hirzebruch_cap)
    if config.seed is not None:
        rng = random.Random(config.seed)
        rng.shuffle(fans)

    def job(pair):
        idx, f = pair
        return verify_mod.check_blowup_bookkeeping(f, name=f"corpus{idx:02d}", deep=deep)

    items = list(enumerate(fans))
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(pool.map(job, items))
    else:
        reports = [job(item) for item in items]
    _emit_reports(reports, config)


# ---------------------------------------------------------------------------
# plot


@main.group()
def plot():
    """Figure output for fans and regions."""


@plot.command("fan")
@click.argument("fan_file", type=click.Path())
@click.pass_obj
@_wrap
def plot_fan(obj, fan_file):
    from .plots import plot_fan_2d

    config = _config(obj)
    out = config.svg_out or "fan.svg"
    plot_fan_2d(load_fan(fan_file), out)
    click.echo(f"wrote {out}")


@plot.command("regions")
@click.argument("fan_file", type=click.Path())
@click.option("--cone", required=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.pass_obj
@_wrap
def plot_regions(obj, fan_file, cone, k):
    from .plots import plot_regions_2d

    config = _config(obj)
    out = config.svg_out or "regions.svg"
    f = load_fan(fan_file)
    ctx = BlowupContext.make(f, frozenset(parse_int_vector(cone)))
    plot_regions_2d(
        [region_Z(ctx), region_Zk(ctx, k), region_F(ctx)],
        out,
        labels=["Z", f"Z_{k}", "F"],
    )
    click.echo(f"wrote {out}")


# ---------------------------------------------------------------------------
# corpus


@main.group()
def corpus():
    """Surface fan corpora."""


@corpus.command("list")
@click.option("--max-rays", type=int, default=6, show_default=True)
@click.option("--hirzebruch-cap", type=int, default=corpus_mod.DEFAULT_HIRZEBRUCH_CAP, show_default=True)
@click.pass_obj
@_wrap
def corpus_list(obj, max_rays, hirzebruch_cap):
    config = _config(obj)
    fans = corpus_mod.enumerate_surface_fans(max_rays, hirzebruch_cap)
    if config.seed is not None:
        rng = random.Random(config.seed)
        rng.shuffle(fans)
    payload = {"count": len(fans), "fans": [f.to_json() for f in fans]}
    _finish(True, payload, config)


if __name__ == "__main__":
    main()
