import json

import pytest
from click.testing import CliRunner

from toriclab.cli import main
from toriclab.fans import fan_p2, star_subdivide_at_max_cone
from toriclab.io_json import save_context, save_json
from toriclab.regions import BlowupContext


@pytest.fixture()
def workdir(tmp_path):
    save_json(fan_p2().to_json(), tmp_path / "p2.json")
    blp2 = star_subdivide_at_max_cone(fan_p2(), frozenset({0, 1}))
    save_json(blp2.to_json(), tmp_path / "blp2.json")
    save_context(BlowupContext.make(fan_p2(), frozenset({0, 1}), "blp2"), tmp_path / "blp2.ctx.json")
    return tmp_path


def run(args, expect=0):
    runner = CliRunner()
    result = runner.invoke(main, [str(a) for a in args])
    assert result.exit_code == expect, result.output
    return result


def test_fan_validate(workdir):
    r = run(["fan", "validate", workdir / "p2.json"])
    payload = json.loads(r.output)
    assert payload["smooth"] and payload["complete"]


def test_fan_mmp_trace(workdir):
    r = run(["fan", "mmp", workdir / "blp2.json"])
    payload = json.loads(r.output)
    assert len(payload["trace"]) == 1
    assert payload["trace"][0]["ray"] == [1, 1]


def test_fan_blowup_roundtrip(workdir, tmp_path):
    out = tmp_path / "up.json"
    run(["--json-out", out, "fan", "blowup", workdir / "p2.json", "--cone", "0,1"])
    payload = json.loads(out.read_text())
    assert [1, 1] in payload["rays"]
    # emitted JSON re-parses to an equal fan
    from toriclab.fans import Fan

    again = Fan.from_json(payload)
    assert again.to_json() == payload


def test_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    run(["fan", "validate", bad], expect=2)


def test_invalid_cone_exit_2(workdir):
    run(["fan", "blowup", workdir / "p2.json", "--cone", "0,5"], expect=2)


def test_skeleton_member(workdir):
    r = run(["skeleton", "member", workdir / "p2.json", "--x", "1/2,0", "--xi", "0,-1"])
    assert json.loads(r.output)["member"]
    run(["skeleton", "member", workdir / "p2.json", "--x", "1/2,0", "--xi", "-1,-1"], expect=1)


def test_skeleton_refines(workdir):
    run(["skeleton", "refines", workdir / "p2.json", workdir / "blp2.json"])
    run(["skeleton", "refines", workdir / "blp2.json", workdir / "p2.json"], expect=2)


def test_theta_hom(workdir):
    r = run(["theta", "hom", workdir / "p2.json", "--src", "0,1", "--tgt", "0", "--box", "0:2,-2:2"])
    assert json.loads(r.output)["count"] == 15


def test_regions_emit_json(workdir):
    r = run(["regions", "emit", workdir / "p2.json", "--cone", "0,1", "--k", "1", "--which", "Z,F"])
    payload = json.loads(r.output)
    assert "Z" in payload and "F" in payload
    assert payload["F"]["removed_points"] == [["-1", "-1"]]


def test_regions_emit_svg(workdir, tmp_path):
    out = tmp_path / "regions.svg"
    run(["--svg-out", out, "regions", "emit", workdir / "p2.json", "--cone", "0,1", "--format", "svg"])
    assert out.exists() and out.stat().st_size > 0


def test_coh_h(workdir):
    r = run(["coh", "h", workdir / "p2.json", "--div", "3,0,0"])
    assert json.loads(r.output)["h"] == [10, 0, 0]


def test_coh_ext_orlov(workdir):
    r = run(["coh", "ext-orlov", workdir / "blp2.ctx.json", "--k", "1", "--l", "1"])
    assert json.loads(r.output)["ext"] == [1, 0, 0]


def test_verify_sod_cli(workdir, tmp_path):
    out = tmp_path / "report.json"
    figs = tmp_path / "figs"
    run(["--json-out", out, "verify", "sod", workdir / "blp2.ctx.json", "--k", "1", "--figures-dir", figs])
    payload = json.loads(out.read_text())
    assert payload["ok"] and payload["passed"] == 2
    assert (figs / "summary.csv").exists()
    assert (figs / "blp2-fan.svg").exists()
    assert (figs / "blp2-regions.svg").exists()


def test_verify_cech_cli(workdir):
    r = run(["verify", "cech", workdir / "blp2.ctx.json"])
    assert json.loads(r.output)["ok"]


def test_verify_step1_cli(workdir):
    r = run(["verify", "step1", workdir / "blp2.ctx.json", "--k", "1"])
    assert json.loads(r.output)["ok"]


def test_verify_step1_user_sheaf(workdir, tmp_path):
    from toriclab.sheaves import skyscraper_sheaf
    from toriclab.verify import verification_complex

    cx = verification_complex(2)
    save_json(skyscraper_sheaf(cx, (0, 0)).to_json(), tmp_path / "user.json")
    r = run(["verify", "step1", workdir / "blp2.ctx.json", "--k", "1", "--sheaf", tmp_path / "user.json"])
    payload = json.loads(r.output)
    assert payload["ok"]
    computed = payload["checks"][0]["computed"]
    assert any(row["sheaf"] == "user" for row in computed)


def test_corpus_list_seeded(workdir):
    r1 = run(["--seed", "7", "corpus", "list", "--max-rays", "4"])
    r2 = run(["--seed", "7", "corpus", "list", "--max-rays", "4"])
    assert r1.output == r2.output
    payload = json.loads(r1.output)
    assert payload["count"] == 6


def test_plot_fan_cli(workdir, tmp_path):
    out = tmp_path / "fan.svg"
    run(["--svg-out", out, "plot", "fan", workdir / "blp2.json"])
    assert out.exists()


def test_verify_mmp_suite_small(tmp_path):
    out = tmp_path / "mmp.json"
    run(["--json-out", out, "--jobs", "2", "verify", "mmp-suite", "--max-rays", "4", "--shallow"])
    payload = json.loads(out.read_text())
    assert payload["ok"] and payload["passed"] == 6


def test_sheaf_cli_round_trip(tmp_path):
    from toriclab.cells import TorusCellComplex, midwall_families
    from toriclab.sheaves import constant_sheaf, skyscraper_sheaf

    cx = TorusCellComplex(2, midwall_families(2))
    save_json(cx.to_json(), tmp_path / "complex.json")
    save_json(constant_sheaf(cx).to_json(), tmp_path / "const.json")
    save_json(skyscraper_sheaf(cx, (0, 0)).to_json(), tmp_path / "sky.json")
    r = run(["sheaf", "cohomology", tmp_path / "complex.json", tmp_path / "const.json"])
    assert json.loads(r.output)["cohomology"] == [1, 2, 1]
    r = run(["sheaf", "ext", tmp_path / "complex.json", tmp_path / "sky.json", tmp_path / "const.json"])
    assert json.loads(r.output)["ext"] == [0, 0, 1]


def test_regions_slice_svg(tmp_path):
    from toriclab.fans import fan_p3

    save_json(fan_p3().to_json(), tmp_path / "p3.json")
    out = tmp_path / "slice.svg"
    run(
        [
            "--svg-out", out,
            "regions", "emit", tmp_path / "p3.json",
            "--cone", "0,1,2", "--k", "1", "--which", "Z,Zk",
            "--format", "svg", "--slice", "2=-1/2",
        ]
    )
    assert out.exists() and out.stat().st_size > 0
