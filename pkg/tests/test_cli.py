import json
from pathlib import Path

import pytest

from varbic.cli import main, render, run
from varbic.suites import RunConfig, plan

GOLDEN = Path(__file__).parent / "golden"


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mech_matches_golden(capsys):
    code, out, _ = _run(capsys, "verify-mech", "--potential", "q1^2/2", "--format", "json")
    assert code == 0
    assert out == (GOLDEN / "verify_mech.json").read_text(encoding="utf-8")


def test_gr_text_matches_golden(capsys):
    code, out, _ = _run(capsys, "verify-gr", "--dim", "2")
    assert code == 0
    assert out == (GOLDEN / "verify_gr_dim2.txt").read_text(encoding="utf-8")


def test_json_schema(capsys):
    code, out, _ = _run(capsys, "verify-covariance", "--dim", "2", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["schema"] == 1
    assert report["suite"] == "verify-covariance"
    assert report["summary"]["failed"] == 0
    for entry in report["entries"]:
        assert set(entry) >= {"id", "description", "status", "claims", "residual", "oracle"}
        assert "seconds" not in entry


def test_report_is_byte_stable_across_runs_and_jobs(capsys):
    _, a, _ = _run(capsys, "verify-divergence", "--dim", "2", "--format", "json")
    _, b, _ = _run(capsys, "verify-divergence", "--dim", "2", "--format", "json", "--jobs", "2")
    _, c, _ = _run(capsys, "verify-divergence", "--dim", "2", "--format", "json", "--seed", "1")
    assert a == b
    assert a != c


def test_timings_flag(capsys):
    _, out, _ = _run(capsys, "verify-mech", "--format", "json", "--timings")
    assert all("seconds" in e for e in json.loads(out)["entries"])


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, "verify-mech", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["summary"]["passed"] == 10


def test_energy_entry(capsys):
    _, out, _ = _run(capsys, "verify-mech", "--potential", "q1^4 - q1*q2", "--particles", "2")
    assert any(line.startswith("PASS") and "mech.energy" in line for line in out.splitlines())


@pytest.mark.parametrize("argv,fragment", [
    (["verify-gr", "--dim", "4"], "--allow-large"),
    (["verify-gr", "--dim", "5"], "--dim"),
    (["verify-linfty", "--dim", "2", "--k", "3"], "--k"),
    (["verify-gr", "--jet-cap", "2"], "--jet-cap"),
    (["verify-gr", "--field", "vec v [x1]"], "components"),
    (["verify-gr", "--field", "vec v [0.5, x1]"], "non-rational"),
    (["verify-mech", "--potential", "q3"], "unknown variable"),
    (["verify-gr", "--points", "0"], "--points"),
])
def test_config_errors_exit_2(capsys, argv, fragment):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert fragment in err


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify-everything"])
    assert exc.value.code == 2


def test_field_file_and_concrete_fields(tmp_path, capsys):
    path = tmp_path / "fields.vf"
    path.write_text("# a rotation and a shear\nvec r [x2, -x1]\nvec s [x2^2, 1/3]\n", encoding="utf-8")
    code, out, _ = _run(capsys, "verify-gr", "--dim", "2", "--field", str(path))
    assert code == 0
    assert "fields=['r', 's']" in out


def test_failing_identity_exits_1(monkeypatch, capsys):
    from varbic import suites
    from varbic.formalg import Form

    def broken(ctx):
        ring = ctx.ring
        return suites.Outcome([suites.Claim("broken", Form.scalar(ring.g(1, 1)), Form.zero(ring))])

    original = suites.mech_suite

    def patched(config):
        return original(config)[:1] + [suites.EntrySpec("mech.broken", "deliberately false", broken)]

    monkeypatch.setitem(suites.PLANNERS, "verify-mech", patched)
    config = RunConfig("verify-mech", jet_cap=6)
    report, code = run(config, isolate=False)
    assert code == 1
    bad = report["entries"][-1]
    assert bad["status"] == "fail"
    assert bad["residual"]["claim"] == "broken"
    assert bad["oracle"]["failing_seed"] is not None
    assert bad["oracle"]["disagreements"] == 0
    assert "FAIL" in render(report, "text")


def test_entry_ids_unique_in_every_suite():
    for command in ("verify-gr", "verify-linfty", "verify-mech", "verify-covariance", "verify-divergence",
                    "verify-bicomplex", "oracle-audit"):
        for dim in (2, 3):
            ids = [e.id for e in plan(RunConfig(command, dim=dim, k=dim))]
            assert len(ids) == len(set(ids))
