import json
from importlib import resources

import jsonschema
import pytest

from jacobikit.cli import REPORT_SCHEMA, check_workspace, main, parse_workspace, read_definitions
from jacobikit.errors import ParseError
from jacobikit.jacobi import verify_jacobi

BAD = str(resources.files("jacobikit").joinpath("data/desk_bad.jk"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_desk_loads_clean(self):
        ws = parse_workspace(read_definitions("desk"))
        assert check_workspace(ws) == []
        assert set(ws.charts) == {"M", "P", "N"}
        assert len(ws.samples["grid1"]) == 27

    def test_duplicate_name(self):
        with pytest.raises(ParseError, match="duplicate name") as err:
            parse_workspace("chart M : q p\noneform a on M : q = 1\noneform a on M : p = 1\n")
        assert err.value.line == 3

    def test_unknown_chart(self):
        with pytest.raises(ParseError, match="unknown chart"):
            parse_workspace("oneform a on M : q = 1\n")

    def test_bad_expression_reports_line(self):
        with pytest.raises(ParseError) as err:
            parse_workspace("chart M : q p\n\noneform a on M : q = (p +\n")
        assert err.value.line == 3

    def test_foreign_coordinate(self):
        with pytest.raises(ParseError, match="not a coordinate"):
            parse_workspace("chart M : q p\noneform a on M : z = 1\n")

    def test_eager_checks_report_residue(self):
        ws = parse_workspace(read_definitions(BAD))
        errors = check_workspace(ws)
        assert len(errors) == 1 and "Jbad" in errors[0]
        assert not verify_jacobi(ws.jacobis["Jbad"]).passed


class TestExitCodes:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "desk", "verify", "jacobi", "J2")
        assert code == 0
        assert out.splitlines()[0] == "COMMAND verify jacobi J2"
        assert "CHECK jacobi.c1 PASS" in out

    def test_fail_with_witness(self, capsys):
        code, out, _ = run(capsys, "desk", "gauge", "jacobi", "C1", "--one-form", "B5", "--samples", "grid1")
        assert code == 1
        assert "CHECK gauge.admissible FAIL witness=q=-1,p=-1,z=-1 residue=VANISHES_AT_SAMPLE" in out

    def test_undecided(self, capsys):
        code, out, _ = run(capsys, "desk", "verify", "contact", "C6")
        assert code == 3 and "UNDECIDED" in out

    def test_usage_errors(self, capsys, tmp_path):
        assert run(capsys, "desk", "verify", "jacobi", "nope")[0] == 2
        assert run(capsys, str(tmp_path / "missing.jk"), "verify", "jacobi", "J2")[0] == 2
        bad = tmp_path / "broken.jk"
        bad.write_text("chart M : q\noneform a on M : q = q +\n")
        code, _, err = run(capsys, str(bad), "verify", "jacobi", "a")
        assert code == 2 and "line 2" in err

    def test_argparse_errors_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["desk", "verify", "bogus", "J2"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_eager_load_rejects_bad_file(self, capsys):
        code, _, err = run(capsys, BAD, "verify", "jacobi", "Jbad")
        assert code == 2 and "Jbad" in err

    def test_lazy_load_reaches_the_check(self, capsys):
        code, out, _ = run(capsys, BAD, "verify", "jacobi", "Jbad", "--lazy")
        assert code == 1 and "CHECK jacobi.c2 FAIL" in out


class TestCommands:
    @pytest.mark.parametrize("argv", [
        ["verify", "dj", "D1"],
        ["verify", "lcs", "L3", "--samples", "gridP"],
        ["verify", "commute-diracization", "J2", "Bq"],
        ["verify", "commute-poissonization", "C1", "B4", "--samples", "grid1"],
        ["verify", "algebroid-iso", "C1", "B4", "--samples", "grid1"],
        ["gauge", "contact", "C1", "--one-form", "B4", "--samples", "grid1"],
        ["gauge", "lcs", "L3", "--one-form", "Bp", "--samples", "gridP"],
        ["poissonize", "C1"],
        ["groupoid", "pair", "C1", "--gauge", "B4", "--samples", "grid5"],
        ["glb", "canonical", "J2"],
        ["glb", "compat", "C1"],
        ["glb", "psi-b", "C1", "B4", "--samples", "grid1"],
        ["gcs", "from-contact", "C1", "--bfield", "B4"],
    ])
    def test_passes_on_desk(self, capsys, argv):
        code, out, _ = run(capsys, "desk", *argv)
        assert code == 0, out
        assert "FAIL" not in out and "UNDECIDED" not in out

    def test_poissonize_prints_bivector(self, capsys):
        _, out, _ = run(capsys, "desk", "poissonize", "J2")
        assert "exp(-t)" in out

    def test_gauge_lcs_needs_samples(self, capsys):
        assert run(capsys, "desk", "gauge", "lcs", "L3", "--one-form", "Bp")[0] == 3

    def test_samples_on_wrong_chart(self, capsys):
        assert run(capsys, "desk", "gauge", "jacobi", "J2", "--one-form", "Bq", "--samples", "grid1")[0] == 2


class TestJson:
    def test_schema(self, capsys):
        code, out, _ = run(capsys, "desk", "gauge", "jacobi", "C1", "--one-form", "B5", "--samples", "grid1", "--json")
        data = json.loads(out)
        jsonschema.validate(data, REPORT_SCHEMA)
        assert code == 1 and data["command"].startswith("gauge jacobi C1")
        failed = [c for c in data["checks"] if c["status"] == "FAIL"]
        assert failed[0]["witness"] == {"q": "-1", "p": "-1", "z": "-1"}

    def test_no_timing_is_reproducible(self, capsys):
        argv = ("desk", "verify", "algebroid-iso", "C1", "B4", "--samples", "grid1", "--json", "--no-timing")
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first
        assert json.loads(first)["elapsed_ms"] == 0


class TestEmit:
    def test_gauged_jacobi_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "out.jk"
        assert run(capsys, "desk", "gauge", "jacobi", "C1", "--one-form", "B4", "--samples", "grid1",
                   "--emit", str(path))[0] == 0
        ws = parse_workspace(path.read_text())
        assert check_workspace(ws) == []
        assert run(capsys, str(path), "verify", "jacobi", "C1_B4")[0] == 0

    def test_gauged_contact_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "out.jk"
        run(capsys, "desk", "gauge", "contact", "C1", "--one-form", "B4", "--samples", "grid1", "--emit", str(path))
        assert run(capsys, str(path), "verify", "contact", "C1_B4")[0] == 0

    def test_gauged_precontact_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "out.jk"
        run(capsys, "desk", "gauge", "dj", "D1", "--one-form", "B4", "--emit", str(path))
        assert "precontact D1_B4_eta" in path.read_text()
        assert run(capsys, str(path), "verify", "dj", "D1_B4")[0] == 0

    def test_failed_gauge_emits_nothing(self, capsys, tmp_path):
        path = tmp_path / "out.jk"
        run(capsys, "desk", "gauge", "jacobi", "C1", "--one-form", "B5", "--samples", "grid1", "--emit", str(path))
        assert not path.exists()
