import csv
import io
import json

import numpy as np
import pytest

from covspec import cli, metric_graph
from covspec.plotting import sweep_counts, warped_ratio_curve
from covspec.spaces_core import SpecValue, Spectrum


def _out(tmp_path, argv, name="out"):
    path = tmp_path / name
    code, res = cli.run(list(argv) + ["-o", str(path)])
    return code, res, path.read_bytes()


def test_torus_table(tmp_path):
    code, res, data = _out(tmp_path, ["covspec", "torus", "--diameters", "3,2,1"])
    assert code == 0
    assert [r[1] for r in res.rows] == ["1", "2", "3"]
    assert data.decode().splitlines()[0].startswith("covering spectrum of the flat torus")


def test_command_word_is_optional(tmp_path):
    _, _, a = _out(tmp_path, ["torus", "--diameters", "3,2,1", "--format", "csv"], "a")
    _, _, b = _out(tmp_path, ["covspec", "torus", "--diameters", "3,2,1", "--format", "csv"], "b")
    assert a == b
    rows = list(csv.reader(io.StringIO(a.decode())))
    assert rows[0] == cli.SPEC_COLUMNS and [r[1] for r in rows[1:]] == ["1", "2", "3"]


def test_pi_values_render_symbolically(tmp_path):
    _, res, data = _out(tmp_path, ["covspec", "preset", "figure8", "--format", "json"])
    doc = json.loads(data)
    assert [r["value"] for r in doc["rows"]] == ["3*pi/2", "2*pi"]
    assert doc["rows"][0]["numeric"] == "4.71238898038"
    assert doc["status"] == 0


def test_warped_cylinder_reports_unattained_infimum(tmp_path):
    code, res, data = _out(tmp_path, ["covspec", "warped-cylinder", "--f", "1+exp(-r^2)"])
    assert code == 0
    text = data.decode()
    assert "attained=false" in text
    assert res.rows[0][:2] == ["covspec", "pi"]


@pytest.mark.parametrize(
    "argv",
    [
        ["covspec", "torus", "--diameters", "3,x"],
        ["covspec", "warped-cylinder", "--f", "1+*r"],
        ["covspec", "graph", "no-such-file.graph"],
        ["covspec", "preset", "nosuch"],
        ["rescaled", "preset", "nosuch"],
        ["slipping", "preset", "nosuch"],
        ["covspec", "torus", "--diameters", "1,2", "--format", "svg", "--report", "/dev/null/x"],
        ["rescaled", "moebius", "--format", "svg"],
    ],
)
def test_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert capsys.readouterr().err.startswith("error:")


@pytest.mark.parametrize("argv", [["covspec", "torus"], ["--bogus"], ["covspec", "torus", "--diameters", "1", "--format", "xml"]])
def test_usage_errors_exit_one(argv):
    with pytest.raises(SystemExit) as err:
        cli.main(argv)
    assert err.value.code == 1


def test_undetermined_spectrum_exits_two(monkeypatch, tmp_path):
    fake = Spectrum((SpecValue(1), SpecValue(2, status="undetermined")))
    monkeypatch.setattr(metric_graph, "covering_spectrum_graph", lambda g, lmax=None: fake)
    code, res, _ = _out(tmp_path, ["covspec", "graph", "theta"])
    assert code == 2
    assert res.rows[1][-1] == "undetermined"


def test_failed_verification_exits_one(tmp_path):
    # the basepoint variant vanishes on the cone while the infinite one does not
    code, res, _ = _out(tmp_path, ["verify", "rescaled-lemmas", "--preset", "cone"])
    assert code == 1
    assert {r[0]: r[1] for r in res.rows}["zero iff zero"] is False


def test_verify_milnor(tmp_path):
    code, res, _ = _out(tmp_path, ["verify", "milnor", "--format", "csv"])
    assert code == 0 and len(res.rows) == 21
    assert res.rows[0][2] == "18"


@pytest.mark.parametrize(
    "argv",
    [
        ["covspec", "torus", "--diameters", "3,2,1"],
        ["covspec", "preset", "theta"],
        ["plot", "warped-ratio", "--f", "r/2", "--points", "6"],
        ["plot", "covspec-sweep", "--preset", "wedge3", "--points", "30"],
    ],
)
@pytest.mark.parametrize("fmt", ["csv", "json", "svg"])
def test_output_is_byte_deterministic(tmp_path, argv, fmt):
    _, _, a = _out(tmp_path, argv + ["--format", fmt], "a")
    _, _, b = _out(tmp_path, argv + ["--format", fmt], "b")
    assert a == b and a
    if fmt == "svg":
        assert a.lstrip().startswith(b"<?xml") and b"<svg" in a


def test_report_writes_all_formats(tmp_path, capsys):
    rep = tmp_path / "report"
    code, _ = cli.run(["plot", "warped-ratio", "--f", "r", "--points", "5", "--report", str(rep)])
    assert code == 0
    assert sorted(p.name for p in rep.iterdir()) == ["warped-ratio.csv", "warped-ratio.json", "warped-ratio.svg"]
    doc = json.loads((rep / "warped-ratio.json").read_text())
    assert doc["columns"] == ["r", "ratio"]
    assert "wrote" in capsys.readouterr().err


def test_report_without_figure_skips_svg(tmp_path):
    rep = tmp_path / "r"
    cli.run(["rescaled", "moebius", "--powers", "2", "--report", str(rep), "-o", str(tmp_path / "t")])
    assert sorted(p.name for p in rep.iterdir()) == ["rescaled-moebius.csv", "rescaled-moebius.json"]


def test_slipping_pants_report(tmp_path):
    code, res, data = _out(tmp_path, ["slipping", "preset", "pants", "--levels", "8"])
    assert code == 0
    assert all(r[3] == "yes" and r[4] == "no" for r in res.rows)
    assert "π_slip = full group" in data.decode()


def test_sweep_counts_are_step_functions():
    spec = Spectrum((SpecValue(1), SpecValue(2)))
    assert list(sweep_counts(spec, np.array([0.0, 1.0, 1.5, 2.0, 3.0]))) == [0, 0, 1, 1, 2]


def test_ratio_curve_limit():
    curve = warped_ratio_curve("2*r", np.pi / 2, rmax=1e4, n=4)
    assert curve.limit == pytest.approx(2.0)
    assert curve.ratio[-1] == pytest.approx(2.0, abs=1e-9)
