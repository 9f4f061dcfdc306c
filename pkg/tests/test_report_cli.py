import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from xxz_lab import __version__
from xxz_lab.cli import run
from xxz_lab.report import ReportError, emit_report, read_report, render_csv, render_json


def test_empty_rows_give_header_only_csv():
    assert render_csv([], ["a", "b"]) == "a,b\r\n"


def test_csv_quoting_and_digits():
    text = render_csv([{"name": 'x,"y"', "v": 1 / 3, "flag": True, "bad": math.nan}])
    assert text == 'name,v,flag,bad\r\n"x,""y""",0.333333333333,true,nan\r\n'


def test_json_layout():
    doc = json.loads(render_json([{"b": 1.0, "a": math.inf}], meta={"seed": 7, "config": {"z": 1}}))
    assert list(doc) == ["meta", "rows"]
    assert doc["meta"] == {"version": __version__, "seed": 7, "config": {"z": 1}}
    assert list(doc["rows"][0]) == ["b", "a"] and doc["rows"][0]["a"] == "inf"


@given(st.lists(st.fixed_dictionaries({
    "x": st.floats(allow_nan=False, allow_infinity=False, width=64),
    "n": st.integers(-10**6, 10**6),
    "s": st.text(alphabet="abc ,\"", max_size=5).filter(lambda t: t.strip() == t and t),
}), max_size=5))
def test_json_round_trip_at_twelve_digits(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("r") / "out.json"
    emit_report(rows, "json", path)
    back = read_report(path)
    assert len(back) == len(rows)
    for r, b in zip(rows, back):
        assert b["x"] == float(f"{r['x']:.12g}") and b["n"] == r["n"] and b["s"] == r["s"]


def test_unwritable_path(tmp_path):
    with pytest.raises(ReportError, match="missing"):
        emit_report([{"a": 1}], "csv", tmp_path / "missing" / "x.csv")


def cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_g_scan_example(capsys):
    code, out, _ = cli(capsys, "g-scan", "--delta", "2", "--L", "2", "--mu", "0")
    assert code == 0
    header, row = out.splitlines()[:2]
    cells = dict(zip(header.split(","), row.split(",")))
    assert float(cells["g"]) == pytest.approx(0.666667, abs=5e-7)


def test_gap_bound_example(capsys):
    code, out, _ = cli(capsys, "gap-bound", "--delta", "2", "--mu", "0", "--L", "2", "--R", "10",
                       "--shape", "interval")
    assert code == 0
    header, row = out.splitlines()[:2]
    cells = dict(zip(header.split(","), row.split(",")))
    assert float(cells["gap_bound"]) == pytest.approx(0.016449, abs=5e-7)
    assert float(cells["lambda1"]) == pytest.approx(math.pi ** 2, rel=1e-12)


def test_grid_order_and_threads(capsys, monkeypatch):
    args = ("g-scan", "--delta", "1.5,2,3", "--mu", "0,1", "--L", "4,8")
    _, serial, _ = cli(capsys, *args)
    monkeypatch.setenv("XXZ_LAB_THREADS", "4")
    _, threaded, _ = cli(capsys, *args)
    assert serial == threaded
    rows = [r.split(",")[:3] for r in serial.splitlines()[1:]]
    assert rows[:3] == [["1.5", "0", "4"], ["1.5", "0", "8"], ["1.5", "1", "4"]]


def test_same_config_same_bytes(tmp_path, capsys):
    for name in ("a.json", "b.json"):
        assert cli(capsys, "energy", "--R", "8,12", "--L", "4", "--phi", "I:sin2", "--format",
                   "json", "--seed", "3", "--output", str(tmp_path / name))[0] == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[common]\ndelta = 3\n[g-scan]\nL = 4,6\nmu = 0.5\n")
    code, out, _ = cli(capsys, "g-scan", "--config", str(cfg), "--L", "2")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("3,0.5,2,")


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["g-scan", "--L", "3"],
    ["gap-bound", "--delta", "0.5"],
    ["gap-bound", "--delta", "1"],
    ["gap-bound", "--R", "-1"],
    ["g-scan", "--format", "xml"],
    ["g-scan", "--delta", "two"],
    ["g-scan", "--nonsense", "1"],
    ["energy", "--shape", "square", "--phi", "I:sin1"],
    ["exact-diag", "--sites", "20", "--max-sites", "12"],
    [],
])
def test_usage_errors_exit_1(capsys, argv):
    assert cli(capsys, *argv)[0] == 1


def test_unwritable_output_exits_1(tmp_path, capsys):
    code, _, err = cli(capsys, "g-scan", "--output", str(tmp_path / "no" / "x.csv"))
    assert code == 1 and "no" in err


def test_isotropic_scan_is_allowed(capsys):
    code, out, _ = cli(capsys, "g-scan", "--delta", "1", "--L", "4")
    assert code == 0 and "0.8," in out


def test_exact_diag_rows(capsys):
    code, out, _ = cli(capsys, "exact-diag", "--sites", "4", "--delta", "2", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0 and sum(r["kernel_dim"] for r in rows) == 5


def test_error_report_columns(capsys):
    code, out, _ = cli(capsys, "error-report", "--phi", "I:sin1", "--R", "16", "--L", "10")
    assert code == 0
    assert out.splitlines()[0] == ("phi_id,R,eps1,eps2,eps3,boundary_term,interval_lo,"
                                   "interval_hi,exact_rayleigh,contained")


def test_validation_failure_exits_2(capsys, monkeypatch):
    from xxz_lab import validation

    def fake(max_sites, seed):
        return [validation.Check("always fails", False, 1.0, 0.0)]

    monkeypatch.setattr(validation, "run_all", fake)
    code, _, err = cli(capsys, "validate")
    assert code == 2 and "always fails" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xxz_lab.cli", "g-scan", "--delta", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("delta,")


def test_energy_defaults_to_every_shape_on_the_domain(capsys):
    code, out, _ = cli(capsys, "energy", "--shape", "disk:0.5", "--R", "6", "--L", "2")
    ids = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert code == 0 and len(ids) == 7 and all(i.startswith("D:") for i in ids)


def test_mixed_domain_phi_list_rejected(capsys):
    assert cli(capsys, "energy", "--phi", "I:sin1,D:bubble")[0] == 1
