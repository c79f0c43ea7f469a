import csv
import json

import pytest

from susyflow import cli


def run_main(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tables_suite(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code, out, _ = run_main(["verify", "tables", "--report", str(rep), "--fixed-clock"], capsys)
    assert code == 0
    data = json.loads(rep.read_text())
    assert data["schema"] == 1
    assert data["generated"] == cli.FIXED_TIME
    assert data["suites"]["tables"]["summary"] == {"total": 74, "passed": 74, "failed": 0}
    assert "tables: 74/74 passed" in out
    for c in data["suites"]["tables"]["checks"]:
        assert set(c) >= {"check", "anchor", "max_residual", "mean_residual", "tolerance", "status", "exclusions"}


def test_reductions_single_row(capsys):
    code, out, _ = run_main(["verify", "reductions", "--id", "L4,m", "--m", "2", "--epsilon", "1"], capsys)
    assert code == 0
    assert "reductions: 4/4 passed" in out


def test_correspondences_negative_grid(capsys):
    code, out, _ = run_main(["verify", "correspondences", "--grid", "-1:1:20"], capsys)
    assert code == 0
    assert "correspondences: 12/12 passed" in out


def test_failing_tolerance_exits_one(capsys):
    code, out, _ = run_main(["verify", "correspondences", "--tol", "1e-30"], capsys)
    assert code == 1
    assert "FAIL correspondence:" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "tables", "--tol", "-1"],
        ["verify", "tables", "--grid", "0:1:2"],
        ["verify", "tables", "--params", "1,2"],
        ["verify", "tables", "--set", "novalue"],
        ["verify", "tables", "--config", "/nonexistent.ini"],
        ["emit", "residuals", "--id", "not_an_entry"],
        ["emit", "density"],
    ],
)
def test_config_errors_exit_two(argv, capsys):
    code, _, err = run_main(argv, capsys)
    assert code == 2
    assert "error" in err


def test_parse_grid():
    g = cli.parse_grid("-1:1:20")
    assert (g.xmin, g.xmax, g.nx, g.ymin, g.ymax, g.ny) == (-1, 1, 20, -1, 1, 20)
    g = cli.parse_grid("0:2:5,-3:-1:6")
    assert (g.ymin, g.ymax, g.ny) == (-3, -1, 6)
    with pytest.raises(cli.ConfigError):
        cli.parse_grid("1:0:5")


def test_config_file(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    rep = tmp_path / "r.json"
    ini.write_text(f"[run]\nids = L4,m\nm = 2\nepsilon = -1\nfixed-clock = yes\nreport = {rep}\n")
    code, out, _ = run_main(["verify", "reductions", "--config", str(ini)], capsys)
    assert code == 0
    data = json.loads(rep.read_text())
    assert data["config"]["ids"] == ["L4,m"] and data["config"]["epsilon"] == -1
    assert data["generated"] == cli.FIXED_TIME
    # flags override the file
    code, _, _ = run_main(["verify", "reductions", "--config", str(ini), "--epsilon", "1"], capsys)
    assert json.loads(rep.read_text())["config"]["epsilon"] == 1


def test_unknown_config_key(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[run]\ncolour = blue\n")
    assert run_main(["verify", "tables", "--config", str(ini)], capsys)[0] == 2


def test_emit_residuals_artifacts(tmp_path, capsys):
    c, s = tmp_path / "g.csv", tmp_path / "g.svg"
    code, _, _ = run_main(["emit", "residuals", "--id", "kink", "--grid", "-1:1:6,0.5:1.5:5", "--csv", str(c), "--svg", str(s)], capsys)
    assert code == 0
    rows = list(csv.reader(c.open()))
    assert len(rows) == 1 + 30
    assert s.read_text().lstrip().startswith("<?xml")
    first = s.read_bytes()
    run_main(["emit", "residuals", "--id", "kink", "--grid", "-1:1:6,0.5:1.5:5", "--svg", str(s)], capsys)
    assert s.read_bytes() == first


def test_emit_density(tmp_path, capsys):
    p = tmp_path / "d.csv"
    code, _, _ = run_main(["emit", "density", "--csv", str(p), "--set", "C1=0.4"], capsys)
    assert code == 0
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["theta", "rho", "limit_above", "limit_below"]
    assert all(0 < float(r[1]) <= 1 for r in rows[1:])


def test_catalog_list(capsys):
    code, out, _ = run_main(["catalog", "list"], capsys)
    assert code == 0
    ids = {e["id"] for e in json.loads(out)["catalog"]}
    assert {"kink", "lambert", "susy_elliptic"} <= ids


def test_in_process_run_is_deterministic():
    cfg = cli.RunConfig(suite="correspondences", fixed_clock=True)
    assert cli.dumps(cli.run(cfg)[1]) == cli.dumps(cli.run(cfg)[1])
