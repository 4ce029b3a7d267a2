import csv
import json
import subprocess
import sys

import pytest

from radialkzb.cli import main


def _checks(path):
    return json.loads(path.read_text())


def test_hc_rank_one_rows(tmp_path):
    rc = main(["hc", "--type", "A1", "--lambda", "1/2", "--m", "10", "--sigma", "chi:i/3,chi:i/5",
               "--out", str(tmp_path)])
    assert rc == 0
    with open(tmp_path / "hc_coefficients.csv") as fh:
        rows = list(csv.DictReader(fh))
    vals = {r["gamma_coords"]: r["value"] for r in rows}
    assert vals["0"] == "1"
    assert vals["-1"] == "-8/15"
    assert vals["-2"] == "-17/450"
    assert len(rows) == 11
    meta = json.loads((tmp_path / "hc_metadata.json").read_text())
    assert meta["mode"] == "represented" and meta["rows"] == 11
    assert meta["lead_root_coords"] == ["1/4"]


def test_hc_height_zero(tmp_path):
    assert main(["hc", "--type", "A1", "--m", "0", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "hc_coefficients.csv").read_text().splitlines()
    assert text[1:] == ["0,0,0,1"]


def test_hc_universal(tmp_path):
    assert main(["hc", "--type", "A1", "--m", "2", "--universal", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "hc_metadata.json").read_text())
    assert meta["mode"] == "universal" and meta["rows"] > 1


@pytest.mark.parametrize(
    "argv",
    [
        ["hc", "--type", "G2"],
        ["hc", "--type", "A1", "--lambda", "2"],
        ["hc", "--type", "A1", "--m", "-1"],
        ["verify", "poisson", "--type", "A2"],
        ["report-merge"],
    ],
)
def test_error_exit_codes(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "x")] if argv[0] != "report-merge" else argv) == 2


def test_bad_basis_rejected_by_parser():
    with pytest.raises(SystemExit):
        main(["hc", "--basis", "weird"])


def test_verify_report_shape_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["verify", "reflection", "--type", "A1", "--m", "4", "--out", str(p)]) == 0
    ra, rb = _checks(a), _checks(b)
    assert set(ra) == {"version", "config", "checks", "pass"}
    for c in ra["checks"]:
        assert set(c) == {"name", "paper_anchor", "pass", "m", "residual_support", "wall_time_ms"}

    def strip(r):
        return [{k: v for k, v in c.items() if k != "wall_time_ms"} for c in r["checks"]]

    assert strip(ra) == strip(rb)
    names = [c["name"] for c in ra["checks"]]
    assert names == sorted(names) and "reflection_control" in names


def test_report_merge(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "cdybe", "--type", "A1", "--m", "4", "--out", str(a)])
    main(["verify", "poisson", "--type", "A1", "--m", "6", "--out", str(b)])
    merged = tmp_path / "m.json"
    assert main(["report-merge", str(a), str(b), "--out", str(merged)]) == 0
    rep = _checks(merged)
    assert rep["pass"] and len(rep["checks"]) == len(_checks(a)["checks"]) + len(_checks(b)["checks"])
    bad = json.loads(a.read_text())
    bad["checks"][0]["pass"] = False
    a.write_text(json.dumps(bad))
    assert main(["report-merge", str(a), "--out", str(merged)]) == 1
    (tmp_path / "junk.json").write_text("not json")
    assert main(["report-merge", str(tmp_path / "junk.json")]) == 2


def test_toml_config_and_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[run]\ntype = "A1"\nm = 3\nlambda = "1/2"\nsigma = "chi:i/3,chi:i/5"\n')
    out = tmp_path / "o"
    assert main(["hc", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads((out / "hc_metadata.json").read_text())["rows"] == 4
    assert main(["hc", "--config", str(cfg), "--m", "1", "--out", str(out)]) == 0
    assert json.loads((out / "hc_metadata.json").read_text())["config"]["m"] == 1
    (tmp_path / "broken.toml").write_text("m = [")
    assert main(["hc", "--config", str(tmp_path / "broken.toml")]) == 2


def test_root_basis(tmp_path):
    assert main(["hc", "--type", "A1", "--lambda", "1/4", "--basis", "root", "--m", "1", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "hc_metadata.json").read_text())["lead_root_coords"] == ["1/4"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "radialkzb", "verify", "poisson", "--type", "A1", "--m", "4"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
