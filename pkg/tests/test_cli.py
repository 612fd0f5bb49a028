import json

import pytest

from twodisk.cli import main
from twodisk.config import apply_overrides, from_dict, load_config
from twodisk.errors import ConfigParse

SMALL = [
    "--override", "geometry.box=[-2,2,-4.5,1.5]",
    "--override", "coefficient.kappa_plus=5",
    "--override", "coefficient.kappa_minus=5",
]


def test_defaults_and_required_keys():
    cfg = from_dict({"coefficient": {"kappa_plus": 5, "kappa_minus": 0.2}})
    assert cfg.geometry.mu == 0.25 and cfg.boundary.normalized and cfg.solver.threads == 1
    assert cfg.coefficient.kappa_minus == 0.2
    with pytest.raises(ConfigParse, match="kappa_plus"):
        from_dict({"coefficient": {"kappa_minus": 1}})
    assert from_dict({}, require_coefficient=False).coefficient.kappa_plus is None


@pytest.mark.parametrize(
    "doc",
    [
        {"nonsense": {}},
        {"coefficient": {"kappa_plus": 1, "kappa_minus": 1, "bogus": 2}},
        {"coefficient": {"kappa_plus": -1, "kappa_minus": 1}},
        {"coefficient": {"kappa_plus": 1, "kappa_minus": 1, "mode": "fuzzy"}},
        {"coefficient": "not a mapping"},
    ],
)
def test_invalid_documents(doc):
    with pytest.raises(ConfigParse):
        from_dict(doc)


def test_overrides():
    doc = apply_overrides({}, ["solver.h=0.0125", "geometry.deltas=[0.2, 0.1]"])
    assert doc == {"solver": {"h": 0.0125}, "geometry": {"deltas": [0.2, 0.1]}}
    with pytest.raises(ConfigParse):
        apply_overrides({}, ["no-equals"])


def test_load_config_file(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("coefficient:\n  kappa_plus: 5\n  kappa_minus: 5\nsolver:\n  h: 0.05\n")
    cfg = load_config(path, ["solver.h=0.025"])
    assert cfg.solver.h == 0.025
    path.write_text("coefficient: [unbalanced\n")
    with pytest.raises(ConfigParse):
        load_config(path)
    with pytest.raises(ConfigParse):
        load_config(tmp_path / "missing.yaml")


def test_cli_missing_kappa_is_config_error(tmp_path, capsys):
    path = tmp_path / "c.yaml"
    path.write_text("coefficient:\n  kappa_minus: 5\n")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "o")]) != 0
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "ConfigParse" and "kappa_plus" in record["message"]
    assert json.loads((tmp_path / "o" / "failure.json").read_text())["error"] == "ConfigParse"


def test_cli_propagated_error_record(tmp_path, capsys):
    out = tmp_path / "o"
    rc = main(["solve", "--out", str(out), *SMALL, "--override", "geometry.delta=0.3"])
    assert rc == 2
    assert json.loads((out / "failure.json").read_text())["error"] == "GapTooWide"


def test_cli_solve_and_report(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", "--out", str(out), "--threads", "1", *SMALL, "--override", "solver.h=0.0125"]) == 0
    csvs = list(out.glob("solve-*.csv"))
    assert len(csvs) == 1 and csvs[0].read_text().startswith("delta,h,mode,")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["solve"]["checks"]["ok"] is True
    assert main(["report", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert csvs[0].name in summary["report"]["merged"]


def test_cli_sweep_small(tmp_path):
    out = tmp_path / "o"
    args = ["sweep", "--out", str(out), *SMALL, "--override", "geometry.deltas=[0.2,0.1]",
            "--override", "solver.h_levels=[0.025,0.0125]"]
    assert main(args) == 0
    rows = (next(out.glob("sweep-*.csv"))).read_text().strip().splitlines()
    assert len(rows) == 1 + 2 * 2


def test_cli_identities(tmp_path):
    out = tmp_path / "o"
    assert main(["identities", "--out", str(out)]) == 0
    lines = next(out.glob("identities-*.csv")).read_text().strip().splitlines()
    assert len(lines) == 1 + 3 * (7 + 8)


def test_cli_barrier(tmp_path):
    out = tmp_path / "o"
    assert main(["barrier", "--out", str(out), "--override", "coefficient.kappa_plus=0.2",
                 "--override", "coefficient.kappa_minus=5"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["barrier"]["checks"]["ok"] is True


def test_cli_oracle_small(tmp_path):
    out = tmp_path / "o"
    args = ["oracle", "--out", str(out), "--override", "oracle.kappas=[5]",
            "--override", "oracle.h_levels=[0.125,0.0625]", "--override", "oracle.box=[-4,4,-4,4]",
            "--override", "oracle.radial_h_levels=[0.0625,0.03125]"]
    assert main(args) == 0


def test_cli_failing_check_exits_one(tmp_path):
    out = tmp_path / "o"
    # an impossible order threshold makes the identity campaign fail
    assert main(["identities", "--out", str(out), "--override", "thresholds.min_order=5"]) == 1
