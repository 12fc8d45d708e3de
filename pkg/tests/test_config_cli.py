import json
import math

import numpy as np
import pytest

from bubbletower import (
    RunConfig,
    dump_config,
    load_config,
    optimal_rates,
    parse_config,
    save_config,
)
from bubbletower.cli import bundled_config_path, main
from bubbletower.reporting import (
    RunRecord,
    load_record,
    records_equal_except_timings,
)

BASIC = """
[domain]
R = 1.0
eps = 1e-4

[tower]
k = 2
m = 2
partition = [[1], [2]]

[physics]
beta = -1.0
mu = [1.0, 1.0]
"""


def test_parse_defaults_and_star_rates():
    cfg = parse_config(BASIC)
    assert cfg.outer == 1.0
    assert cfg.eps == 1e-4
    assert cfg.k == 2
    assert cfg.d == "star"
    assert cfg.tol == 1e-10
    assert cfg.points_per_decade == 64
    assert np.allclose(cfg.rate_coefficients(), optimal_rates(2, -1.0, 1.0), rtol=1e-14)


def test_parse_rejects_unknown_sections():
    with pytest.raises(ValueError):
        parse_config(BASIC + "\n[surprise]\nx = 1\n")


def test_parse_rejects_consecutive_partition():
    bad = BASIC.replace("partition = [[1], [2]]", "partition = [[1, 2]]").replace(
        "m = 2", "m = 1"
    ).replace("mu = [1.0, 1.0]", "mu = [1.0]")
    with pytest.raises(Exception):
        parse_config(bad).tower_config()


def test_round_trip_idempotent():
    cfg = parse_config(BASIC)
    text1 = dump_config(cfg)
    cfg2 = parse_config(text1)
    text2 = dump_config(cfg2)
    assert cfg == cfg2
    assert text1 == text2


def test_round_trip_preserves_full_precision():
    cfg = parse_config(BASIC.replace("eps = 1e-4", "eps = 1.2345678901234567e-5"))
    assert parse_config(dump_config(cfg)).eps == cfg.eps


def test_save_load_file(tmp_path):
    cfg = parse_config(BASIC)
    path = tmp_path / "run.toml"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_bundled_config_loads():
    cfg = load_config(bundled_config_path())
    assert cfg.k == 2
    assert cfg.eps_list is not None


def test_tower_config_carries_eps_override():
    cfg = parse_config(BASIC)
    tc = cfg.tower_config(eps=1e-6)
    assert tc.eps == 1e-6
    assert tc.k == 2


def test_run_record_round_trip(tmp_path):
    rec = RunRecord(command="demo", config={"eps": 1e-5})
    rec.add_verdict("demo-check", True, "fine")
    rec.outputs["values"] = [1.0, 2.5]
    rec.timings["solve"] = 0.123
    path = rec.save(tmp_path, "demo")
    back = load_record(path)
    assert back.command == "demo"
    assert back.verdicts == rec.verdicts
    assert back.outputs["values"] == [1.0, 2.5]
    assert records_equal_except_timings(rec, back)


def test_records_differ_on_outputs():
    a = RunRecord(command="demo", config={})
    b = RunRecord(command="demo", config={})
    a.outputs["x"] = 1.0
    b.outputs["x"] = 2.0
    a.timings["t"] = 1.0
    b.timings["t"] = 9.0
    assert not records_equal_except_timings(a, b)
    b.outputs["x"] = 1.0
    assert records_equal_except_timings(a, b)  # timing gaps are ignored


def test_cli_constants_runs():
    assert main(["constants"]) == 0


def test_cli_verify_unknown_name_fails():
    assert main(["verify", "no-such-check"]) == 2


def test_cli_verify_writes_record(tmp_path, capsys):
    code = main(["verify", "A1-expansion", "--out", str(tmp_path)])
    assert code == 0
    files = list(tmp_path.glob("*.record.json"))
    assert len(files) == 1
    rec = json.loads(files[0].read_text())
    assert rec["command"].startswith("verify")
    out = capsys.readouterr().out
    assert "pass" in out


def test_cli_minimize_and_report(tmp_path, capsys):
    assert main(["minimize", "--out", str(tmp_path)]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    report = (tmp_path / "report.md").read_text()
    assert "minimizer-agreement" in report
    capsys.readouterr()


def test_cli_solve_emits_record_and_plot(tmp_path, capsys):
    assert main(["solve", "--out", str(tmp_path), "--ppd", "32"]) == 0
    assert (tmp_path / "solve.record.json").exists()
    assert (tmp_path / "solve-profiles.svg").exists()
    capsys.readouterr()


def test_cli_solve_bad_config_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(
        BASIC.replace("partition = [[1], [2]]", "partition = [[1, 2]]")
        .replace("m = 2", "m = 1")
        .replace("mu = [1.0, 1.0]", "mu = [1.0]")
    )
    assert main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert not list(tmp_path.glob("*.record.json"))
    capsys.readouterr()


def test_cli_report_empty_dir(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert "no records found" in capsys.readouterr().out
