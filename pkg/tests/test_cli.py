import csv
import json

import pytest

from nct.cli import main
from nct.experiments import ConfigError, ExperimentConfig

X1 = {"id": "x1", "coeffs": [{"n": [1, 0], "re": 1}, {"n": [-1, 0], "re": 1},
                             {"n": [0, 1], "re": 1}, {"n": [0, -1], "re": 1}]}
CONST = {"id": "c", "coeffs": [{"n": [0, 0], "re": 2.0}]}


def run_cli(tmp_path, capsys, cmd, cfg, *extra):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    out = tmp_path / "out.csv"
    code = main([cmd, "--config", str(path), "--out", str(out), *extra])
    captured = capsys.readouterr()
    records = [json.loads(line) for line in captured.out.splitlines() if line]
    rows = list(csv.reader(out.open())) if out.exists() else []
    return code, records, rows, captured.err


def test_verify_passes(tmp_path, capsys):
    code, records, rows, _ = run_cli(tmp_path, capsys, "verify", {"n_random": 6, "theta": ["zero", "golden"]})
    assert code == 0
    assert all(r["passed"] and r["max_residual"] <= 1e-10 for r in records)
    assert {r["check"] for r in records} >= {"plancherel", "leibniz", "hs_cwikel", "symbol_expansion",
                                             "clock_shift_product_1/3", "clifford_d4"}
    assert rows[0] == ["check", "theta_id", "max_residual", "tolerance", "passed"]


@pytest.mark.parametrize("cfg", [
    "{not json",
    {"elements": [{"coeffs": [{"n": [1]}]}]},
    {"elements": [{"coeffs": [{"n": [0.5, 1], "re": 1}]}]},
    {"radii": [8, 4]},
    {"theta": "silver"},
    {"theta": [[0, 1], [1, 0]]},
    {"bogus": 1},
    {"d": 1},
    {"command": "calibrate"},
    {"quadrature_resolution": 2},
])
def test_usage_errors(tmp_path, capsys, cfg):
    code, _, _, err = run_cli(tmp_path, capsys, "verify", cfg)
    assert code == 2
    assert err.startswith("nct: ")


def test_missing_config_file(tmp_path, capsys):
    assert main(["verify", "--config", str(tmp_path / "nope.json")]) == 2


def test_argparse_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--config", "x"])
    assert exc.value.code == 2


def test_bad_threads(tmp_path, capsys):
    code, *_ = run_cli(tmp_path, capsys, "calibrate", {"radii": [8]}, "--threads", "0")
    assert code == 2


def test_sv_decay(tmp_path, capsys):
    cfg = {"radii": [6, 8], "elements": [X1, CONST], "window": [5, 150]}
    code, records, rows, _ = run_cli(tmp_path, capsys, "sv-decay", cfg, "--threads", "1")
    assert code == 0
    assert rows[0] == ["x_id", "theta_id", "radius", "k", "mu_k", "scaled_mu_k"]
    fits = {(r["x_id"], r["radius"]): r for r in records}
    assert fits["x1", 8]["fit"] == "ok" and -1.0 < fits["x1", 8]["exponent"] < 0
    assert fits["c", 6]["fit"] == "not-applicable" and fits["c", 6]["exponent"] is None
    const_rows = [r for r in rows[1:] if r[0] == "c"]
    assert const_rows and all(float(r[4]) == 0 for r in const_rows)
    assert len([r for r in rows[1:] if r[0] == "x1" and r[2] == "8"]) == 2 * 17 ** 2
    # floats are written with 17 significant digits
    val = next(r[4] for r in rows[1:] if r[0] == "x1" and float(r[4]) > 0)
    assert float(val) == float(f"{float(val):.17g}")


def test_sv_decay_monomial_theta_sweep(tmp_path, capsys):
    mono = {"id": "u", "coeffs": [{"n": [1, 2], "re": 1.0}]}
    cfg = {"radii": [6], "elements": [mono], "theta": ["zero", "golden"], "window": [5, 100]}
    code, _, rows, _ = run_cli(tmp_path, capsys, "sv-decay", cfg)
    assert code == 0
    zero = [float(r[4]) for r in rows[1:] if r[1] == "zero"]
    golden = [float(r[4]) for r in rows[1:] if r[1] == "golden"]
    assert len(zero) == len(golden) and max(abs(a - b) for a, b in zip(zero, golden)) <= 1e-12


def test_trace_formula_records(tmp_path, capsys):
    cfg = {"radii": [10], "elements": [X1, CONST], "theta": ["zero", "golden"], "quadrature_resolution": 16}
    code, records, rows, _ = run_cli(tmp_path, capsys, "trace-formula", cfg)
    assert code == 0
    per = [r for r in records if "x_id" in r]
    assert set(per[0]) == {"x_id", "d", "theta_id", "radius", "resolution", "rhs", "lhs_extrapolated", "ratio"}
    const = [r for r in per if r["x_id"] == "c"]
    assert all(r["rhs"] == 0 and r["lhs_extrapolated"] == 0 and r["ratio"] is None for r in const)
    summary = records[-1]
    assert summary["summary"] == "ratio" and summary["constant"] and summary["spread"] < 0.1
    assert rows[0][-1] == "ratio" and len(rows) == 1 + len(per)


def test_trace_formula_flags_nonconstancy(tmp_path, capsys):
    cfg = {"radii": [8], "quadrature_resolution": 16, "tolerance": 1e-6}
    code, records, _, _ = run_cli(tmp_path, capsys, "trace-formula", cfg)
    assert code == 1 and records[-1]["constant"] is False


def test_deterministic_output(tmp_path, capsys):
    cfg = {"radii": [8], "elements": [X1], "theta": "golden", "quadrature_resolution": 16}
    first = run_cli(tmp_path, capsys, "trace-formula", cfg)
    csv_first = (tmp_path / "out.csv").read_bytes()
    second = run_cli(tmp_path, capsys, "trace-formula", cfg)
    assert first[1] == second[1]
    assert csv_first == (tmp_path / "out.csv").read_bytes()


def test_calibrate(tmp_path, capsys):
    code, records, rows, _ = run_cli(tmp_path, capsys, "calibrate", {"radii": [16, 24]})
    assert code == 0
    assert all(r["relative_error"] <= 0.03 for r in records)
    assert rows[0][:3] == ["radius", "lattice_count", "weyl_count"]


def test_defect(tmp_path, capsys):
    cfg = {"radii": [12], "elements": [X1], "window": [20, 200]}
    code, records, rows, _ = run_cli(tmp_path, capsys, "defect", cfg)
    kinds = {r["kind"] for r in records}
    assert kinds == {"smoothed_sign", "principal_comparison"}
    principal = next(r for r in records if r["kind"] == "principal_comparison")
    assert principal["exponent"] < -0.8
    assert code == (0 if abs(records[0]["exponent"] + 1) <= 0.05 else 1)
    assert rows[0] == ["kind", "x_id", "theta_id", "radius", "k", "mu_k"]


def test_config_defaults_and_theta_matrix():
    cfg = ExperimentConfig.from_dict({"theta": [[0, 0.1], [-0.1, 0]]}, "verify")
    assert cfg.thetas[0][0] == "custom" and cfg.thetas[0][1].entries[0, 1] == 0.1
    assert [e.id for e in cfg.elements] == ["x1", "x2", "x3"]
    sweep = ExperimentConfig.from_dict({"theta": ["zero", [[0, 0.1], [-0.1, 0]]]}, "verify")
    assert [t for t, _ in sweep.thetas] == ["zero", "theta1"]
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"elements": [{"d": 3, "coeffs": []}]}, "verify")


def test_output_key_in_config(tmp_path, capsys):
    out = tmp_path / "cal.csv"
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"radii": [8], "output": str(out)}))
    assert main(["calibrate", "--config", str(path)]) == 0
    assert out.read_text().startswith("radius,")
