import json
import math
import subprocess
import sys

import numpy as np
import pytest

from isqscatter.cli import main, run


def doc(argv):
    text, _, code = run(argv)
    return json.loads(text), code


def test_classify_lower_critical():
    d, code = doc(["classify", "--lambda", "-1/4"])
    assert code == 0 and d["rows"][0]["phase"] == "CRITICAL_LOWER"


@pytest.mark.parametrize("lam, phase, exp", [("1", "CSI", None), ("0", "DPI", 0.5)])
def test_classify_examples(lam, phase, exp):
    d, _ = doc(["classify", "--lambda", lam])
    assert d["rows"][0]["phase"] == phase and d["rows"][0]["exponent"] == exp


def test_schema():
    d, code = doc(["smatrix", "--nu", "0.3", "--g", "1", "--k-steps", "5"])
    assert set(d) == {"command", "params", "rows", "checks"}
    assert set(d["checks"][0]) == {"name", "value", "tolerance", "pass"}
    assert code == 0
    assert all(abs(r["abs_S"] - 1) < 1e-11 for r in d["rows"])


def test_smatrix_half_order_closed_form():
    d, _ = doc(["smatrix", "--nu", "0.5", "--kappa", "1", "--k-steps", "7"])
    for r in d["rows"]:
        k = r["k"]
        ref = -(1 - 1j * k) / (1 + 1j * k)
        assert abs(complex(r["re_S"], r["im_S"]) - ref) < 1e-14


def test_smatrix_other_sheet_differs():
    d0, _ = doc(["smatrix", "--nu", "0.3", "--kappa", "1", "--k-steps", "5"])
    d1, _ = doc(["smatrix", "--nu", "0.3", "--kappa", "1", "--k-steps", "5", "--sheet", "1"])
    assert d1["checks"] == []
    diff = max(abs(a["re_S"] - b["re_S"]) for a, b in zip(d0["rows"], d1["rows"]))
    assert diff > 1e-3
    # nu = 1/2: one full turn of k is a multiple of pi/nu, so the sheets agree
    e0, _ = doc(["smatrix", "--nu", "0.5", "--kappa", "1", "--k-steps", "5"])
    e1, _ = doc(["smatrix", "--nu", "0.5", "--kappa", "1", "--k-steps", "5", "--sheet", "1"])
    assert max(abs(a["re_S"] - b["re_S"]) for a, b in zip(e0["rows"], e1["rows"])) < 1e-13


def test_lambda_flag_sets_order():
    d, _ = doc(["smatrix", "--lambda", "0", "--k", "1"])
    assert d["params"]["nu"] == 0.5
    with pytest.raises(ValueError):
        run(["smatrix", "--lambda", "1", "--k", "1"])


def test_poles_irrational_order():
    d, code = doc(["poles", "--nu", str(1 / math.sqrt(2)), "--g", "1"])
    assert code == 0
    for r in d["rows"]:
        assert r["argument_over_pi"] == pytest.approx(0.5 + math.sqrt(2) * r["n"], abs=1e-12)


def test_poles_energy_plane_doubles():
    dk, _ = doc(["poles", "--nu", "0.4", "--g", "-1"])
    de, _ = doc(["poles", "--nu", "0.4", "--g", "-1", "--plane", "E"])
    for a, b in zip(dk["rows"], de["rows"]):
        assert b["argument"] == pytest.approx(2 * a["argument"])


def test_spectrum_verify_defaults_and_control():
    d, code = doc(["spectrum-verify", "--nu", "0.3", "--g", "1"])
    assert code == 0 and all(c["pass"] for c in d["checks"])
    d, code = doc(["spectrum-verify", "--nu", "0.3", "--g", "1", "--control-g", "3"])
    names = [c["name"] for c in d["checks"]]
    assert code == 10 + names.index("orthogonality_bound_scatt")


def test_spectrum_verify_negative_g_has_no_bound_checks():
    d, code = doc(["spectrum-verify", "--nu", "0.3", "--g", "-1"])
    assert code == 0
    assert not any("bound" in c["name"] for c in d["checks"])


def test_ab_amplitude_channels_and_clamp():
    d, code = doc(["ab-amplitude", "--alpha", "0.3", "--k", "1", "--theta-steps", "1"])
    assert [c["n"] for c in d["params"]["anomalous"]] == [0, -1]
    assert d["params"]["theta_clamp"] == 1e-3
    d, _ = doc(["ab-amplitude", "--alpha", "0.3", "--k", "1", "--theta-steps", "100000"])
    th = [r["theta"] for r in d["rows"]]
    assert min(th) >= 1e-3 and max(th) <= 2 * math.pi - 1e-3


def test_kappa_repeatable():
    d, _ = doc(["ab-cross-section", "--alpha", "0.3", "--kappa", "1", "--kappa", "2", "--k", "1", "--theta-steps", "3"])
    assert [c["kappa0"] for c in d["params"]["anomalous"]] == [1.0, 2.0]
    with pytest.raises(ValueError):
        run(["ab-cross-section", "--alpha", "0.3", "--kappa", "1", "--kappa", "2", "--kappa", "3"])


def test_resonance_scan_matches_prediction():
    d, code = doc(["resonance-scan", "--alpha", "0.01", "--g", "-1", "--kappa", "1", "--k-min", "0.5", "--k-max", "1.5"])
    assert code == 0 and len(d["rows"]) == 1
    row = d["rows"][0]
    assert abs(row["k_peak"] - row["predicted_k"]) / row["predicted_k"] < 0.02


def test_reduce_reports():
    d, code = doc(["reduce", "--masses", "1", "1", "1", "--alpha", "0.3"])
    row = d["rows"][0]
    assert code == 0
    assert row["reduced_masses"] == [0.5, 2 / 3, 3.0]
    assert row["mu0_defaulted"] is True
    assert [c["n"] for c in row["effective"]["anomalous"]] == [0, -1]


def test_csv_format():
    text, _, _ = run(["ab-cross-section", "--alpha", "0.3", "--k", "1", "--theta-steps", "2", "--format", "csv"])
    lines = text.strip().splitlines()
    assert lines[0] == "k,theta,dsigma"
    assert len(lines) == 3
    assert len(lines[1].split(",")[1].replace(".", "")) <= 12


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nu": 0.3, "g": 1.0, "k-steps": 4}))
    d, _ = doc(["smatrix", "--config", str(cfg)])
    assert len(d["rows"]) == 4 and d["params"]["nu"] == 0.3
    d, _ = doc(["smatrix", "--config", str(cfg), "--nu", "0.6"])
    assert d["params"]["nu"] == 0.6
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        run(["smatrix", "--config", str(cfg)])


def test_out_file_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert main(["classify", "--lambda", "0", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "classify"
    assert main(["classify"]) == 2
    assert "lambda" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["nosuchcommand"])
    assert e.value.code == 2


def test_nan_becomes_null():
    from isqscatter.cli import render_json

    assert json.loads(render_json({"x": float("nan"), "y": np.float64(math.inf)})) == {"x": None, "y": None}


def test_threads_env_same_output(monkeypatch):
    argv = ["ab-cross-section", "--alpha", "0.3", "--k-min", "0.5", "--k-max", "2", "--k-steps", "6", "--theta-steps", "5"]
    serial = run(argv)[0]
    monkeypatch.setenv("ISQ_SCATTER_THREADS", "4")
    assert run(argv)[0] == serial
    monkeypatch.setenv("ISQ_SCATTER_THREADS", "x")
    with pytest.raises(ValueError):
        run(argv)


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "isqscatter", "poles", "--nu", "0.37", "--g", "2", "--plane", "E"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
