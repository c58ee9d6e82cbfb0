import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from catgen import analytic
from catgen.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, load_config, main, parse_sweep, UsageError
from catgen.presets import PRESETS, preset_names

from conftest import preset_params


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def test_fig2_matches_analytic(tmp_path):
    assert main(["simulate", "--preset", "fig2", "--out", str(tmp_path)]) == EXIT_OK
    header, data = read_csv(tmp_path / "entanglement.csv")
    assert header == ["gt", "S", "N"]
    assert data[0, 0] == 0 and data[-1, 0] == pytest.approx(26.0)
    sol = analytic.rwa_solution(preset_params("fig2"))
    for t, s, n in data[:: 97]:
        assert s == analytic.entropy(sol, t)
        assert n == analytic.log_negativity_closed(sol, t)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["preset"] == "fig2" and not manifest["partial"]
    assert manifest["points"][0]["params"]["xi"] == 1.5271


def test_fig6_writes_tomography_files(tmp_path):
    assert main(["simulate", "--preset", "fig6", "--out", str(tmp_path)]) == EXIT_OK
    for name in ("wigner_plus.csv", "wigner_minus.csv", "quad_plus.csv", "quad_minus.csv"):
        assert (tmp_path / name).exists()
    header, w = read_csv(tmp_path / "wigner_minus.csv")
    assert header == ["beta_re", "beta_im", "W"]
    assert w.shape == (141 * 141, 3)
    header, q = read_csv(tmp_path / "quad_plus.csv")
    assert header == ["X", "P"]
    assert abs(np.trapezoid(q[:, 1], q[:, 0]) - 1) < 1e-3


def test_sweep_creates_one_directory_per_point(tmp_path):
    code = main(["simulate", "--preset", "fig8a", "--sweep", "gamma_q=0.01,0.05,0.1",
                 "--workers", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    dirs = sorted(p.name for p in tmp_path.iterdir() if p.is_dir())
    assert dirs == ["gamma_q=0.01", "gamma_q=0.05", "gamma_q=0.1"]
    for d in dirs:
        assert (tmp_path / d / "fidelity.csv").exists()
        assert (tmp_path / d / "probabilities.csv").exists()


def test_unknown_preset_and_parameter_are_usage_errors(tmp_path, capsys):
    assert main(["simulate", "--preset", "fig99", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "fig2" in capsys.readouterr().err
    assert main(["simulate", "--preset", "fig2", "--sweep", "bogus=1,2", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "gamma_q" in capsys.readouterr().err
    assert main(["simulate", "--preset", "fig2", "--sweep", "gamma_q", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["simulate", "--preset", "fig3a_w200", "--sweep", "gamma_q=0.1", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "kind = open" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["simulate"])
    assert info.value.code == EXIT_USAGE


def test_invariant_violation_exit_code(tmp_path, capsys):
    code = main(["simulate", "--preset", "fig3a_w200", "--step", "0.05", "--out", str(tmp_path)])
    assert code == EXIT_INVARIANT
    assert "invariant violation" in capsys.readouterr().err
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["partial"] is True
    assert manifest["points"][0]["status"] == "failed"


def test_config_file(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[system]\npreset = fig3a_w200\ngamma_q = 0\nkind = closed\n\n"
        "[integrator]\nt_end = 1.0\nn_d = 12\nsample_interval = 0.25\n\n"
        "[output]\nobservables = mean_excitation, fidelity\n"
    )
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    assert sorted(p.name for p in out.glob("*.csv")) == ["fidelity.csv", "mean_excitation.csv"]
    _, data = read_csv(out / "mean_excitation.csv")
    assert list(data[:, 0]) == [0.0, 0.25, 0.5, 0.75, 1.0]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["points"][0]["integrator"]["n_d"] == 12


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[physics]\nxi = 1\n")
    with pytest.raises(UsageError):
        load_config(bad)
    with pytest.raises(UsageError):
        load_config(tmp_path / "missing.ini")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_USAGE


def test_parse_sweep():
    assert parse_sweep(["gamma_q=0.01, 0.05", "nbar_r=1,2"]) == {
        "gamma_q": [0.01, 0.05], "nbar_r": [1.0, 2.0]
    }
    with pytest.raises(UsageError):
        parse_sweep(["gamma_q="])


def test_list_presets(capsys):
    assert main(["list-presets"]) == EXIT_OK
    text = capsys.readouterr().out
    names = [line.split()[0] for line in text.splitlines() if line and not line.startswith(" ")]
    assert names == preset_names()
    assert names.index("fig2") < names.index("fig3a_w30") < names.index("fig10a")
    expected = {"fig2", "fig5", "fig6", "experiment"}
    expected |= {f"fig3a_w{w}" for w in (30, 50, 200)}
    expected |= {f"fig{n}{c}" for n in (7, 8, 9, 11) for c in "abcd"}
    expected |= {f"fig10{c}" for c in "abcdefghijkl"}
    assert set(names) == expected
    exp = text[text.index("experiment"):]
    assert "2pi x 58 MHz" in exp
    assert f"omega_r={58 / 2.3:.6g}" in exp
    main(["list-presets"])
    assert capsys.readouterr().out == text


def test_repeat_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["simulate", "--preset", "fig6", "--out", str(d)]) == EXIT_OK
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "catgen", "list-presets"], capture_output=True, text=True)
    assert proc.returncode == 0 and "fig11d" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "catgen", "simulate", "--preset", "nope",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
