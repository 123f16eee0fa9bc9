import csv
import json

import numpy as np
import pytest

from quasijump.circle_space import FourierSeries, random_fourier_series
from quasijump.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, ExperimentConfig, UsageError, run


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    h = random_fourier_series(16, np.random.default_rng(7))
    (tmp_path / "h.json").write_text(json.dumps(h.to_json()))
    (tmp_path / "grid.json").write_text(json.dumps([[0.2, 0.1], [2.0, -1.0]]))
    return tmp_path


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_selftest_circle(capsys):
    assert run(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0 failure(s)" in out
    assert out.count("PASS") == 7


def test_faber_csv(workdir):
    assert run(["faber", "--curve", "perturbed:0.2,0,2", "--n-max", "4"]) == EXIT_OK
    rows = read_csv(workdir / "grunsky.csv")
    assert list(rows[0]) == ["n", "k", "beta_re", "beta_im"]
    first = {(int(r["n"]), int(r["k"])): complex(float(r["beta_re"]), float(r["beta_im"]))
             for r in rows}
    assert first[1, 0] == pytest.approx(-0.2, abs=1e-14)
    assert first[1, 1] == pytest.approx(0.04, abs=1e-14)
    assert max(n for n, _ in first) == 4


def test_decompose(workdir):
    assert run(["decompose", "--curve", "ellipse:1.2,0.8", "--input", "h.json"]) == EXIT_OK
    data = json.loads((workdir / "result.json").read_text())
    assert data["residual"] <= 1e-6
    assert {"u_plus", "u_minus", "norms", "diagnostics"} <= set(data)


def test_decompose_tolerance_breach(workdir):
    assert run(["decompose", "--input", "h.json", "--tol", "1e-30", "--out", "r.json"]) == EXIT_TOLERANCE
    assert (workdir / "r.json").exists()


def test_reflect(workdir):
    assert run(["reflect", "--curve", "perturbed:0.2,0,2", "--input", "h.json",
                "--output", "hr.json"]) == EXIT_OK
    FourierSeries.from_json((workdir / "hr.json").read_text())


def test_jump_trace_csv(workdir):
    assert run(["jump", "--curve", "ellipse:1.2,0.8", "--input", "h.json", "--points",
                "grid.json", "--r-max-k", "10", "--out", "trace.csv"]) == EXIT_OK
    rows = read_csv(workdir / "trace.csv")
    assert list(rows[0]) == ["z_re", "z_im", "r", "value_re", "value_im", "extrapolated_re",
                             "extrapolated_im", "err_est"]
    assert len(rows) == 2 * 8


def test_jump_is_deterministic(workdir):
    for name in ("a.csv", "b.csv"):
        assert run(["jump", "--curve", "perturbed:0.2,0,2", "--seed", "3", "--N", "8",
                    "--points", "grid.json", "--out", name]) == EXIT_OK
    assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()


def test_norms_with_figure(workdir):
    assert run(["norms", "--curve", "perturbed:0.2,0,2", "--truncations", "8,16",
                "--figure", "norms.png"]) == EXIT_OK
    rows = read_csv(workdir / "norms.csv")
    assert [int(r["N"]) for r in rows] == [8, 16]
    assert (workdir / "norms.png").stat().st_size > 0


def test_convergence_with_figure(workdir):
    assert run(["convergence", "--curve", "ellipse:1.2,0.8", "--points", "grid.json",
                "--figure", "conv.png"]) == EXIT_OK
    rows = read_csv(workdir / "convergence.csv")
    assert rows[0]["k"] == "3"
    assert (workdir / "conv.png").exists()


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["decompose", "--curve", "square"],
    ["decompose", "--input", "missing.json"],
    ["decompose", "--input", "bad.json"],
    ["decompose", "--N", "0"],
    ["jump", "--points", "badgrid.json"],
    ["norms", "--truncations", "8,x"],
    ["decompose", "--curve", "file:nowhere.json"],
])
def test_usage_errors(workdir, argv, capsys):
    (workdir / "bad.json").write_text("{not json")
    (workdir / "badgrid.json").write_text(json.dumps({"z": 1}))
    assert run(argv) == EXIT_USAGE
    err = capsys.readouterr().err.strip()
    assert err.startswith("quasijump: error:")
    assert "\n" not in err


def test_thread_env(workdir, monkeypatch):
    monkeypatch.setenv("QUASIJUMP_THREADS", "1")
    assert run(["faber", "--n-max", "2"]) == EXIT_OK
    monkeypatch.setenv("QUASIJUMP_THREADS", "zero")
    assert run(["faber", "--n-max", "2"]) == EXIT_USAGE


def test_config_validation():
    with pytest.raises(UsageError):
        ExperimentConfig("circle", 16, 12, -1.0, 0)
    assert ExperimentConfig("circle", 16, 12, 1e-6, 0).N == 16
