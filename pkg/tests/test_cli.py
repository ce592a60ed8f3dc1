import csv
import json

import numpy as np
import pytest

from qcg.cli import (EXIT_FAIL, EXIT_INPUT, EXIT_INVALID, EXIT_OK, Axis, SweepSpec,
                     build_parser, build_sweep_specs, main, run_sweep)
from qcg.core import (MAXIMALLY_MIXED, PHI_PLUS, CsParams, build_cs, extract_x,
                      state_from_json, state_to_json)
from qcg.geodisc import OptimizerConfig


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def _compute(capsys, path, *extra):
    code = main(["compute", "--in", path, *extra])
    return code, capsys.readouterr()


def test_compute_phi_plus(tmp_path, capsys):
    path = _write(tmp_path / "s.json", state_to_json(PHI_PLUS, "cs"))
    code, out = _compute(capsys, path)
    assert code == EXIT_OK
    doc = json.loads(out.out)
    assert doc["G"] == pytest.approx(0.5, abs=1e-10)
    assert len(doc["k"]) == 3 and doc["method"] == "alternating"


def test_compute_grid_method(tmp_path, capsys):
    path = _write(tmp_path / "s.json", state_to_json(MAXIMALLY_MIXED, "dense"))
    code, out = _compute(capsys, path, "--method", "grid")
    assert code == EXIT_OK
    doc = json.loads(out.out)
    assert abs(doc["G"]) <= 1e-12 and doc["method"] == "grid_polished"


def test_compute_model_document(tmp_path, capsys):
    path = _write(tmp_path / "m.json", {"model": "xxzdm", "J": 1, "Jz": 0.2, "Dx": 0.7, "T": 1})
    code, out = _compute(capsys, path)
    assert code == EXIT_OK and json.loads(out.out)["G"] > 0


def test_compute_rejects_bad_trace(tmp_path, capsys):
    path = _write(tmp_path / "s.json", state_to_json(0.9 * MAXIMALLY_MIXED, "dense"))
    code, out = _compute(capsys, path)
    assert code == EXIT_INVALID and "invalid state" in out.err


def test_compute_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _compute(capsys, str(bad))[0] == EXIT_INPUT
    assert _compute(capsys, _write(tmp_path / "k.json", {"kind": "nope"}))[0] == EXIT_INPUT
    assert _compute(capsys, str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_transform_cs_to_x(tmp_path):
    src = _write(tmp_path / "s.json", state_to_json(PHI_PLUS, "cs"))
    out = tmp_path / "o.json"
    assert main(["transform", "--in", src, "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["kind"] == "x"
    q = extract_x(state_from_json(doc))
    assert q.q1 == pytest.approx(0.5) and q.q4 == pytest.approx(0.5)


def test_transform_twice_returns_input(tmp_path):
    rho = build_cs(CsParams(0.3, 0.02, 0.01, -0.03, 0.015, 0.1, 0.05))
    src = _write(tmp_path / "s.json", state_to_json(rho, "cs"))
    mid, back = tmp_path / "m.json", tmp_path / "b.json"
    assert main(["transform", "--in", src, "--out", str(mid)]) == EXIT_OK
    assert json.loads(mid.read_text())["kind"] == "x"
    assert main(["transform", "--in", str(mid), "--out", str(back)]) == EXIT_OK
    doc = json.loads(back.read_text())
    assert doc["kind"] == "cs"
    assert np.max(np.abs(state_from_json(doc) - rho)) <= 1e-14


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_sweep_model_grid(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["sweep", "--model", "nanopore", "--param", "D=1",
                 "--axis", "t:0:1:3", "--axis", "beta:0.000001:2:4", "--out", str(out),
                 "--restarts", "4"])
    assert code == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["t", "beta", "G", "flag"]
    assert len(rows) == 1 + 12
    assert all(r[3] == "0" for r in rows[1:])
    low_beta = [float(r[2]) for r in rows[1:] if float(r[1]) == 1e-6]
    assert len(low_beta) == 3 and max(low_beta) <= 1e-9


def test_sweep_figure_files(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["sweep", "--figure", "3", "--steps", "5", "--out", str(out)]) == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig3_Jz0.4.csv", "fig3_Jz0.9.csv", "fig3_Jz0.csv"]
    rows = _rows(tmp_path / "fig3_Jz0.csv")
    assert rows[0] == ["T", "G", "flag"] and len(rows) == 6


@pytest.mark.parametrize("argv", [
    ["--model", "nanopore", "--axis", "t:0"],
    ["--model", "nanopore", "--axis", "x:0:1"],
    ["--model", "nanopore", "--param", "D"],
    ["--model", "xxzdm", "--axis", "T:0:1:3"],
    ["--model", "xxzdm", "--axis", "Jz:0:1:3"],
])
def test_sweep_rejects_bad_specs(tmp_path, argv, capsys):
    assert main(["sweep", *argv, "--out", str(tmp_path / "s.csv")]) == EXIT_INPUT
    assert "error" in capsys.readouterr().err


def test_sweep_needs_a_source(tmp_path):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--out", str(tmp_path / "x.csv")])


def test_run_sweep_thread_independent():
    spec = SweepSpec("xxzdm", {"J": 1.0, "Dx": 0.7}, [Axis("T", 0.1, 3.0, 6), Axis("Jz", 0, 1, 3)], None)
    cfg = OptimizerConfig(restarts=4)
    assert run_sweep(spec, cfg, workers=1) == run_sweep(spec, cfg, workers=3)


def test_figure_axis_override(tmp_path):
    args = build_parser().parse_args(["sweep", "--figure", "1", "--axis", "beta:1:2:3",
                                      "--out", str(tmp_path / "f.csv")])
    (spec,) = build_sweep_specs(args)
    assert [a.name for a in spec.axes] == ["t", "beta"]
    assert spec.axes[1].values().tolist() == [1.0, 1.5, 2.0]


def test_verify_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["verify", "--seed", "5", "--samples", "4", "--no-oracle"]
    assert main([*base, "--out", str(a)]) == EXIT_OK
    assert main([*base, "--out", str(b), "--threads", "2"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["passed"] and doc["seed"] == 5
    assert "PASS hadamard_invariance" in capsys.readouterr().err


def test_verify_rejects_zero_samples(capsys):
    assert main(["verify", "--samples", "0"]) == EXIT_INPUT


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_verify_weak_optimizer_exit_code(tmp_path):
    code = main(["verify", "--seed", "1", "--samples", "3", "--no-oracle",
                 "--restarts", "1", "--out", str(tmp_path / "r.json")])
    assert code in (EXIT_OK, EXIT_FAIL)
