"""Acceptance gate. Each test carries the number of the criterion it
checks; the summary hook in conftest prints one line per criterion."""
import json
import math

import numpy as np
import pytest

from qcg.cli import main
from qcg.core import (MAXIMALLY_MIXED, PHI_PLUS, REVERSAL, build_cs, build_x, extract_cs,
                      extract_x, from_bloch, hadamard_conjugate, product_state, random_cs,
                      random_dense, random_x, to_bloch, validate, werner)
from qcg.geodisc import (MeasurementAxes, OptimizerConfig, geometric_measure,
                         geometric_measure_bloch, grid_oracle, hs_distance_sq, micc,
                         objective)
from qcg.invariance import (XXZ_CAPTION_SETS, case1_pair_gap, feasible_solutions,
                            hadamard_gap, sample_case1)
from qcg.models import (NanoporeParams, XxzDmParams, closed_form_deviation,
                        nanopore_state, xxz_thermal)

CFG = OptimizerConfig()
ORACLE = OptimizerConfig(sphere_grid=48)


def criterion(n, title):
    return pytest.mark.criterion(n, title)


def _oracle_G(rho):
    return geometric_measure(rho, ORACLE, method="grid_polished").value


@criterion(1, "Hadamard invariance, 500 CS + 500 X, <= 1e-7")
def test_hadamard_invariance():
    gaps = []
    for i in range(500):
        for rho in (build_cs(random_cs([42, 0, i])), build_x(random_x([42, 1, i]))):
            g, gh = hadamard_gap(rho, CFG)
            gaps.append(abs(g - gh))
    assert len(gaps) == 1000
    print(f"max Hadamard dG = {max(gaps):.3e}")
    assert max(gaps) <= 1e-7


@criterion(2, "alternating optimizer vs grid oracle, 100 dense states, <= 1e-8")
def test_oracle_equivalence():
    worst = 0.0
    for i in range(100):
        b = to_bloch(random_dense([42, 2, i]))
        g_alt = geometric_measure_bloch(b, CFG).value
        f, _ = grid_oracle(b, resolution=48, polish=True)
        g_grid = 0.25 * (b.total_norm_sq - f)
        worst = max(worst, abs(g_alt - g_grid))
    print(f"max oracle dG = {worst:.3e}")
    assert worst <= 1e-8


@criterion(3, "Bloch objective equals HS distance to the measured state, <= 1e-10")
def test_objective_consistency():
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(1000):
        rho = random_dense([42, 3, i])
        axes = MeasurementAxes.normalized(rng.standard_normal(3), rng.standard_normal(3))
        direct = hs_distance_sq(rho, micc(rho, axes))
        worst = max(worst, abs(objective(to_bloch(rho), axes) - direct))
    assert worst <= 1e-10


@criterion(4, "closed values through the grid oracle")
def test_closed_values():
    assert abs(_oracle_G(PHI_PLUS) - 0.5) <= 1e-8
    for w in (0.2, 0.5, 0.8):
        assert abs(_oracle_G(werner(w)) - w * w / 2) <= 1e-8
    assert abs(_oracle_G(MAXIMALLY_MIXED)) <= 1e-10
    assert abs(_oracle_G(np.diag([0.5, 0, 0, 0.5]).astype(complex))) <= 1e-10
    angles = [(t, p) for t in np.linspace(0, np.pi, 5) for p in np.linspace(0, 2 * np.pi, 5)]
    dirs = [np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])
            for t, p in angles]
    assert len(dirs) == 25
    for i, a in enumerate(dirs):
        b = dirs[(7 * i + 3) % 25]
        assert abs(_oracle_G(product_state(a, b))) <= 1e-10


@criterion(5, "case-1 CS/X partners share G within 1e-6")
def test_case1_equality():
    from qcg.core import CsParams
    p = CsParams(p1=0.3, p6=0.1, p7=0.05)
    g_cs, g_x, q = case1_pair_gap(p, CFG)
    assert abs(g_cs - 0.0125) <= 1e-6 and abs(g_x - 0.0125) <= 1e-6
    worst, n = 0.0, 0
    seed = 0
    while n < 50:
        res = case1_pair_gap(sample_case1([42, 5, seed]), CFG)
        seed += 1
        if res is None:
            continue
        worst = max(worst, abs(res[0] - res[1]))
        n += 1
    print(f"max case-1 dG over {n} states = {worst:.3e}")
    assert worst <= 1e-6


@pytest.mark.parametrize("D", [0.001, 1.0])
@criterion(6, "nanopore sweeps: invariants and limits")
def test_nanopore_sweep(D):
    a = 1.5 * D
    for t in np.linspace(0, 2 * math.pi / a, 51):
        for beta in np.linspace(0.01, 5.0, 51):
            rho = nanopore_state(NanoporeParams(100, D, float(t), float(beta)))
            r = validate(rho)
            assert r.cs_defect <= 1e-14 and r.min_eigenvalue >= -1e-10 and r.is_valid
            assert geometric_measure(rho, CFG).value >= 0
        rho = nanopore_state(NanoporeParams(100, D, float(t), 1e-6))
        assert geometric_measure(rho, CFG).value <= 1e-9
    rho = nanopore_state(NanoporeParams(100, D, 0.0, 20.0))
    assert geometric_measure(rho, CFG).value <= 1e-4


@criterion(7, "XXZ+DM thermal states: invariants, high-T limit, closed-form report")
def test_xxz_model():
    report = {}
    for J, Jz, Dx in XXZ_CAPTION_SETS:
        for T in np.linspace(0.05, 5.0, 100):
            rho = xxz_thermal(XxzDmParams(J, Jz, Dx, float(T)))
            assert validate(rho).is_valid
            assert np.max(np.abs(rho - REVERSAL @ rho @ REVERSAL)) <= 1e-12
            assert geometric_measure(rho, CFG).value >= 0
        assert geometric_measure(xxz_thermal(XxzDmParams(J, Jz, Dx, 1e4)), CFG).value <= 1e-6
        report[f"J={J:g},Jz={Jz:g},Dx={Dx:g}"] = {
            variant: max(closed_form_deviation(XxzDmParams(J, Jz, Dx, float(T)), variant)
                         for T in np.linspace(0.05, 5.0, 100))
            for variant in ("printed", "corrected")}
    print("closed-form deviation:", json.dumps(report, indent=1))
    assert len(report) == len(XXZ_CAPTION_SETS)


@criterion(8, "round trips within 1e-12, Hadamard involution within 1e-14")
def test_round_trips():
    for i in range(200):
        p, q = random_cs([42, 8, i]), random_x([42, 9, i])
        assert np.max(np.abs(np.subtract(extract_cs(build_cs(p)).as_tuple(), p.as_tuple()))) <= 1e-12
        assert np.max(np.abs(np.subtract(extract_x(build_x(q)).as_tuple(), q.as_tuple()))) <= 1e-12
        rho = random_dense([42, 10, i])
        assert np.max(np.abs(from_bloch(to_bloch(rho)) - rho)) <= 1e-12
        assert np.max(np.abs(hadamard_conjugate(hadamard_conjugate(rho)) - rho)) <= 1e-14


@criterion(9, "verify and sweep output byte-identical across runs and thread counts")
def test_determinism(tmp_path):
    outs = []
    for i, threads in enumerate(("1", "1", "3")):
        path = tmp_path / f"v{i}.json"
        code = main(["verify", "--seed", "42", "--samples", "20", "--threads", threads,
                     "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    sweeps = []
    for i, threads in enumerate(("1", "1", "4")):
        path = tmp_path / f"s{i}.csv"
        assert main(["sweep", "--figure", "2", "--steps", "9", "--threads", threads,
                     "--out", str(path)]) == 0
        sweeps.append(path.read_bytes())
    assert sweeps[0] == sweeps[1] == sweeps[2]
