"""CS/X equality conditions and the randomized invariance checks.

The conditions relating a CS state (p1..p7) to an X state (q1..q7):

    |p2| = |2(q1 + q3) - 1| / 4
    |p4| = |2(q1 + q2) - 1| / 4
    p7 = q4,   p6 = q6
    q2 + q3 = (1 - s) / 2,   s = sqrt(16(p1^2 + p3^2 + p5^2) - 8 p1 + 1)
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (CsParams, XParams, build_cs, build_x, hadamard_conjugate,
                   random_cs, random_dense, random_x, state_to_json, to_bloch)
from .geodisc import (OptimizerConfig, geometric_measure_bloch, grid_oracle,
                      lprime_case_deviation, sphere_covering)
from .models import XxzDmParams, closed_form_deviation
from .parallel import ordered_map

SIGN_CHOICES = tuple(itertools.product((1, -1), repeat=2))

# caption parameter sets (J, Jz, Dx) of the thermal XXZ figures
XXZ_CAPTION_SETS = (
    (1.0, 0.0, 1.0), (1.0, 0.4, 1.0), (1.0, 0.9, 1.0),
    (1.0, 1.0, 0.5), (1.0, 1.0, 0.7), (1.0, 1.0, 1.0),
    (1.0, 0.2, 0.5), (1.0, 0.2, 0.7), (1.0, 0.2, 1.0),
)


class DomainError(ValueError):
    pass


class Infeasible(ValueError):
    """The solved X parameters do not describe a positive state."""


@dataclass(frozen=True)
class Condition6Report:
    clause_p2: bool
    clause_p4: bool
    clause_p7q4: bool
    clause_p6q6: bool
    clause_q23: bool
    residuals: tuple[float, float, float, float, float]

    @property
    def all_hold(self) -> bool:
        return all((self.clause_p2, self.clause_p4, self.clause_p7q4,
                    self.clause_p6q6, self.clause_q23))


def bloch_radius(p: CsParams, tol: float = 1e-12) -> float:
    """s = sqrt(16(p1^2 + p3^2 + p5^2) - 8 p1 + 1); small negative
    radicands are clamped to zero."""
    rad = 16 * (p.p1**2 + p.p3**2 + p.p5**2) - 8 * p.p1 + 1
    if rad < -tol:
        raise DomainError(f"negative radicand {rad:.3e}")
    return math.sqrt(max(rad, 0.0))


def check_condition6(p: CsParams, q: XParams, tol: float = 1e-10) -> Condition6Report:
    s = bloch_radius(p, tol)
    res = (
        abs(abs(p.p2) - abs((2 * (q.q1 + q.q3) - 1) / 4)),
        abs(abs(p.p4) - abs((2 * (q.q1 + q.q2) - 1) / 4)),
        abs(p.p7 - q.q4),
        abs(p.p6 - q.q6),
        abs(q.q2 + q.q3 - (1 - s) / 2),
    )
    ok = [r <= tol for r in res]
    return Condition6Report(*ok, residuals=res)


def solve_condition6(p: CsParams, signs: tuple[int, int] = (1, 1)) -> XParams:
    """X parameters satisfying the conditions for ``p``, with the absolute
    values resolved by ``signs``. q5 = q7 = 0. Raises Infeasible when the
    solution is not a positive state."""
    s = bloch_radius(p)
    a = (1 + signs[0] * 4 * p.p2) / 2  # q1 + q3
    b = (1 + signs[1] * 4 * p.p4) / 2  # q1 + q2
    c = (1 - s) / 2                    # q2 + q3
    q = XParams(q1=(a + b - c) / 2, q2=(b + c - a) / 2, q3=(a + c - b) / 2,
                q4=p.p7, q5=0.0, q6=p.p6, q7=0.0)
    if not q.is_physical():
        raise Infeasible(f"solution {q.as_tuple()} is not positive semidefinite")
    return q


def feasible_solutions(p: CsParams) -> list[tuple[tuple[int, int], XParams]]:
    out = []
    for signs in SIGN_CHOICES:
        try:
            out.append((signs, solve_condition6(p, signs)))
        except Infeasible:
            pass
    return out


@dataclass(frozen=True)
class RInvariants:
    x_norm: tuple[float, float]
    y_norm: tuple[float, float]
    singular_values: tuple[tuple[float, ...], tuple[float, ...]]
    frobenius: tuple[float, float]
    raw_difference: np.ndarray

    @property
    def max_invariant_gap(self) -> float:
        gaps = [abs(self.x_norm[0] - self.x_norm[1]),
                abs(self.y_norm[0] - self.y_norm[1]),
                abs(self.frobenius[0] - self.frobenius[1])]
        gaps += [abs(a - b) for a, b in zip(*self.singular_values)]
        return max(gaps)


def r_invariant_report(rho_cs: np.ndarray, rho_x: np.ndarray) -> RInvariants:
    """Side-by-side G-relevant invariants of two states' Bloch forms."""
    b1, b2 = to_bloch(rho_cs), to_bloch(rho_x)
    sv1 = tuple(np.linalg.svd(b1.T, compute_uv=False))
    sv2 = tuple(np.linalg.svd(b2.T, compute_uv=False))
    return RInvariants(
        x_norm=(float(np.linalg.norm(b1.x)), float(np.linalg.norm(b2.x))),
        y_norm=(float(np.linalg.norm(b1.y)), float(np.linalg.norm(b2.y))),
        singular_values=(sv1, sv2),
        frobenius=(float(np.linalg.norm(b1.T)), float(np.linalg.norm(b2.T))),
        raw_difference=b1.R - b2.R,
    )


# -- the randomized suite ---------------------------------------------------

@dataclass
class InvarianceReport:
    samples: int
    max_hadamard_dG: float
    mean_hadamard_dG: float
    condition6_samples: int
    max_condition6_dG: float
    case1_subset_max_dG: float
    lprime_case_deviation_max: float
    closed_form_deviation_max: float
    corrected_closed_form_deviation_max: float = 0.0
    general_condition6_samples: int = 0
    oracle_samples: int = 0
    max_oracle_dG: float = 0.0
    worst: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _rng_seed(seed: int, stream: int, index: int) -> list[int]:
    # one independent stream per (purpose, sample index)
    return [seed, stream, index]


def _G(rho: np.ndarray, cfg: OptimizerConfig) -> float:
    return geometric_measure_bloch(to_bloch(rho), cfg).value


def hadamard_gap(rho: np.ndarray, cfg: OptimizerConfig) -> tuple[float, float]:
    return _G(rho, cfg), _G(hadamard_conjugate(rho), cfg)


def sample_case1(seed) -> CsParams:
    """Physical CS state with p2 = p3 = p4 = p5 = 0."""
    rng = np.random.default_rng(seed)
    p1 = rng.uniform(0.0, 0.5)
    p6 = rng.uniform(-p1, p1)
    p7 = rng.uniform(-(0.5 - p1), 0.5 - p1)
    return CsParams(p1=p1, p6=p6, p7=p7)


def case1_pair_gap(p: CsParams, cfg: OptimizerConfig):
    """(G_CS, G_X, q) for a case-1 state and its solved partner, or None if
    no sign choice gives a positive partner."""
    sols = feasible_solutions(p)
    if not sols:
        return None
    q = sols[0][1]
    return _G(build_cs(p), cfg), _G(build_x(q), cfg), q


def _hadamard_sample(task):
    seed, i, cfg = task
    rows = []
    for kind, rho in (("cs", build_cs(random_cs(_rng_seed(seed, 0, i)))),
                      ("x", build_x(random_x(_rng_seed(seed, 1, i))))):
        rows.append((kind, rho, *hadamard_gap(rho, cfg)))
    return rows


def _worst(entry: dict | None, gap: float, payload: dict) -> dict:
    if entry is None or gap > entry["dG"]:
        return {"dG": gap, **payload}
    return entry


def invariance_suite(seed: int, n_samples: int, cfg: OptimizerConfig = OptimizerConfig(),
                     n_case1: int = 50, n_general: int | None = None,
                     n_oracle: int | None = None, oracle_resolution: int = 48,
                     workers: int = 1) -> InvarianceReport:
    """Run all four parts of the invariance check; deterministic in ``seed``."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n_general = min(n_samples, 50) if n_general is None else n_general
    n_oracle = min(n_samples, 20) if n_oracle is None else n_oracle
    worst: dict = {}

    # (a) Hadamard conjugation on random CS and X states
    gaps = []
    tasks = [(seed, i, cfg) for i in range(n_samples)]
    for rows in ordered_map(_hadamard_sample, tasks, workers):
        for kind, rho, g1, g2 in rows:
            gaps.append(abs(g1 - g2))
            worst["hadamard"] = _worst(worst.get("hadamard"), gaps[-1], {
                "state": state_to_json(rho, kind), "G": g1, "G_conjugated": g2})
    max_had = max(gaps)
    mean_had = math.fsum(gaps) / len(gaps)

    # (b) case-1 states against their solved X partners
    case1 = []
    i = 0
    while len(case1) < n_case1 and i < 20 * n_case1:
        p = sample_case1(_rng_seed(seed, 2, i))
        i += 1
        out = case1_pair_gap(p, cfg)
        if out is None:
            continue
        g_cs, g_x, q = out
        case1.append(abs(g_cs - g_x))
        worst["case1"] = _worst(worst.get("case1"), case1[-1], {
            "cs": state_to_json(build_cs(p), "cs"), "x": state_to_json(build_x(q), "x"),
            "G_cs": g_cs, "G_x": g_x})

    # (c) general CS states, every feasible sign choice; measured only
    general = []
    for i in range(n_general):
        p = random_cs(_rng_seed(seed, 3, i))
        g_cs = None
        for signs, q in feasible_solutions(p):
            if g_cs is None:
                g_cs = _G(build_cs(p), cfg)
            g_x = _G(build_x(q), cfg)
            general.append(abs(g_cs - g_x))
            worst["general"] = _worst(worst.get("general"), general[-1], {
                "cs": state_to_json(build_cs(p), "cs"), "x": state_to_json(build_x(q), "x"),
                "signs": list(signs), "G_cs": g_cs, "G_x": g_x})

    # (d) fast-path l'^2 formulas and the printed thermal closed form
    directions = sphere_covering(8)
    lprime = 0.0
    for i in range(n_general):
        p = random_cs(_rng_seed(seed, 4, i))
        if i % 2 == 0:
            p = CsParams(p.p1, p.p2, 0.0, p.p4, 0.0, p.p6, p.p7)
        for l in directions:
            lprime = max(lprime, lprime_case_deviation(p, l))
    xxz = [XxzDmParams(J, Jz, Dx, T) for J, Jz, Dx in XXZ_CAPTION_SETS for T in (0.5, 1.0, 2.0)]
    closed = max(closed_form_deviation(p) for p in xxz)
    corrected = max(closed_form_deviation(p, "corrected") for p in xxz)

    # alternating optimizer against the brute-force grid
    oracle = []
    for i in range(n_oracle):
        b = to_bloch(random_dense(_rng_seed(seed, 5, i)))
        g_alt = geometric_measure_bloch(b, cfg).value
        f_grid, _ = grid_oracle(b, oracle_resolution, cfg=cfg)
        oracle.append(abs(g_alt - 0.25 * (b.total_norm_sq - f_grid)))

    return InvarianceReport(
        samples=n_samples,
        max_hadamard_dG=max_had,
        mean_hadamard_dG=mean_had,
        condition6_samples=len(case1) + len(general),
        max_condition6_dG=max(case1 + general, default=0.0),
        case1_subset_max_dG=max(case1, default=0.0),
        lprime_case_deviation_max=lprime,
        closed_form_deviation_max=closed,
        corrected_closed_form_deviation_max=corrected,
        general_condition6_samples=len(general),
        oracle_samples=n_oracle,
        max_oracle_dG=max(oracle, default=0.0),
        worst=worst,
    )


HADAMARD_BOUND = 1e-7
CASE1_BOUND = 1e-6
ORACLE_BOUND = 1e-8


def hard_checks(report: InvarianceReport) -> dict[str, bool]:
    return {
        "hadamard_invariance": report.max_hadamard_dG <= HADAMARD_BOUND,
        "case1_equality": report.case1_subset_max_dG <= CASE1_BOUND,
        "oracle_equivalence": report.max_oracle_dG <= ORACLE_BOUND,
    }
