"""Command-line front end.

    qcg compute --in state.json [--method auto|grid|alternating]
    qcg transform --in state.json --out conjugated.json
    qcg sweep --figure 1 --out fig1.csv [--steps 51]
    qcg sweep --model xxzdm --param J=1 --param Dx=1 --axis T:0.05:5 --axis Jz:0:1 --out s.csv
    qcg verify --seed 42 --samples 100 [--out report.json]

Exit codes: 0 ok, 1 verification failure, 2 invalid input,
3 state fails validation, 4 optimizer did not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (InvalidState, check_state, detect_kind, hadamard_conjugate,
                   state_from_json, state_to_json)
from .geodisc import NoConvergence, OptimizerConfig, geometric_measure
from .invariance import hard_checks, invariance_suite
from .models import NanoporeParams, XxzDmParams, model_state, nanopore_state, xxz_thermal
from .parallel import default_workers, ordered_map

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INVALID, EXIT_NOCONV = 0, 1, 2, 3, 4


class SpecError(ValueError):
    pass


def _sig(v: float, digits: int = 12) -> float:
    return float(f"{v:.{digits}g}")


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None


def load_state(path: str) -> tuple[np.ndarray, str]:
    """Matrix and kind from a state or model-parameter document."""
    doc = _load_json(path)
    try:
        if isinstance(doc, dict) and "model" in doc:
            return model_state(doc), "dense"
        return state_from_json(doc), doc["kind"]
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InvalidState):
            raise
        raise SpecError(str(exc)) from None


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, sphere_grid=args.grid_res)


# -- compute / transform ------------------------------------------------------

def cmd_compute(args) -> int:
    rho, _ = load_state(args.inp)
    rho = check_state(rho)
    method = {"auto": "alternating", "alternating": "alternating",
              "grid": "grid_polished"}[args.method]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergence)
        res = geometric_measure(rho, _config(args), method=method)
    out = {
        "G": _sig(res.value),
        "k": [_sig(v) for v in res.axes.k],
        "l": [_sig(v) for v in res.axes.l],
        "method": res.method,
        "iterations": res.iterations,
    }
    print(json.dumps(out))
    if not res.converged:
        print("error: optimizer did not converge", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def cmd_transform(args) -> int:
    rho, kind = load_state(args.inp)
    rho = check_state(rho)
    out = hadamard_conjugate(rho)
    # prefer the opposite pattern so a CS input comes back labelled as X
    prefer = {"cs": ("x", "cs"), "x": ("cs", "x")}.get(kind, ("x", "cs"))
    out_kind = detect_kind(out, prefer)
    Path(args.out).write_text(json.dumps(state_to_json(out, out_kind), indent=2) + "\n")
    return EXIT_OK


# -- sweep ------------------------------------------------------------------

MODEL_DEFAULTS = {
    "nanopore": {"N": 100.0, "D": 1.0, "t": 0.0, "beta": 1.0},
    "xxzdm": {"J": 1.0, "Jz": 0.0, "Dx": 1.0, "T": 1.0},
}
DEFAULT_STEPS = 101


@dataclass
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass
class SweepSpec:
    model: str
    fixed: dict
    axes: list[Axis]
    out: Path
    flags: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.model not in MODEL_DEFAULTS:
            raise SpecError(f"unknown model {self.model!r}")
        names = [a.name for a in self.axes]
        if not 1 <= len(names) <= 2 or len(set(names)) != len(names):
            raise SpecError("a sweep needs one or two distinct axes")
        if self.model == "nanopore":
            if not set(names) <= {"t", "beta"}:
                raise SpecError("nanopore axes must be among: t, beta")
        else:
            if "T" not in names or not set(names) <= {"T", "Jz", "Dx"}:
                raise SpecError("xxzdm axes must be T plus optionally one of Jz, Dx")
        for a in self.axes:
            if a.steps < 2 or not a.lo < a.hi:
                raise SpecError(f"axis {a.name}: need min < max and steps >= 2")
        unknown = set(self.fixed) - set(MODEL_DEFAULTS[self.model])
        if unknown:
            raise SpecError(f"unknown parameters {sorted(unknown)} for {self.model}")
        if self.model == "nanopore":
            n = self.fixed.get("N", 100)
            if n != int(n) or n < 2:
                raise SpecError("N must be an integer >= 2")
        if self.model == "xxzdm" and "T" in self.fixed and self.fixed["T"] <= 0:
            raise SpecError("T must be positive")
        if self.model == "xxzdm":
            t_axis = next(a for a in self.axes if a.name == "T")
            if t_axis.lo <= 0:
                raise SpecError("temperature axis must stay positive")
        else:
            b_axis = [a for a in self.axes if a.name == "beta"]
            if b_axis and b_axis[0].lo < 0:
                raise SpecError("beta axis must be nonnegative")


def _cell_state(model: str, p: dict) -> np.ndarray:
    if model == "nanopore":
        return nanopore_state(NanoporeParams(N=int(p["N"]), D=p["D"], t=p["t"], beta=p["beta"]))
    return xxz_thermal(XxzDmParams(J=p["J"], Jz=p["Jz"], Dx=p["Dx"], T_temp=p["T"]))


def _sweep_cell(task) -> tuple[float, int]:
    model, params, cfg = task
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergence)
        res = geometric_measure(_cell_state(model, params), cfg)
    return res.value, 0 if res.converged else 1


def run_sweep(spec: SweepSpec, cfg: OptimizerConfig, workers: int | None = None) -> str:
    """Evaluate G over the grid and return the CSV text (row-major order)."""
    spec.validate()
    base = {**MODEL_DEFAULTS[spec.model], **spec.fixed}
    grids = [a.values() for a in spec.axes]
    points = [(v,) for v in grids[0]] if len(grids) == 1 else \
        [(v, w) for v in grids[0] for w in grids[1]]
    tasks = [(spec.model, {**base, **{a.name: float(v) for a, v in zip(spec.axes, pt)}}, cfg)
             for pt in points]
    results = ordered_map(_sweep_cell, tasks, workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([a.name for a in spec.axes] + ["G", "flag"])
    for pt, (g, flag) in zip(points, results):
        w.writerow([_fmt(v) for v in pt] + [_fmt(g), flag])
    return buf.getvalue()


def figure_specs(fig: int, out: Path, steps: int) -> list[SweepSpec]:
    """Caption parameter sets for the five figures; one spec per curve."""
    def named(suffix: str) -> Path:
        return out.with_name(f"{out.stem}_{suffix}{out.suffix or '.csv'}")

    if fig in (1, 2):
        D = 0.001 if fig == 1 else 1.0
        a = 1.5 * D
        return [SweepSpec("nanopore", {"N": 100.0, "D": D},
                          [Axis("t", 0.0, 2 * math.pi / a, steps),
                           Axis("beta", 0.01, 5.0, steps)], out)]
    curves = {
        3: ("Jz", {"J": 1.0, "Dx": 1.0}, (0.0, 0.4, 0.9)),
        4: ("Dx", {"J": 1.0, "Jz": 1.0}, (0.5, 0.7, 1.0)),
        5: ("Dx", {"J": 1.0, "Jz": 0.2}, (0.5, 0.7, 1.0)),
    }
    if fig not in curves:
        raise SpecError("figure must be 1..5")
    name, fixed, values = curves[fig]
    return [SweepSpec("xxzdm", {**fixed, name: v}, [Axis("T", 0.05, 5.0, steps)],
                      named(f"{name}{v:g}"))
            for v in values]


def _parse_axis(text: str, steps: int) -> Axis:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise SpecError(f"axis must be NAME:MIN:MAX[:STEPS], got {text!r}")
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]),
                    int(parts[3]) if len(parts) == 4 else steps)
    except ValueError:
        raise SpecError(f"bad axis {text!r}") from None


def _parse_param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise SpecError(f"parameter must be NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise SpecError(f"bad parameter value {text!r}") from None


def build_sweep_specs(args) -> list[SweepSpec]:
    steps = args.steps or DEFAULT_STEPS
    out = Path(args.out)
    axes = [_parse_axis(a, steps) for a in args.axis or []]
    fixed = dict(_parse_param(p) for p in args.param or [])
    if args.figure is not None:
        specs = figure_specs(args.figure, out, steps)
        overrides = {a.name: a for a in axes}
        for s in specs:
            s.axes = [overrides.get(a.name, a) for a in s.axes]
            s.fixed.update(fixed)
        return specs
    if args.model is None:
        raise SpecError("sweep needs --figure or --model")
    return [SweepSpec(args.model, fixed, axes, out)]


def cmd_sweep(args) -> int:
    specs = build_sweep_specs(args)
    for s in specs:
        s.validate()
    for s in specs:
        text = run_sweep(s, _config(args), args.threads)
        s.out.parent.mkdir(parents=True, exist_ok=True)
        s.out.write_text(text)
        print(f"wrote {s.out}", file=sys.stderr)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def verify_report(seed: int, samples: int, cfg: OptimizerConfig, oracle: bool = True,
                  workers: int | None = 1) -> dict:
    report = invariance_suite(seed, samples, cfg, n_oracle=None if oracle else 0,
                              workers=workers if workers is not None else default_workers())
    hard = hard_checks(report)
    if not oracle:
        hard.pop("oracle_equivalence")
    return {"seed": seed, "report": report.to_json(), "hard": hard,
            "passed": all(hard.values())}


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise SpecError("--samples must be >= 1")
    doc = verify_report(args.seed, args.samples, _config(args), oracle=not args.no_oracle,
                        workers=args.threads)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for name, ok in doc["hard"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


# -- entry point --------------------------------------------------------------

def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--grid-res", type=int, default=24)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcg", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="geometric measure of one state")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--method", choices=("auto", "grid", "alternating"), default="auto")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("transform", help="Hadamard-conjugate a state")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("sweep", help="G over a parameter grid, written as CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--figure", type=int, choices=range(1, 6))
    src.add_argument("--model", choices=tuple(MODEL_DEFAULTS))
    p.add_argument("--axis", action="append", help="NAME:MIN:MAX[:STEPS]")
    p.add_argument("--param", action="append", help="NAME=VALUE")
    p.add_argument("--steps", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="randomized invariance checks")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--no-oracle", action="store_true",
                   help="skip the grid-oracle comparison")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidState as exc:
        print(f"error: invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
