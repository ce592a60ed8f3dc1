"""Write the CSV sweeps behind the five figure analogs into a directory.

    python3 scripts/reproduce_figures.py --out figures/ [--steps 51] [--threads 4]
"""
import argparse
import sys
from pathlib import Path

from qcg.cli import main


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--steps", type=int, default=51)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    extra = ["--threads", str(args.threads)] if args.threads else []
    for fig in range(1, 6):
        # curves 3-5 span one axis only, so use the finer default there
        steps = args.steps if fig <= 2 else max(args.steps, 100)
        code = main(["sweep", "--figure", str(fig), "--steps", str(steps),
                     "--out", str(out / f"fig{fig}.csv"), *extra])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
