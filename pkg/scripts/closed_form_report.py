"""Largest gap between the XXZ+DM closed-form matrix and exp(-beta H)/Z
for each caption parameter set, for both closed-form variants."""
import numpy as np

from qcg.invariance import XXZ_CAPTION_SETS
from qcg.models import XxzDmParams, closed_form_deviation

if __name__ == "__main__":
    temps = np.linspace(0.05, 5.0, 100)
    print(f"{'J':>4} {'Jz':>5} {'Dx':>5} {'printed':>12} {'corrected':>12}")
    for J, Jz, Dx in XXZ_CAPTION_SETS:
        dev = {v: max(closed_form_deviation(XxzDmParams(J, Jz, Dx, float(T)), v) for T in temps)
               for v in ("printed", "corrected")}
        print(f"{J:>4g} {Jz:>5g} {Dx:>5g} {dev['printed']:>12.3e} {dev['corrected']:>12.3e}")
