"""One statement, three unrelated systems.

The return law, pushed through the forward transform of the system's index,
matches the hitting law - on a heavy-tailed renewal tower (alpha = 1/2,
infinite measure), on Boole's map of the real line (alpha = 1/2, infinite
measure, smooth dynamics), and on the doubling map (alpha = 1, finite
measure, classical integrated-tail transform).
"""

import numpy as np

from hittimes.laws import exponential, halpha
from hittimes.systems import (
    BooleMap,
    DoublingMap,
    DyadicInterval,
    IntervalInY,
    LabelInterval,
    RenewalTower,
)
from hittimes.verify import check_return_vs_hitting

CASES = [
    ("renewal tower", RenewalTower(alpha=0.5), LabelInterval(p=0.01),
     0.5, "fractional", halpha(0.5), 10**7),
    ("Boole's map", BooleMap(), IntervalInY(center=0.5, half_width=1e-3),
     0.5, "fractional", halpha(0.5), 10**7),
    ("doubling map", DoublingMap(), DyadicInterval(level=10),
     1.0, "hlv", exponential(), 20_000),
]


def main():
    seeds = np.random.SeedSequence(7).generate_state(len(CASES))
    for (name, sys, target, alpha, kind, law, cap), seed in zip(CASES, seeds):
        out = check_return_vs_hitting(
            sys, [target], alpha, n_samples=20_000, cap=cap, seed=seed,
            kind=kind, law=law, tol_transform=0.05, tol_law=0.05)
        print(f"== {name} (alpha = {alpha}) ==")
        for line in out.summary_lines():
            print(" ", line)
        print()


if __name__ == "__main__":
    main()
