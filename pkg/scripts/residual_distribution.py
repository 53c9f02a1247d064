"""Measure residual distributions per operator power to re-examine the tolerances.

Uses the corrected weights so that every row measures roundoff only.
"""

import numpy as np

from slicegrav.moebius import PointSpace
from slicegrav.verify import CheckCase, canonical_generators, run_case, tolerance_for

SAMPLES = 100


def main():
    space = PointSpace.vector(2, 2)
    words = [g.word() for g in canonical_generators(space)]
    print(f"{'l':>2} {'tolerance':>9} {'median':>9} {'p99':>9} {'max':>9}  headroom")
    for l in range(1, 6):
        rel = []
        for w in words:
            r = run_case(CheckCase("slice_G", 2, 2, l, w, samples=SAMPLES, form="corrected"), 42)
            rel.extend(x.rel_error for x in r.residuals)
        rel = np.array(rel)
        tol = tolerance_for(l)
        print(f"{l:>2} {tol:>9.0e} {np.median(rel):>9.1e} {np.quantile(rel, 0.99):>9.1e} {rel.max():>9.1e}  {tol / rel.max():.0e}x")


if __name__ == "__main__":
    main()
