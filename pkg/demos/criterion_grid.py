"""Walk the criterion grid and show which generator conditions hold where.

Run with:  python3 demos/criterion_grid.py [--quick]

For each grid point the script builds the algebra, picks the standard generating
spaces, runs the conditions and prints one line per condition.  The last two
grid points are the ones declared to fail.
"""

import sys
import time

from cartanlab.cli import CRITERION_GRID, SLOW, run_criterion
from cartanlab.families import build_family
from cartanlab.liecore import depth_height


def main(quick=False):
    for g in CRITERION_GRID:
        name = g.spec.canonical()
        if quick and name in SLOW:
            print("%s: skipped (--quick)" % name)
            continue
        t = time.perf_counter()
        L = build_family(g.spec)
        r = run_criterion(L, g.spec, g.mode)
        dh = depth_height(L)
        where = "graded, depth %d, height %d" % dh if L.grading is not None else "filtered"
        print("%s  dim %d, %s, %s mode  [%.1fs]" % (name, L.dim, where, r.mode, time.perf_counter() - t))
        for c in r.conditions.values():
            print("    %-6s %s  %s" % (c.name, "ok  " if c.ok else "FAIL", c.detail))
        declared = ", ".join(g.expect_fail) or "none"
        verdict = "as declared" if sorted(r.failed()) == sorted(g.expect_fail) else "NOT as declared"
        print("    declared failures: %s -> %s" % (declared, verdict))


if __name__ == "__main__":
    main(quick="--quick" in sys.argv[1:])
