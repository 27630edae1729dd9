"""Boundary of the N = 4 domain in the (g1, g2) plane, written as CSV.

    python3 scripts/trace_n4.py --res 81 --out n4_boundary.csv

The spike (sqrt 3, 2) is a cusp of the curve; the script reports the
distance from it to the nearest traced point.
"""
import argparse
import math
import sys

import numpy as np

from chainhorizon import landmarks, tracer


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--res", type=int, default=81)
    ap.add_argument("--hi", type=float, default=3.0)
    ap.add_argument("--method", choices=tracer.METHODS, default="criteria")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    sl = tracer.SliceSpec(4, (1, 2), (), ((0.0, args.hi), (0.0, args.hi)), (args.res, args.res))
    res = tracer.slice_trace(sl, args.method)
    pts = np.array([p.g for p in res.boundary_points])
    spike = np.array(landmarks.spikes(4))
    near = float(np.min(np.linalg.norm(pts - spike, axis=1))) if len(pts) else math.nan
    print(f"{len(pts)} boundary points, {res.rejected} rejected, nearest to spike {near:.3g}, "
          f"{res.runtime:.1f} s", file=sys.stderr)
    out = open(args.out, "w") if args.out else sys.stdout
    out.write("g1,g2,margin\n")
    for p in res.boundary_points:
        out.write(f"{p.g[0]:.17g},{p.g[1]:.17g},{p.margin:.3e}\n")
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
