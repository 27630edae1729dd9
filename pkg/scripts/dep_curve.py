"""The N = 6 double-EP curve: solutions and oracle confluence along g1 = c.

    python3 scripts/dep_curve.py --points 60 --out dep.csv
"""
import argparse
import math
import sys

import numpy as np

from chainhorizon import landmarks, oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--lo", type=float, default=1.0)
    ap.add_argument("--hi", type=float, default=math.sqrt(5.0))
    ap.add_argument("--points", type=int, default=60)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    out = open(args.out, "w") if args.out else sys.stdout
    out.write("c,a,b_sq,z_sq,r1,r2,unequal_slack,confluence,zero_multiplicity\n")
    for c in np.linspace(args.lo, args.hi, args.points):
        for s in landmarks.dep_solve(float(c)):
            conf = oracle.spectrum(s.spec).confluence
            sig = "+".join(str(m) for m in conf.multiplicities)
            out.write(f"{s.c:.17g},{s.a:.17g},{s.b_sq:.17g},{s.z_sq:.17g},{s.residuals[0]:.3e},"
                      f"{s.residuals[1]:.3e},{s.unequal_slack:.6g},{sig},{conf.zero_multiplicity}\n")
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
