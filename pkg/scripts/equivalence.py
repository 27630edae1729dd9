"""Criteria vs oracle agreement for J = 1..5 on seeded uniform samples.

    python3 scripts/equivalence.py --samples 100000 --workers 4 --out equivalence.json
"""
import argparse
import json
import sys

from chainhorizon import tracer


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    rows = []
    for j in range(1, 6):
        rep = tracer.sample_verify(2 * j, count=args.samples, seed=args.seed + j, workers=args.workers)
        rows.append(rep.to_dict())
        print(f"J={j} N={2 * j}: agreement {rep.agreement_rate:.6f}, "
              f"{len(rep.disagreements)} disagreements ({rep.out_of_band} out of band), "
              f"{1e6 * rep.runtime / rep.count:.0f} us/sample", file=sys.stderr)
    text = json.dumps(rows, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if all(r["out_of_band"] == 0 for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
