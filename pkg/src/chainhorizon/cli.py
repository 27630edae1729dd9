"""Command-line front end.

    chainhorizon member --dim 3 --g 1.5          # exit 1: Outside
    chainhorizon spikes --dim 6
    chainhorizon trace --dim 4 --axes 1,2 --range 0:4,0:4 --res 41,41 --out n4.csv
    chainhorizon verify --dim 8 --samples 10000 --seed 1

JSON goes to stdout, CSV to stdout or --out.  Every output carries the tool
version, the tolerances, the inputs and the invocation; nothing time-dependent
is written unless --timing is given, so re-running an embedded invocation
reproduces the output byte for byte.  Errors exit with code 3 and a JSON object
on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import shlex
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__, criteria, landmarks, oracle, tracer
from .chain_model import ChainSpec, n_couplings, secular_form
from .config import EXIT_CODES, Region, ToleranceConfig
from .errors import HorizonError, ValidationError

EXIT_ERROR = 3


class UsageError(ValidationError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which `member` reserves for Boundary
    def error(self, message):
        raise UsageError(message)


# -- parsing helpers ---------------------------------------------------------

def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _ranges(text: str) -> list:
    out = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise UsageError(f"range must look like lo:hi, got {part!r}")
        out.append(tuple(_floats(",".join(bits))))
    return out


def fmt(x: float) -> str:
    """17 significant digits: exact round trip for doubles."""
    s = format(float(x), ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _clean(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        return None if not math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# -- shared pieces -----------------------------------------------------------

def _tolerances(args) -> ToleranceConfig:
    return ToleranceConfig.from_env(real_tol=args.real_tol, boundary_tol=args.boundary_tol,
                                    cluster_tol=args.cluster_tol, band_tol=args.band_tol,
                                    eps_b=args.eps_b)


def _meta(args, tol, inputs: dict, seed: Optional[int] = None) -> dict:
    meta = {"version": __version__, "command": args.command,
            "invocation": "chainhorizon " + shlex.join(args.argv),
            "tolerances": tol.to_dict(), "inputs": inputs}
    if seed is not None:
        meta["seed"] = seed
    return meta


def _spec(args) -> ChainSpec:
    if (args.g is None) == (args.g2 is None):
        raise UsageError("give exactly one of --g or --g2")
    if args.g2 is not None:
        return ChainSpec.from_squares(args.dim, _floats(args.g2))
    return ChainSpec(args.dim, tuple(_floats(args.g)))


def _spec_inputs(args, spec) -> dict:
    out = {"dim": spec.dim, "g": list(spec.couplings)}
    if spec.squares is not None:
        out["g2"] = list(spec.squares)
    return out


def _verdicts(form, method, tol) -> dict:
    out = {}
    if method in ("criteria", "both"):
        out["criteria"] = criteria.member(form, tol)
    if method in ("oracle", "both"):
        out["oracle"] = oracle.classify_form(form, tol)
    return out


def _emit_json(obj, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(_clean(obj), indent=2) + "\n")


def _csv_lines(meta: dict, header: Sequence[str], rows) -> str:
    lines = [f"# {k}: {json.dumps(v)}" for k, v in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- subcommands -------------------------------------------------------------

def cmd_spectrum(args, tol) -> int:
    spec = _spec(args)
    rep = oracle.spectrum(spec, tol)
    out = {"meta": _meta(args, tol, _spec_inputs(args, spec))}
    out.update(rep.to_dict())
    out["verdict"] = oracle.classify(rep, tol).to_dict()
    _emit_json(out)
    return 0


def cmd_coeffs(args, tol) -> int:
    spec = _spec(args)
    form = secular_form(spec)
    out = {"meta": _meta(args, tol, _spec_inputs(args, spec))}
    out.update({k: form.get(k, None) for k in ("P", "Q", "R", "S", "T")})
    out["s_coeffs"] = list(form.s_coeffs)
    out["char_coeffs"] = list(form.raw_char)
    out["aux"] = criteria.aux_quantities(form, tol).to_dict()
    _emit_json(out)
    return 0


def cmd_member(args, tol) -> int:
    spec = _spec(args)
    form = secular_form(spec)
    verdicts = _verdicts(form, args.method, tol)
    out = {"meta": _meta(args, tol, _spec_inputs(args, spec))}
    for name, v in verdicts.items():
        out[name] = v.to_dict()
    primary = verdicts.get("criteria") or verdicts["oracle"]
    out["region"] = primary.region.value
    out["margin"] = primary.margin
    out["violated"] = list(primary.violated)
    if len(verdicts) == 2:
        out["agree"] = verdicts["criteria"].region is verdicts["oracle"].region
    _emit_json(out)
    return EXIT_CODES[primary.region]


def cmd_spikes(args, tol) -> int:
    meta = _meta(args, tol, {"dim": args.dim})
    rows = [(n, g, float(n * (args.dim - n))) for n, g in enumerate(landmarks.spikes(args.dim), 1)]
    _write(_csv_lines(meta, ("n", "g", "g_squared"), rows), args.out)
    return 0


def cmd_ansatz(args, tol) -> int:
    caps = _floats(args.G)
    pt = landmarks.ansatz_point(args.dim, args.t, caps)
    inputs = {"dim": args.dim, "t": args.t, "G": caps}
    out = {"meta": _meta(args, tol, inputs)}
    out.update(pt.to_dict())
    method = "criteria" if pt.spec.j <= criteria.MAX_J else "oracle"
    out["verdict"] = _verdicts(secular_form(pt.spec), method, tol)[method].to_dict()
    if args.interval is not None:
        n = args.interval
        if not 1 <= n <= len(caps):
            raise UsageError(f"--interval must lie in 1..{len(caps)}")
        others = caps[:n - 1] + caps[n:]
        iv = landmarks.ansatz_admissible_interval(args.dim, args.t, n, others, tol)
        out["interval_index"] = n
        out["interval"] = [iv.lo, iv.hi] if not iv.empty else None
        out["interval_width"] = iv.width
    _emit_json(out)
    return 0


def cmd_dep(args, tol) -> int:
    sols = landmarks.dep_solve(args.c, tol)
    out = {"meta": _meta(args, tol, {"c": args.c})}
    rows = []
    for s in sols:
        d = s.to_dict()
        conf = oracle.spectrum(s.spec, tol).confluence
        d["confluence"] = list(conf.multiplicities)
        d["zero_multiplicity"] = conf.zero_multiplicity
        rows.append(d)
    out["count"] = len(rows)
    out["solutions"] = rows
    _emit_json(out)
    return 0


def cmd_trace(args, tol) -> int:
    axes = tuple(_ints(args.axes))
    fixed = _floats(args.fix) if args.fix else []
    ranges = _ranges(args.range)
    res = _ints(args.res)
    sl = tracer.SliceSpec(args.dim, axes, tuple(fixed), tuple(ranges), tuple(res))
    result = tracer.slice_trace(sl, args.method, tol)
    meta = _meta(args, tol, sl.to_dict())
    meta["method"] = args.method
    meta["rejected"] = result.rejected
    if len(axes) == 1:
        meta["segments"] = [list(s) for s in result.segments]
    j = n_couplings(args.dim)
    header = [f"g{k}" for k in range(1, j + 1)] + ["margin", "method"]
    rows = [tuple(float(x) for x in p.g) + (float(p.margin), p.method) for p in result.boundary_points]
    _write(_csv_lines(meta, header, rows), args.out)
    return 0


def cmd_verify(args, tol) -> int:
    box = _ranges(args.box) if args.box else None
    rep = tracer.sample_verify(args.dim, box, args.samples, args.seed, tol, workers=args.workers)
    inputs = {"dim": args.dim, "samples": args.samples,
              "box": [list(b) for b in rep.box], "workers": args.workers}
    out = {"meta": _meta(args, tol, inputs, seed=args.seed)}
    body = rep.to_dict(timing=args.timing)
    for k in ("dim", "count", "seed", "box"):
        body.pop(k)
    out.update(body)
    _emit_json(out)
    return 0 if rep.ok else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chainhorizon", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    tolp = _Parser(add_help=False)
    g = tolp.add_argument_group("tolerances (default: CHAINHORIZON_<NAME> env or built-in)")
    for name in ("real_tol", "boundary_tol", "cluster_tol", "band_tol", "eps_b"):
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=float, default=None)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def coupling_args(p):
        p.add_argument("--dim", type=int, required=True, help="matrix dimension N")
        p.add_argument("--g", help="couplings g_1,...,g_J")
        p.add_argument("--g2", help="squared couplings (exact spike values, e.g. 5,8,9)")

    p = sub.add_parser("spectrum", parents=[tolp], help="energies, s-roots, confluence")
    coupling_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("coeffs", parents=[tolp], help="secular coefficients and auxiliaries")
    coupling_args(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("member", parents=[tolp], help="domain membership; exit 0/1/2 = Inside/Outside/Boundary")
    coupling_args(p)
    p.add_argument("--method", choices=("criteria", "oracle", "both"), default="criteria")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("spikes", parents=[tolp], help="EEP spike couplings as CSV")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spikes)

    p = sub.add_parser("ansatz", parents=[tolp], help="perturbation-ansatz point near a spike")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--G", required=True, help="ansatz constants G_1,...,G_J")
    p.add_argument("--interval", type=int, default=None,
                   help="also report the admissible interval of G_n for this n")
    p.set_defaults(func=cmd_ansatz)

    p = sub.add_parser("dep", parents=[tolp], help="N = 6 double-EP points at g_1 = c")
    p.add_argument("--c", type=float, required=True)
    p.set_defaults(func=cmd_dep)

    p = sub.add_parser("trace", parents=[tolp], help="boundary points on a 1D or 2D slice, as CSV")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--axes", required=True, help="free coupling indices, e.g. 1,2")
    p.add_argument("--fix", default="", help="values of the remaining couplings in index order")
    p.add_argument("--range", required=True, help="lo:hi per free axis, e.g. 0:4,0:4")
    p.add_argument("--res", required=True, help="grid points per free axis, e.g. 41,41")
    p.add_argument("--method", choices=tracer.METHODS, default="criteria")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", parents=[tolp], help="criteria vs oracle on seeded samples")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", default=None, help="lo:hi per coupling (default 0:1.5*spike)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include runtime (breaks byte reproducibility)")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        tol = _tolerances(args)
        return args.func(args, tol)
    except HorizonError as exc:
        _emit_json(exc.to_dict(), sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError) as exc:
        _emit_json({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
