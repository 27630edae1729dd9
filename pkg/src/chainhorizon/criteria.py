"""Closed-form membership tests for the quasi-Hermiticity domain, J = 1..5.

Every test is a conjunction of inequalities.  Each inequality is reported as
a normalized slack (negative = violated); the verdict margin is the minimum
slack.  The reductions are recursive: at J = 4 the critical points of the
quartic are the roots of a J = 3 secular polynomial with the same (P, Q, R),
and at J = 5 they are the roots of a J = 4 one with (P, Q, R, S), while the
rescaled cubic w(Y) = Y^3 - 3C Y^2 + 3D Y - G is a J = 3 form in (C, D, G).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .chain_model import COEFF_NAMES, SecularForm
from .closedform import cubic_roots, quartic_roots
from .config import DEFAULT_TOL, ToleranceConfig, Verdict
from .errors import UnsupportedError, ValidationError

MAX_J = 5
DEGENERATE = "degenerate-scaling"


def _norm(value, *terms):
    return value / max(1.0, *(abs(t) for t in terms))


def _coefficient_slacks(c: Sequence[float]) -> dict:
    rho = max(abs(x) ** (1.0 / (k + 1)) for k, x in enumerate(c))
    return {f"{COEFF_NAMES[k]}>=0": _norm(x, rho ** (k + 1)) for k, x in enumerate(c)}


def eq8_slack(p, q, r) -> float:
    """3P^2Q^2 + 6RPQ - 4Q^3 - R^2 - 4RP^3, normalized by its largest term.

    Proportional to the discriminant of s^3 - 3Ps^2 + 3Qs - R.
    """
    terms = (3.0 * p * p * q * q, 6.0 * r * p * q, -4.0 * q ** 3, -r * r, -4.0 * r * p ** 3)
    return _norm(math.fsum(terms), *terms)


def _b_slack(p, q):
    return _norm(p * p - q, p * p, q)


def eps_b(p: float, tol: ToleranceConfig) -> float:
    return tol.eps_b * max(1.0, p * p)


# -- auxiliary quantities ----------------------------------------------------

@dataclass(frozen=True)
class AuxQuantities:
    B: float
    q: float = math.nan
    C: float = math.nan
    D: float = math.nan
    G: float = math.nan
    defined: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"B": self.B}
        for k in ("q", "C", "D", "G"):
            out[k] = getattr(self, k) if self.defined.get(k) else None
        return out


def _aux(c: Sequence[float], tol: ToleranceConfig) -> AuxQuantities:
    j = len(c)
    p = c[0]
    qq = c[1] if j > 1 else 0.0
    b = p * p - qq
    mask = {"B": j >= 1, "q": False, "C": False, "D": False, "G": False}
    if j < 2 or b <= eps_b(p, tol):
        return AuxQuantities(b, defined=mask)
    vals = {"q": qq / b}
    mask["q"] = True
    if j >= 3:
        vals["C"] = (p * qq - c[2]) / (2.0 * b ** 1.5)
        mask["C"] = True
    if j >= 4:
        vals["D"] = (p * c[2] - c[3]) / (3.0 * b * b)
        mask["D"] = True
    if j >= 5:
        vals["G"] = (p * c[3] - c[4]) / (4.0 * b ** 2.5)
        mask["G"] = True
    return AuxQuantities(b, defined=mask, **vals)


def aux_quantities(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL) -> AuxQuantities:
    return _aux(f.coeffs, tol)


def companion_c_band(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL):
    """sqrt(1+q) - 1 <= C <= sqrt(1+q) + 1 as (low slack, high slack).

    Rescaled form of the J = 3 reality condition on (P, Q, R); None when q or
    C is undefined.
    """
    a = _aux(f.coeffs, tol)
    if not (a.defined["q"] and a.defined["C"]) or a.q < -1.0:
        return None
    mid = math.sqrt(1.0 + a.q)
    return a.C - (mid - 1.0), (mid + 1.0) - a.C


# -- critical points ---------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoints:
    x: tuple
    y_scaled: tuple = ()
    y_pm: tuple = ()
    y_greek: tuple = ()
    all_real: bool = True


def _realish(roots, scale, rtol=1e-7):
    return all(abs(z.imag) <= rtol * scale for z in roots)


def _deriv_roots(c):
    j = len(c)
    if j == 4:
        return cubic_roots(-3.0 * c[0], 3.0 * c[1], -c[2])
    if j == 5:
        return quartic_roots(-4.0 * c[0], 6.0 * c[1], -4.0 * c[2], c[3])
    raise ValidationError("critical points are defined for J = 4 and 5")


def critical_points(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL) -> CriticalPoints:
    c = f.coeffs
    xs = _deriv_roots(c)
    scale = max([1.0] + [abs(z) for z in xs])
    real = _realish(xs, scale, tol.real_tol * 1e3)
    a = _aux(c, tol)
    x = tuple(z.real for z in xs) if real else tuple(xs)
    if not real or not a.defined["C"]:
        return CriticalPoints(x, all_real=real)
    sb = math.sqrt(a.B)
    ys = tuple(v / sb for v in x)
    if len(c) == 4:
        disc = a.C * a.C - a.D
        if disc < 0:
            return CriticalPoints(x, ys, all_real=False)
        r = math.sqrt(disc)
        return CriticalPoints(x, ys, (a.C - r, a.C + r), all_real=True)
    ws = cubic_roots(-3.0 * a.C, 3.0 * a.D, -a.G)
    wreal = _realish(ws, max([1.0] + [abs(z) for z in ws]), tol.real_tol * 1e3)
    greek = tuple(z.real for z in ws) if wreal else tuple(ws)
    return CriticalPoints(x, ys, (), greek, all_real=wreal)


# -- the chains --------------------------------------------------------------

def _j1(c, tol):
    return _coefficient_slacks(c), ()


def _j2(c, tol):
    s = _coefficient_slacks(c)
    s["B>=0"] = _b_slack(c[0], c[1])
    return s, ()


def _j3(c, tol):
    s = _coefficient_slacks(c)
    s["Eq-uhrada"] = eq8_slack(*c)
    return s, ()


def _prefixed(prefix, slacks):
    return {f"{prefix}.{k}": v for k, v in slacks.items()}


def _interlace(seq, names, out):
    for (ya, yb), name in zip(zip(seq, seq[1:]), names):
        out[name] = _norm(yb - ya, ya, yb)


def _unscaled(c, xs, out):
    """Sign conditions of the secular polynomial at its critical points."""
    j = len(c)
    full = [1.0] + [(-1) ** m * math.comb(j, m) * c[m - 1] for m in range(1, j + 1)]
    for k, x in enumerate(xs):
        terms = [a * x ** (j - i) for i, a in enumerate(full)]
        val = math.fsum(terms)
        # below a local minimum / above a local maximum
        sign = -1.0 if (len(xs) - k) % 2 == 1 else 1.0
        out[f"extremum-x{k + 1}"] = _norm(sign * val, *terms)


def _j4(c, tol):
    p, q, r, s_ = c
    out = _coefficient_slacks(c)
    out["B>=0"] = _b_slack(p, q)
    crit, _ = _j3(c[:3], tol)
    out.update(_prefixed("crit", crit))
    flags = []
    if min(crit.values()) < -tol.band_tol:
        return out, ()
    xs = [z.real for z in _deriv_roots(c)]
    a = _aux(c, tol)
    if not a.defined["D"]:
        _unscaled(c, xs, out)
        return out, (DEGENERATE,)
    out["D>=0"] = _norm(a.D, a.D, a.C * a.C)
    out["C^2>=D"] = _norm(a.C * a.C - a.D, a.C * a.C, a.D)
    if a.C * a.C - a.D < -tol.band_tol * max(1.0, a.C * a.C):
        return out, tuple(flags)
    rad = math.sqrt(max(0.0, a.C * a.C - a.D))
    sb = math.sqrt(a.B)
    y1, y2, y3 = (x / sb for x in xs)
    _interlace([y1, a.C - rad, y2, a.C + rad, y3],
               ["interlace-Y1", "interlace-Y2-", "interlace-Y2+", "interlace-Y3"], out)
    return out, tuple(flags)


def _j5(c, tol):
    p, q, r, s_, t = c
    out = _coefficient_slacks(c)
    out["B>=0"] = _b_slack(p, q)
    crit, crit_flags = _j4(c[:4], tol)
    out.update(_prefixed("crit", crit))
    flags = [f"crit.{x}" for x in crit_flags]
    if min(crit.values()) < -tol.band_tol:
        return out, tuple(flags)
    xs = [z.real for z in _deriv_roots(c)]
    a = _aux(c, tol)
    if not a.defined["G"]:
        _unscaled(c, xs, out)
        return out, tuple(flags + [DEGENERATE])
    w, _ = _j3((a.C, a.D, a.G), tol)
    out.update(_prefixed("w", w))
    if min(w.values()) < -tol.band_tol:
        return out, tuple(flags)
    ya, yb, yg = (z.real for z in cubic_roots(-3.0 * a.C, 3.0 * a.D, -a.G))
    sb = math.sqrt(a.B)
    y1, y2, y3, y4 = (x / sb for x in xs)
    _interlace([y1, ya, y2, yb, y3, yg, y4],
               ["interlace-Y1", "interlace-Ya", "interlace-Y2", "interlace-Yb", "interlace-Y3", "interlace-Yg"],
               out)
    return out, tuple(flags)


_CHAINS = {1: _j1, 2: _j2, 3: _j3, 4: _j4, 5: _j5}


def condition_slacks(coeffs: Sequence[float], tol: ToleranceConfig = DEFAULT_TOL):
    """All named slacks and flags of the chain for J = len(coeffs)."""
    j = len(coeffs)
    if j not in _CHAINS:
        raise UnsupportedError(f"closed-form criteria exist for J <= {MAX_J} (N <= 11); got J={j}")
    return _CHAINS[j](tuple(float(x) for x in coeffs), tol)


def member(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    slacks, flags = condition_slacks(f.coeffs, tol)
    return Verdict.from_slacks(slacks, tol, "criteria", flags)


def necessary_conditions(f: SecularForm) -> dict:
    """Raw coefficients as slacks; non-negativity is necessary, not sufficient."""
    return {f"{k}>=0": v for k, v in f.as_dict().items()}


def j3_band(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL):
    """Admissible (lower, upper) for R / (2 B^{3/2}) at J = 3 as a function of q = Q/B."""
    if f.j != 3:
        raise ValidationError("j3_band needs J = 3")
    a = _aux(f.coeffs, tol)
    if not a.defined["q"]:
        raise ValidationError(f"degenerate band: B = {a.B:.3e} <= eps_B")
    return band_limits(a.q)


def band_limits(q: float):
    root = math.sqrt(1.0 + q)
    upper = 1.0 + (q / 2.0 - 1.0) * root
    lower = 0.0 if q <= 3.0 else (q / 2.0 - 1.0) * root - 1.0
    return lower, upper


def j3_band_member(f: SecularForm, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Membership at J = 3 through the band on the rescaled R."""
    p, q, r = f.coeffs
    if p < 0 or q < 0:
        return False
    lo, hi = j3_band(f, tol)
    b = p * p - q
    x = r / (2.0 * b ** 1.5)
    return lo <= x <= hi
