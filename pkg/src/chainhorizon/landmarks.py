"""Distinguished points of the horizon: EEP spikes, the perturbation ansatz
around them, and the N = 6 double-exceptional-point (DEP) curve.

For N = 6 the couplings are named c = g_1, b = g_2, a = g_3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chain_model import ChainSpec, n_couplings, secular_form, spike_squares
from .config import DEFAULT_TOL, Region, ToleranceConfig
from .errors import ImaginaryCouplingError, NoSolutionError, ValidationError
from . import oracle


def spikes(dim: int) -> list:
    """EEP couplings sqrt(n (N - n)); the characteristic polynomial there is E^N."""
    if dim < 2:
        raise ValidationError("N >= 2 required")
    return [math.sqrt(v) for v in spike_squares(dim)]


def spike_spec(dim: int) -> ChainSpec:
    return ChainSpec.from_squares(dim, spike_squares(dim))


# -- perturbation ansatz -----------------------------------------------------

@dataclass(frozen=True)
class AnsatzPoint:
    dim: int
    t: float
    g_caps: tuple
    gammas: tuple
    couplings: tuple
    spec: ChainSpec

    def to_dict(self) -> dict:
        return {"dim": self.dim, "t": self.t, "G": list(self.g_caps),
                "gammas": list(self.gammas), "couplings": list(self.couplings)}


def ansatz_gammas(dim: int, t: float, g_caps: Sequence[float]) -> tuple:
    j = n_couplings(dim)
    if len(g_caps) != j:
        raise ValidationError(f"N={dim} needs {j} ansatz constants, got {len(g_caps)}")
    head = sum(t ** k for k in range(1, j))
    return tuple(head + g * t ** j for g in g_caps)


def ansatz_point(dim: int, t: float, g_caps: Sequence[float]) -> AnsatzPoint:
    gam = ansatz_gammas(dim, t, g_caps)
    bad = [k + 1 for k, v in enumerate(gam) if v > 1.0]
    if bad:
        raise ImaginaryCouplingError(f"gamma_n(t) > 1 for n in {bad}")
    spec = ChainSpec.from_squares(dim, [s2 * (1.0 - v) for s2, v in zip(spike_squares(dim), gam)])
    return AnsatzPoint(dim, float(t), tuple(float(g) for g in g_caps), gam, spec.couplings, spec)


@dataclass(frozen=True)
class AdmissibleInterval:
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return not self.hi > self.lo

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.hi - self.lo


EMPTY = AdmissibleInterval(math.nan, math.nan)


def ansatz_admissible_interval(dim: int, t: float, n: int, others: Sequence[float] = (),
                               tol: ToleranceConfig = DEFAULT_TOL, grid: int = 400,
                               reach: float = 1.5, window: float = 20.0,
                               window_grid: int = 800) -> AdmissibleInterval:
    """Widest interval of G_n (others fixed) on which the ansatz point is Inside.

    G_n is scanned from the value giving g_n = reach * spike up to the value
    giving g_n = 0 (gamma_n = 1).  That range grows like t^-J while the
    admissible set near the spike stays O(1) wide, so a fine window
    [-window, window] is merged into the coarse grid.  The ends of the widest
    Inside run are then bisected against the oracle.
    """
    j = n_couplings(dim)
    if not 1 <= n <= j:
        raise ValidationError(f"coupling index n must be in 1..{j}")
    if len(others) != j - 1:
        raise ValidationError(f"need {j - 1} fixed constants for the other couplings")
    if not 0.0 < t < 1.0:
        raise ValidationError("t must lie in (0, 1)")
    head = sum(t ** k for k in range(1, j))
    tj = t ** j
    g_hi = (1.0 - head) / tj
    g_lo = (1.0 - reach * reach - head) / tj
    if g_hi <= g_lo:
        return EMPTY

    def caps(gn):
        out = list(others)
        out.insert(n - 1, gn)
        return out

    if any(ansatz_gammas(dim, t, caps(g_lo))[k] > 1.0 for k in range(j) if k != n - 1):
        return EMPTY

    def inside(gn):
        gn = min(gn, g_hi)
        try:
            p = ansatz_point(dim, t, caps(gn))
        except ImaginaryCouplingError:
            return False
        return oracle.classify_spec(p.spec, tol).region is Region.INSIDE

    xs = np.linspace(g_lo, g_hi, grid + 1)
    lo_w, hi_w = max(g_lo, -window), min(g_hi, window)
    if hi_w > lo_w:
        xs = np.union1d(xs, np.linspace(lo_w, hi_w, window_grid + 1))
    last = len(xs) - 1
    flags = [inside(x) for x in xs]
    best = None
    k = 0
    while k <= last:
        if flags[k]:
            m = k
            while m < last and flags[m + 1]:
                m += 1
            if best is None or xs[m] - xs[k] > xs[best[1]] - xs[best[0]]:
                best = (k, m)
            k = m + 1
        else:
            k += 1
    if best is None:
        return EMPTY
    k, m = best
    lo = xs[k] if k == 0 else _bisect_flag(inside, xs[k - 1], xs[k])
    hi = xs[m] if m == last else _bisect_flag(inside, xs[m + 1], xs[m])
    return AdmissibleInterval(float(lo), float(hi))


def _bisect_flag(pred, out_x, in_x, rtol=1e-13):
    for _ in range(200):
        if abs(in_x - out_x) <= rtol * max(1.0, abs(in_x)):
            break
        mid = 0.5 * (out_x + in_x)
        if pred(mid):
            in_x = mid
        else:
            out_x = mid
    return in_x


# -- N = 6 DEP curve ---------------------------------------------------------

def _dep_residuals_sq(a, b2, c2):
    r1 = (a * c2 + 15.0 * a) ** 2 - (15.0 + c2 + 5.0 * b2) ** 2
    r2 = (-66.0 * a * a - 36.0 * b2 + 4.0 * c2 * a * a - 189.0 + 252.0 * c2
          - 4.0 * b2 * a * a - a ** 4)
    return r1, r2


def dep_residuals(a: float, b: float, c: float):
    """The two DEP constraints at N = 6.

    r1 = [a c^2 + 15a + (15 + c^2 + 5b^2)] [a c^2 + 15a - (15 + c^2 + 5b^2)]
    equals -R and vanishes iff s = 0 is a root; r2 = 4 (3Q) - (3P)^2 vanishes
    iff the two remaining roots coincide.
    """
    return _dep_residuals_sq(a, b * b, c * c)


def unequal_slack(a: float, c: float) -> float:
    c2 = c * c
    return 84.0 * c2 - 63.0 - 2.4 * (a - 1.0) * (15.0 + c2)


@dataclass(frozen=True)
class DepSolution:
    c: float
    a: float
    b_sq: float
    z_sq: float
    residuals: tuple
    unequal_slack: float

    @property
    def warning(self) -> bool:
        return bool(self.unequal_slack < 0)

    @property
    def spec(self) -> ChainSpec:
        return ChainSpec.from_squares(6, [self.c * self.c, self.b_sq, self.a * self.a])

    def to_dict(self) -> dict:
        return {"c": self.c, "a": self.a, "b_sq": self.b_sq, "b": math.sqrt(max(self.b_sq, 0.0)),
                "z_sq": self.z_sq, "r1": self.residuals[0], "r2": self.residuals[1],
                "unequal_slack": self.unequal_slack, "unequal_warning": self.warning}


def _dep_poly(c2):
    """r2 with b^2 = (c^2 + 15)(a - 1)/5 substituted, as a quartic in a."""
    k = (c2 + 15.0) / 5.0
    return [-1.0, -4.0 * k, -66.0 + 4.0 * c2 + 4.0 * k, -36.0 * k, 36.0 * k - 189.0 + 252.0 * c2]


def _polyval(co, x):
    v = 0.0
    for a in co:
        v = v * x + a
    return v


def dep_solve(c: float, tol: ToleranceConfig = DEFAULT_TOL, grid: int = 64) -> list:
    """All DEP points with g_1 = c and 1 <= a <= 3, sorted by a.

    Roots are bracketed on a grid over [1, 3] (padded by 1e-9 so the EEP end
    a = 3 is not lost to rounding), bisected, then Newton-polished.
    """
    c2 = float(c) * float(c)
    co = _dep_poly(c2)
    dco = [co[i] * (4 - i) for i in range(4)]
    pad = 1e-9
    xs = np.linspace(1.0 - pad, 3.0 + pad, grid + 1)
    vals = [_polyval(co, x) for x in xs]
    roots = []
    for k in range(grid):
        lo, hi, flo, fhi = xs[k], xs[k + 1], vals[k], vals[k + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi > 0.0:
            continue
        if fhi == 0.0:
            continue  # picked up as the next left end
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = _polyval(co, mid)
            if fm == 0.0 or hi - lo <= 4e-16 * max(1.0, abs(mid)):
                lo = hi = mid
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    if vals[-1] == 0.0:
        roots.append(xs[-1])
    sols = []
    for a in roots:
        d = _polyval(dco, a)
        if d != 0.0:
            step = _polyval(co, a) / d
            if abs(_polyval(co, a - step)) < abs(_polyval(co, a)):
                a -= step
        b2 = (c2 + 15.0) * (a - 1.0) / 5.0
        z2 = (35.0 - a * a - 2.0 * b2 - 2.0 * c2) / 32.0
        sols.append(DepSolution(float(c), float(a), float(b2), float(z2),
                                _dep_residuals_sq(a, b2, c2), unequal_slack(a, c)))
    if not sols:
        raise NoSolutionError(f"no DEP with 1 <= a <= 3 at c = {c}")
    return sorted(sols, key=lambda s: s.a)


# -- pairwise-confluence sub-surface at N = 6 ---------------------------------

def _n6_scaled(a, b, c):
    f = secular_form(ChainSpec.from_squares(6, [c * c, b * b, a * a]))
    return 3.0 * f.P, 3.0 * f.Q, f.R


def pairwise_confluence_residual(a, b, c, x, y):
    """(3P, 3Q, R) at (a, b, c) minus the coefficients of (s - 25y^2)(s - 16x^2)^2."""
    p3, q3, r = _n6_scaled(a, b, c)
    x2, y2 = x * x, y * y
    return (p3 - (32.0 * x2 + 25.0 * y2),
            q3 - (256.0 * x2 * x2 + 800.0 * x2 * y2),
            r - 6400.0 * x2 * x2 * y2)


def fit_pairwise_confluence(a, b, c, tol: ToleranceConfig = DEFAULT_TOL, iters: int = 20):
    """Least-squares (x, y) for the inner-doublet confluence scenario.

    Starts from the oracle roots (the two smallest s averaged, the largest
    kept) and refines with Gauss-Newton on the residual triple.
    """
    roots = sorted(z.real for z in oracle.spectrum(ChainSpec.from_squares(6, [c * c, b * b, a * a]), tol).s_roots)
    x = math.sqrt(max(0.5 * (roots[0] + roots[1]), 0.0)) / 4.0
    y = math.sqrt(max(roots[2], 0.0)) / 5.0
    p3, q3, r = _n6_scaled(a, b, c)
    target = np.array([p3, q3, r])
    for _ in range(iters):
        x2, y2 = x * x, y * y
        model = np.array([32 * x2 + 25 * y2, 256 * x2 * x2 + 800 * x2 * y2, 6400 * x2 * x2 * y2])
        jac = np.array([[64 * x, 50 * y],
                        [1024 * x2 * x + 1600 * x * y2, 1600 * x2 * y],
                        [25600 * x2 * x * y2, 12800 * x2 * x2 * y]])
        step, *_ = np.linalg.lstsq(jac, target - model, rcond=None)
        x, y = x + step[0], y + step[1]
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, abs(x), abs(y)):
            break
    return float(x), float(y)
