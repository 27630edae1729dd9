"""Numerical ground truth: secular roots, energies, realness and confluence.

Roots come from Aberth-Ehrlich simultaneous iteration, independent of the
closed-form solvers used by the criteria.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .chain_model import ChainSpec, SecularForm, secular_form
from .config import DEFAULT_TOL, Region, ToleranceConfig, Verdict, region_of
from .errors import ConvergenceError, ValidationError

_U = 2.0 ** -53
_SPLITTER = 134217729.0  # 2**27 + 1
BACKWARD_RTOL = 1e-12
MAX_ITER = 500


# -- error-free transformations ---------------------------------------------

def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def comp_horner(coeffs: Sequence[float], z: complex) -> complex:
    """Compensated Horner evaluation of a real-coefficient polynomial at complex z.

    Accurate as if computed in twice the working precision.
    """
    zr, zi = z.real, z.imag
    sr, si = float(coeffs[0]), 0.0
    cr, ci = 0.0, 0.0
    for a in coeffs[1:]:
        p1, e1 = _two_prod(sr, zr)
        p2, e2 = _two_prod(-si, zi)
        pr, f1 = _two_sum(p1, p2)
        p3, e3 = _two_prod(sr, zi)
        p4, e4 = _two_prod(si, zr)
        pi, f2 = _two_sum(p3, p4)
        sr, g1 = _two_sum(pr, float(a))
        si = pi
        err_r = e1 + e2 + f1 + g1
        err_i = e3 + e4 + f2
        cr, ci = cr * zr - ci * zi + err_r, cr * zi + ci * zr + err_i
    return complex(sr + cr, si + ci)


def _abs_poly(coeffs, r):
    acc = 0.0
    for a in coeffs:
        acc = acc * r + abs(a)
    return acc


# -- root finding ------------------------------------------------------------

def _taylor_shift(coeffs, c):
    """Coefficients of p(x + c)."""
    a = [float(x) for x in coeffs]
    n = len(a) - 1
    for k in range(n):
        for i in range(1, n + 1 - k):
            a[i] += c * a[i - 1]
    return a


def _initial_guesses(coeffs):
    n = len(coeffs) - 1
    center = -coeffs[1] / n
    b = _taylor_shift(coeffs, center)
    radius = 2.0 * max((abs(b[k]) ** (1.0 / k) for k in range(1, n + 1)), default=0.0)
    if radius == 0.0:
        return None, center
    phase = 0.4  # off-axis so no start is real or a conjugate of another
    return [complex(center) + radius * cmath.exp(1j * (2.0 * math.pi * k / n + phase)) for k in range(n)], center


def poly_roots(monic_coeffs: Sequence[float], max_iter: int = MAX_ITER, certify: bool = True) -> list:
    """All complex roots of a monic real polynomial (highest power first).

    Each root is certified to a backward error of ``BACKWARD_RTOL`` relative
    to sum |a_k| |z|^k; the residual is re-evaluated with compensated Horner
    when the plain one cannot certify it.
    """
    coeffs = [float(c) for c in monic_coeffs]
    if not coeffs or coeffs[0] != 1.0:
        raise ValidationError("poly_roots expects a monic coefficient vector")
    if not all(math.isfinite(c) for c in coeffs):
        raise ValidationError("non-finite coefficient")
    zeros = 0
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
        zeros += 1
    n = len(coeffs) - 1
    if n == 0:
        roots = []
    elif n == 1:
        roots = [complex(-coeffs[1])]
    elif n == 2:
        roots = _quadratic(coeffs[1], coeffs[2])
    else:
        roots = _aberth(coeffs, max_iter, certify)
    roots += [0j] * zeros
    return sorted(roots, key=lambda z: (z.real, z.imag))


def _quadratic(b, c):
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        r1 = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        r2 = c / r1 if r1 != 0.0 else 0.0
        return [complex(r1), complex(r2)]
    re = -0.5 * b
    im = 0.5 * math.sqrt(-disc)
    return [complex(re, im), complex(re, -im)]


def _aberth(coeffs, max_iter, certify):
    n = len(coeffs) - 1
    z, center = _initial_guesses(coeffs)
    if z is None:
        return [complex(center)] * n
    done = [False] * n
    gamma = 4.0 * n * _U
    for _ in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p = 0j
            dp = 0j
            for a in coeffs:
                dp = dp * zi + p
                p = p * zi + a
            if abs(p) <= gamma * _abs_poly(coeffs, abs(zi)):
                done[i] = True
                continue
            if dp == 0:
                z[i] = zi + 1e-8 * (1.0 + abs(zi)) * (1 + 1j)
                continue
            ratio = p / dp
            sigma = 0j
            for k in range(n):
                if k != i:
                    diff = zi - z[k]
                    if diff != 0:
                        sigma += 1.0 / diff
            w = ratio / (1.0 - ratio * sigma)
            z[i] = zi - w
            if abs(w) <= _U * abs(z[i]):
                done[i] = True
        if all(done):
            break
    if certify:
        for zi in z:
            bound = BACKWARD_RTOL * _abs_poly(coeffs, abs(zi))
            p = 0j
            for a in coeffs:
                p = p * zi + a
            if abs(p) + gamma * _abs_poly(coeffs, abs(zi)) <= bound:
                continue
            res = abs(comp_horner(coeffs, zi))
            if res > bound:
                raise ConvergenceError(f"Aberth iteration did not converge (residual {res:.3e})", best=z, residual=res)
    return z


# -- spectra -----------------------------------------------------------------

@dataclass(frozen=True)
class Confluence:
    multiplicities: tuple  # sorted ascending
    zero_multiplicity: int
    centers: tuple

    @property
    def zero_cluster(self) -> bool:
        return self.zero_multiplicity > 0

    def to_list(self) -> list:
        return list(self.multiplicities)


@dataclass(frozen=True)
class SpectrumReport:
    s_roots: tuple
    multiplicities: tuple  # per root: size of the cluster it belongs to
    energies: tuple
    all_real_nonneg: bool
    margin: float
    confluence: Confluence
    form: SecularForm

    def to_dict(self) -> dict:
        return {
            "s_roots_re": [z.real for z in self.s_roots],
            "s_roots_im": [z.imag for z in self.s_roots],
            "energies_re": [z.real for z in self.energies],
            "energies_im": [z.imag for z in self.energies],
            "confluence": list(self.confluence.multiplicities),
            "zero_multiplicity": self.confluence.zero_multiplicity,
            "all_real_nonneg": self.all_real_nonneg,
        }


def _scale(roots) -> float:
    return max([1.0] + [abs(z) for z in roots])


def cluster(roots, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Single-linkage clusters: roots join when (gap / scale)^2 <= cluster_tol.

    The squared gap is used because a k-fold root under a backward error eta
    splits by about eta^(1/k); for doublets the squared gap is linear in eta.
    """
    scale = _scale(roots)
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if (abs(roots[i] - roots[k]) / scale) ** 2 <= tol.cluster_tol:
                parent[find(i)] = find(k)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (min(roots[i].real for i in g), g[0]))


def _confluence(roots, tol) -> tuple:
    groups = cluster(roots, tol)
    scale = _scale(roots)
    # the mean of a cluster is well conditioned even when its members are not
    centers = tuple(sum(roots[i] for i in g) / len(g) for g in groups)
    zero = 0
    for g, c in zip(groups, centers):
        if abs(c) / scale <= tol.cluster_tol:
            zero = max(zero, len(g))
    per_root = [0] * len(roots)
    for g in groups:
        for i in g:
            per_root[i] = len(g)
    conf = Confluence(tuple(sorted(len(g) for g in groups)), zero, centers)
    return conf, tuple(per_root)


def spectrum_of_form(form: SecularForm, tol: ToleranceConfig = DEFAULT_TOL, odd: bool = False) -> SpectrumReport:
    roots = tuple(poly_roots(form.s_coeffs))
    energies = []
    for s in roots:
        e = cmath.sqrt(s)
        energies += [e, -e]
    if odd:
        energies.append(0j)
    energies.sort(key=lambda z: (z.real, z.imag))
    conf, mult = _confluence(roots, tol)
    margin, _ = _margin(roots, tol)
    scale = _scale(roots)
    ok = all(abs(z.imag) <= tol.real_tol * scale and z.real >= -tol.real_tol * scale for z in roots)
    return SpectrumReport(roots, mult, tuple(energies), ok, margin, conf, form)


def spectrum(spec: ChainSpec, tol: ToleranceConfig = DEFAULT_TOL) -> SpectrumReport:
    return spectrum_of_form(secular_form(spec), tol, odd=bool(spec.dim % 2))


def _margin(roots, tol):
    """Signed distance-like slack of the root set from the horizon.

    Real roots contribute s/scale and the squared relative gaps between
    neighbours; non-real roots contribute min(Re s/scale, -(Im s/scale)^2).
    Every term vanishes linearly in the parameters as a simple root crosses
    zero, two real roots collide, or a complex pair lands on the axis.
    """
    scale = _scale(roots)
    slacks = {}
    real = []
    for k, z in enumerate(roots):
        if abs(z.imag) <= tol.real_tol * scale:
            real.append(z.real)
            slacks[f"s{k}>=0"] = z.real / scale
        else:
            slacks[f"s{k}-real"] = min(z.real / scale, -(z.imag / scale) ** 2)
    real.sort()
    for k in range(len(real) - 1):
        slacks[f"gap{k}"] = ((real[k + 1] - real[k]) / scale) ** 2
    return (min(slacks.values()) if slacks else 0.0), slacks


def classify(report: SpectrumReport, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    return classify_roots(report.s_roots, tol)


def classify_roots(roots, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    margin, slacks = _margin(list(roots), tol)
    return Verdict.from_slacks(slacks, tol, "oracle")


def classify_form(form: SecularForm, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    return classify_roots(poly_roots(form.s_coeffs), tol)


def classify_spec(spec: ChainSpec, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    return classify_form(secular_form(spec), tol)


def confluence_pattern(report: SpectrumReport, tol: ToleranceConfig = DEFAULT_TOL) -> Confluence:
    return _confluence(list(report.s_roots), tol)[0]
