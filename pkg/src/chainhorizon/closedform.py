"""Closed-form roots of monic cubics and quartics.

Used by the membership criteria only; the oracle never calls into here.
Roots come back as complex numbers sorted by (real, imag).
"""
from __future__ import annotations

import cmath
import math


def sort_roots(roots):
    return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _horner(coeffs, z):
    p = 0j
    dp = 0j
    for c in coeffs:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _newton(coeffs, z, steps=1):
    # a step is kept only if it lowers |p|: near a double root dp ~ 0
    for _ in range(steps):
        p, dp = _horner(coeffs, z)
        if dp == 0 or p == 0:
            break
        w = z - p / dp
        if not abs(_horner(coeffs, w)[0]) < abs(p):
            break
        z = w
    return z


def cubic_roots(a: float, b: float, c: float, polish: bool = True):
    """Roots of x^3 + a x^2 + b x + c.

    Three real roots use the trigonometric form; otherwise Cardano with real
    cube roots gives one real root and a conjugate pair.
    """
    shift = a / 3.0
    p = b - a * shift
    q = (2.0 * a * a * a / 27.0) - (a * b / 3.0) + c
    if p == 0.0 and q == 0.0:
        roots = [complex(-shift)] * 3
    elif p < 0.0 and 4.0 * p * p * p + 27.0 * q * q <= 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [complex(m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift) for k in range(3)]
    else:
        disc = q * q / 4.0 + p * p * p / 27.0
        sd = math.sqrt(max(disc, 0.0))
        # pick the sign that avoids cancellation
        u = _cbrt(-q / 2.0 - math.copysign(sd, q))
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        t1 = u + v
        re = -t1 / 2.0
        im = (u - v) * math.sqrt(3.0) / 2.0
        roots = [complex(t1 - shift), complex(re - shift, im), complex(re - shift, -im)]
    if polish:
        co = (1.0, a, b, c)
        roots = [_polish_keep_real(co, r) for r in roots]
    return sort_roots(roots)


def _polish_keep_real(coeffs, z):
    if z.imag == 0.0:
        w = _newton(coeffs, z.real + 0j)
        # a Newton step from a real start stays real unless dp vanished
        return complex(w.real) if math.isfinite(w.real) else z
    w = _newton(coeffs, z)
    return w if cmath.isfinite(w) else z


def quartic_roots(a: float, b: float, c: float, d: float, polish: bool = True):
    """Roots of x^4 + a x^3 + b x^2 + c x + d via Ferrari's resolvent cubic,
    each followed by one Newton step on the original quartic."""
    shift = a / 4.0
    a2 = a * a
    p = b - 3.0 * a2 / 8.0
    q = c - a * b / 2.0 + a2 * a / 8.0
    r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0
    if q == 0.0:
        # biquadratic u^4 + p u^2 + r
        sd = cmath.sqrt(p * p - 4.0 * r)
        us = []
        for w in ((-p + sd) / 2.0, (-p - sd) / 2.0):
            sw = cmath.sqrt(w)
            us += [sw, -sw]
    else:
        # resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0 has a root m > 0
        res = cubic_roots(p, p * p / 4.0 - r, -q * q / 8.0)
        m = max(z.real for z in res if abs(z.imag) <= 1e-12 * (1.0 + abs(z.real)))
        if m <= 0.0:
            m = max(z.real for z in res)
        s2m = math.sqrt(2.0 * m)
        us = []
        for sgn in (1.0, -1.0):
            inner = cmath.sqrt(-2.0 * m - 2.0 * p - sgn * 2.0 * q / s2m)
            us += [(sgn * s2m + inner) / 2.0, (sgn * s2m - inner) / 2.0]
    roots = [complex(u) - shift for u in us]
    if polish:
        co = (1.0, a, b, c, d)
        roots = [_polish_keep_real(co, _snap(r)) for r in roots]
    return sort_roots(roots)


def _snap(z, rel=1e-12):
    """Drop an imaginary part at rounding level."""
    if abs(z.imag) <= rel * max(1.0, abs(z.real)):
        return complex(z.real)
    return z
