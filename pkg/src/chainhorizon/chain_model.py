"""Self-dual tridiagonal chain Hamiltonians and their secular polynomials.

The N x N matrix has diagonal -(N-1), -(N-3), ..., N-1, a palindromic
superdiagonal (g_1, g_2, ..., g_2, g_1) and the negated subdiagonal.  Its
characteristic polynomial only contains powers of E of the parity of N, so
after dropping the trivial E = 0 level of odd N it is a degree-J polynomial in
s = E**2, written as

    s^J - C(J,1) P s^(J-1) + C(J,2) Q s^(J-2) - C(J,3) R s^(J-3) + ...

All polynomial coefficient vectors in this package are stored highest power
first.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConsistencyError, ImaginaryCouplingError, ValidationError

COEFF_NAMES = ("P", "Q", "R", "S", "T")
PARITY_RTOL = 1e-9


def n_couplings(dim: int) -> int:
    return dim // 2


def spike_squares(dim: int) -> tuple:
    """Exact squared spike couplings n*(N-n), n = 1..J."""
    return tuple(float(n * (dim - n)) for n in range(1, n_couplings(dim) + 1))


@dataclass(frozen=True)
class ChainSpec:
    """One member of the chain family.

    ``squares`` optionally carries g_n**2 exactly; the secular polynomial only
    depends on the squares, and points such as the spikes are representable
    exactly as squares but not as rounded square roots.
    """

    dim: int
    couplings: tuple
    squares: Optional[tuple] = None

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or isinstance(self.dim, bool) or self.dim < 2:
            raise ValidationError(f"dimension must be an integer >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        g = tuple(float(x) for x in self.couplings)
        if len(g) != self.j:
            raise ValidationError(f"N={self.dim} needs {self.j} couplings, got {len(g)}")
        if not all(math.isfinite(x) for x in g):
            raise ValidationError("couplings must be finite")
        object.__setattr__(self, "couplings", g)
        if self.squares is not None:
            sq = tuple(float(x) for x in self.squares)
            if len(sq) != self.j or any(x < 0 or not math.isfinite(x) for x in sq):
                raise ValidationError("squares must be J finite non-negative numbers")
            object.__setattr__(self, "squares", sq)

    @classmethod
    def from_squares(cls, dim: int, squares: Sequence[float]) -> "ChainSpec":
        sq = [float(x) for x in squares]
        if any(x < 0 for x in sq):
            raise ImaginaryCouplingError("negative squared coupling")
        return cls(dim, tuple(math.sqrt(x) for x in sq), tuple(sq))

    @property
    def j(self) -> int:
        return n_couplings(self.dim)

    @property
    def g2(self) -> tuple:
        if self.squares is not None:
            return self.squares
        return tuple(x * x for x in self.couplings)

    def superdiagonal(self) -> list:
        """Palindromic (g_1, ..., g_J, ..., g_1) of length N-1."""
        n = self.dim
        return [self.couplings[min(k, n - 2 - k)] for k in range(n - 1)]

    def diagonal(self) -> list:
        return [float(2 * k - (self.dim - 1)) for k in range(self.dim)]


def build(spec: ChainSpec) -> np.ndarray:
    n = spec.dim
    h = np.diag(spec.diagonal())
    sup = spec.superdiagonal()
    for k in range(n - 1):
        h[k, k + 1] = sup[k]
        h[k + 1, k] = -sup[k]
    return h


@dataclass(frozen=True)
class SecularForm:
    """Normalized secular coefficients.

    ``coeffs`` holds (P, Q, R, S, T)[:J]; ``s_coeffs`` is the monic degree-J
    polynomial in s; ``raw_char`` the monic characteristic polynomial in E
    (empty when the form was built from coefficients directly).
    """

    j: int
    coeffs: tuple
    s_coeffs: tuple
    raw_char: tuple = ()
    dim: Optional[int] = None

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float], dim: Optional[int] = None) -> "SecularForm":
        c = tuple(float(x) for x in coeffs)
        j = len(c)
        s = [1.0] + [(-1) ** m * math.comb(j, m) * c[m - 1] for m in range(1, j + 1)]
        return cls(j, c, tuple(s), (), dim)

    @classmethod
    def from_s_roots(cls, roots: Sequence[complex]) -> "SecularForm":
        poly = np.poly(np.asarray(roots, dtype=complex)).real
        return cls.from_s_coeffs(poly)

    @classmethod
    def from_s_coeffs(cls, s_coeffs: Sequence[float], raw_char=(), dim=None) -> "SecularForm":
        s = tuple(float(x) for x in s_coeffs)
        if s[0] != 1.0:
            raise ValidationError("secular polynomial must be monic")
        j = len(s) - 1
        c = tuple(s[m] / ((-1) ** m * math.comb(j, m)) for m in range(1, j + 1))
        return cls(j, c, s, tuple(raw_char), dim)

    def __getattr__(self, name):
        if name in COEFF_NAMES:
            k = COEFF_NAMES.index(name)
            if k < len(self.coeffs):
                return self.coeffs[k]
            raise AttributeError(f"{name} undefined for J={self.j}")
        raise AttributeError(name)

    def get(self, name: str, default=0.0) -> float:
        k = COEFF_NAMES.index(name)
        return self.coeffs[k] if k < len(self.coeffs) else default

    def as_dict(self) -> dict:
        return dict(zip(COEFF_NAMES, self.coeffs))


def _minor_recurrence(d, g2, n):
    """Ascending-power coefficients of det(H - E) via the leading principal minors."""
    prev2 = [1.0]
    prev = [d[0], -1.0]
    for k in range(1, n):
        w = g2[min(k - 1, n - 1 - k)]
        cur = [0.0] * (k + 2)
        dk = d[k]
        for i, c in enumerate(prev):
            cur[i] += dk * c
            cur[i + 1] -= c
        for i, c in enumerate(prev2):
            cur[i] += w * c
        prev2, prev = prev, cur
    return prev


def char_poly(spec: ChainSpec) -> list:
    """Monic det(E - H) = (-1)^N det(H - E), highest power first."""
    n = spec.dim
    prev = _minor_recurrence(spec.diagonal(), spec.g2, n)
    sign = -1.0 if n % 2 else 1.0
    return [sign * c for c in reversed(prev)]


def secular_form(spec: ChainSpec) -> SecularForm:
    raw = char_poly(spec)
    n = spec.dim
    # descending index i carries E^(n-i); powers of the wrong parity must vanish
    stray = [abs(raw[i]) for i in range(1, n + 1, 2)]
    if stray and max(stray) > PARITY_RTOL * max(abs(c) for c in raw):
        # cancellation can leave rounding noise well above the coefficients
        # themselves; compare against the recurrence run on absolute values
        bound = list(reversed(_minor_recurrence([abs(x) for x in spec.diagonal()], spec.g2, n)))
        bad = [s for s, i in zip(stray, range(1, n + 1, 2)) if s > PARITY_RTOL * abs(bound[i])]
        if bad:
            raise ConsistencyError(f"parity violated: |stray coefficient| = {max(bad):.3e}")
    # odd n: the E^0 entry sits at an odd index, so the slice drops it
    s = raw[0:n + 1:2] if n % 2 == 0 else raw[0:n:2]
    return SecularForm.from_s_coeffs(s, raw_char=raw, dim=n)


@dataclass(frozen=True)
class GammaVector:
    gammas: tuple


def reparametrize(spec: ChainSpec) -> GammaVector:
    sq = spike_squares(spec.dim)
    return GammaVector(tuple(1.0 - g2 / s2 for g2, s2 in zip(spec.g2, sq)))


def from_gamma(dim: int, gammas) -> ChainSpec:
    gam = gammas.gammas if isinstance(gammas, GammaVector) else tuple(gammas)
    if len(gam) != n_couplings(dim):
        raise ValidationError(f"N={dim} needs {n_couplings(dim)} gammas, got {len(gam)}")
    bad = [k + 1 for k, v in enumerate(gam) if v > 1.0]
    if bad:
        raise ImaginaryCouplingError(f"gamma > 1 at index {bad}: coupling would be imaginary")
    return ChainSpec.from_squares(dim, [s2 * (1.0 - v) for s2, v in zip(spike_squares(dim), gam)])


def two_by_two(a: float, b: float, d: float, antisymmetric: bool = True):
    """Energies of [[a, b], [+-b, d]] and the discriminant (a-d)**2 -+ 4 b**2.

    With ``antisymmetric`` the lower entry is -b and the spectrum is real
    iff the returned discriminant is non-negative.
    """
    disc = (a - d) ** 2 + (-4.0 if antisymmetric else 4.0) * b * b
    root = cmath.sqrt(disc)
    return 0.5 * (a + d - root), 0.5 * (a + d + root), disc
