"""Locating the horizon: radial bisection, slice scans and criteria-vs-oracle sweeps.

Bisection treats Boundary as closed-inside and converges on the first
transition to Outside.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import criteria, oracle
from .chain_model import ChainSpec, n_couplings, secular_form
from .config import DEFAULT_TOL, Region, ToleranceConfig, Verdict
from .errors import NoSolutionError, ValidationError
from .landmarks import spikes

METHODS = ("criteria", "oracle")
BISECT_RTOL = 1e-13


def classify(dim: int, g: Sequence[float], method: str = "criteria",
             tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    form = secular_form(ChainSpec(dim, tuple(g)))
    if method == "criteria":
        return criteria.member(form, tol)
    if method == "oracle":
        return oracle.classify_form(form, tol)
    raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")


def default_box(dim: int, factor: float = 1.5) -> tuple:
    return tuple((0.0, factor * s) for s in spikes(dim))


@dataclass(frozen=True)
class BoundaryPoint:
    g: tuple
    margin: float
    method: str
    radius: float = math.nan

    def to_dict(self) -> dict:
        return {"g": list(self.g), "margin": self.margin, "method": self.method, "radius": self.radius}


def _bisect(pred, t_in: float, t_out: float, rtol: float = BISECT_RTOL):
    for _ in range(400):
        if abs(t_out - t_in) <= rtol * max(1.0, abs(t_in)):
            break
        mid = 0.5 * (t_in + t_out)
        if pred(mid):
            t_in = mid
        else:
            t_out = mid
    return t_in, t_out


def _settle(dim, point, t_in, t_out, method, tol):
    """Boundary point from a closed-inside / Outside bracket.

    The bracket sits where the margin crosses -boundary_tol.  When the
    bracket end is on that band edge and a point with margin >= 0 lies a few
    band widths inside, a second bisection on the sign of the margin moves
    onto the zero crossing itself.  Near spikes the margin is flat at
    rounding level, no such point is close, and the bracket end is kept.
    """
    def margin(t):
        return classify(dim, point(t), method, tol).margin

    cands = [t_in, t_out]
    if margin(t_in) < -1e-3 * tol.boundary_tol:
        sign = 1.0 if t_out >= t_in else -1.0
        reach = 1e3 * tol.boundary_tol * max(1.0, abs(t_in))
        step = 1e-12 * max(1.0, abs(t_in))
        while step <= reach:
            t_pos = t_in - sign * step
            if margin(t_pos) >= 0.0:
                a, b = _bisect(lambda t: margin(t) >= 0.0, t_pos, t_in, rtol=1e-16)
                cands += [a, b]
                break
            step *= 4.0
    best = None
    for t in cands:
        g = point(t)
        v = classify(dim, g, method, tol)
        if best is None or abs(v.margin) < abs(best[1].margin):
            best = (t, v, g)
    return best


def ray_bisect(dim: int, direction: Sequence[float], origin: Optional[Sequence[float]] = None,
               method: str = "criteria", tol: ToleranceConfig = DEFAULT_TOL,
               cap: Optional[float] = None, steps: int = 256) -> BoundaryPoint:
    """First boundary crossing along origin + r * direction, r > 0."""
    j = n_couplings(dim)
    d = np.asarray(direction, dtype=float)
    if d.shape != (j,) or not np.all(np.isfinite(d)):
        raise ValidationError(f"direction must be {j} finite numbers")
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise ValidationError("direction must be non-zero")
    d = d / norm
    o = np.zeros(j) if origin is None else np.asarray(origin, dtype=float)
    if o.shape != (j,):
        raise ValidationError(f"origin must have {j} entries")
    if classify(dim, o, method, tol).region is not Region.INSIDE:
        raise ValidationError("ray origin must be strictly Inside")
    if cap is None:
        cap = 2.0 * float(np.linalg.norm(spikes(dim))) + float(np.linalg.norm(o))

    def point(r):
        return tuple(float(x) for x in o + r * d)

    def inside(r):
        return classify(dim, point(r), method, tol).closed_inside

    prev = 0.0
    for r in np.linspace(0.0, cap, steps + 1)[1:]:
        if not inside(r):
            t_in, t_out = _bisect(inside, prev, float(r))
            r_best, v, g = _settle(dim, point, t_in, t_out, method, tol)
            return BoundaryPoint(g, v.margin, method, r_best)
        prev = float(r)
    raise NoSolutionError(f"no Outside point along the ray within radius {cap}")


# -- slices ------------------------------------------------------------------

@dataclass(frozen=True)
class SliceSpec:
    """A 1D or 2D cut through coupling space.

    ``fixed`` holds the values of the non-free couplings in index order.
    Axis indices are 1-based.
    """

    dim: int
    free_axes: tuple
    fixed: tuple = ()
    ranges: tuple = ()
    resolution: tuple = ()

    def __post_init__(self):
        j = n_couplings(self.dim)
        axes = tuple(int(a) for a in self.free_axes)
        if not 1 <= len(axes) <= 2 or len(set(axes)) != len(axes) or any(not 1 <= a <= j for a in axes):
            raise ValidationError(f"free axes must be one or two distinct indices in 1..{j}")
        if len(self.fixed) != j - len(axes):
            raise ValidationError(f"need {j - len(axes)} fixed coupling values")
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)
        if len(ranges) != len(axes) or any(not hi > lo for lo, hi in ranges):
            raise ValidationError("one range lo < hi per free axis")
        res = tuple(int(r) for r in self.resolution)
        if len(res) != len(axes) or any(r < 2 for r in res):
            raise ValidationError("resolution must be >= 2 per free axis")
        object.__setattr__(self, "free_axes", axes)
        object.__setattr__(self, "fixed", tuple(float(x) for x in self.fixed))
        object.__setattr__(self, "ranges", ranges)
        object.__setattr__(self, "resolution", res)

    def point(self, values: Sequence[float]) -> tuple:
        j = n_couplings(self.dim)
        free = dict(zip(self.free_axes, values))
        rest = iter(self.fixed)
        return tuple(free[k] if k in free else next(rest) for k in range(1, j + 1))

    def axis(self, i: int) -> np.ndarray:
        lo, hi = self.ranges[i]
        return np.linspace(lo, hi, self.resolution[i])

    def to_dict(self) -> dict:
        return {"dim": self.dim, "free_axes": list(self.free_axes), "fixed": list(self.fixed),
                "ranges": [list(r) for r in self.ranges], "resolution": list(self.resolution)}


@dataclass(frozen=True)
class TraceResult:
    slice: SliceSpec
    method: str
    boundary_points: tuple
    segments: tuple = ()          # 1D: closed-inside intervals along the free axis
    grid_verdicts: Optional[np.ndarray] = field(default=None, compare=False)
    rejected: int = 0             # bisection ends whose |margin| stayed above boundary_tol
    metadata: dict = field(default_factory=dict)
    runtime: float = field(default=0.0, compare=False)


_GOLD = 0.5 * (math.sqrt(5.0) - 1.0)


def _golden_max(f, a, b, iters=60):
    """Maximize f on [a, b]; returns (x, f(x)) or stops early once f >= 0."""
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if max(fc, fd) >= 0.0:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _scan_line(sl: SliceSpec, fixed_vals: dict, axis: int, method, tol, refine: bool = True):
    """Closed-inside flags along one free axis and the bisected transitions.

    Near a spike the domain narrows to a sliver thinner than the grid, so
    each local maximum of the margin over an Outside stretch is refined by a
    golden-section search; a closed-inside hit adds both sliver edges.  The
    search runs on the oracle margin, which stays continuous where the
    normalized criteria slacks saturate; hits and edges use ``method``.
    """
    xs = sl.axis(axis)
    name = sl.free_axes[axis]

    def point(x):
        vals = dict(fixed_vals)
        vals[name] = x
        return sl.point([vals[a] for a in sl.free_axes])

    def verdict(x):
        return classify(sl.dim, point(x), method, tol)

    def inside(x):
        return verdict(x).closed_inside

    def edge(a, b):
        t_in, t_out = _bisect(inside, a, b)
        x, v, g = _settle(sl.dim, point, t_in, t_out, method, tol)
        return float(x), BoundaryPoint(g, v.margin, method)

    def oracle_margin(x):
        return verdict(x).margin if method == "oracle" else classify(sl.dim, point(x), "oracle", tol).margin

    verdicts = [verdict(x) for x in xs]
    flags = [v.closed_inside for v in verdicts]
    found = []
    for k in range(len(xs) - 1):
        if flags[k] != flags[k + 1]:
            a, b = (xs[k], xs[k + 1]) if flags[k] else (xs[k + 1], xs[k])
            found.append(edge(a, b))
    if refine:
        margins = [v.margin for v in verdicts] if method == "oracle" else [oracle_margin(x) for x in xs]
        for k in range(1, len(xs) - 1):
            if flags[k - 1] or flags[k] or flags[k + 1]:
                continue
            if not (margins[k] >= margins[k - 1] and margins[k] >= margins[k + 1]):
                continue
            x, m = _golden_max(oracle_margin, xs[k - 1], xs[k + 1])
            if inside(x):
                found.append(edge(x, xs[k - 1]))
                found.append(edge(x, xs[k + 1]))
    found.sort(key=lambda item: item[0])
    return xs, verdicts, flags, found


def slice_trace(sl: SliceSpec, method: str = "criteria", tol: ToleranceConfig = DEFAULT_TOL) -> TraceResult:
    t0 = time.perf_counter()
    points = []
    segments = []
    rejected = 0
    if len(sl.free_axes) == 1:
        xs, verdicts, flags, found = _scan_line(sl, {}, 0, method, tol)
        codes = np.array([_code(v) for v in verdicts], dtype=np.int8)
        segments = _segments(float(xs[0]), float(xs[-1]), flags[0], [x for x, _ in found])
        for _, p in found:
            if abs(p.margin) <= tol.boundary_tol:
                points.append(p)
            else:
                rejected += 1
    else:
        cols = sl.axis(0)
        codes = np.zeros((len(cols), sl.resolution[1]), dtype=np.int8)
        for i, x in enumerate(cols):
            _, verdicts, _, found = _scan_line(sl, {sl.free_axes[0]: float(x)}, 1, method, tol)
            codes[i] = [_code(v) for v in verdicts]
            for _, p in found:
                if abs(p.margin) <= tol.boundary_tol:
                    points.append(p)
                else:
                    rejected += 1
    meta = {"tolerances": tol.to_dict(), "slice": sl.to_dict(), "method": method}
    return TraceResult(sl, method, tuple(points), tuple(segments), codes, rejected, meta,
                       time.perf_counter() - t0)


def _segments(lo, hi, start_inside, cuts):
    """Closed-inside intervals of [lo, hi] given the sorted crossing points."""
    out = []
    edges = [lo] + list(cuts) + [hi]
    state = start_inside
    for a, b in zip(edges, edges[1:]):
        if state and b > a:
            out.append((a, b))
        state = not state
    return out


def _code(v: Verdict) -> int:
    return {Region.INSIDE: 0, Region.OUTSIDE: 1, Region.BOUNDARY: 2}[v.region]


# -- sampling ----------------------------------------------------------------

@dataclass(frozen=True)
class Disagreement:
    index: int
    g: tuple
    criteria: str
    oracle: str
    criteria_margin: float
    oracle_margin: float
    band: float = field(default=1e-6, repr=False)

    @property
    def in_band(self) -> bool:
        return min(abs(self.criteria_margin), abs(self.oracle_margin)) <= self.band

    def to_dict(self) -> dict:
        return {"index": self.index, "g": list(self.g), "criteria": self.criteria, "oracle": self.oracle,
                "criteria_margin": self.criteria_margin, "oracle_margin": self.oracle_margin}


@dataclass(frozen=True)
class AgreementReport:
    dim: int
    count: int
    seed: int
    box: tuple
    agreements: int
    disagreements: tuple
    out_of_band: int
    region_counts: dict
    runtime: float = field(default=0.0, compare=False)

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.count if self.count else 1.0

    @property
    def ok(self) -> bool:
        return self.out_of_band == 0

    def to_dict(self, timing: bool = True) -> dict:
        out = {"dim": self.dim, "count": self.count, "seed": self.seed,
               "box": [list(b) for b in self.box], "agreements": self.agreements,
               "agreement_rate": self.agreement_rate, "out_of_band": self.out_of_band,
               "region_counts": dict(self.region_counts),
               "disagreements": [d.to_dict() for d in self.disagreements]}
        if timing:
            out["runtime_s"] = self.runtime
            out["us_per_sample"] = 1e6 * self.runtime / self.count if self.count else 0.0
        return out


def _compare_chunk(args):
    dim, rows, tol = args
    out = []
    for g in rows:
        form = secular_form(ChainSpec(dim, tuple(g)))
        vc = criteria.member(form, tol)
        vo = oracle.classify_form(form, tol)
        out.append((vc.region.value, vc.margin, vo.region.value, vo.margin))
    return out


def draw_box(dim: int, box, count: int, seed: int) -> np.ndarray:
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    rng = np.random.default_rng(seed)
    return lo + (hi - lo) * rng.random((count, len(box)))


def sample_verify(dim: int, box=None, count: int = 10_000, seed: int = 0,
                  tol: ToleranceConfig = DEFAULT_TOL, workers: int = 1,
                  chunk: int = 2000) -> AgreementReport:
    """Compare criteria.member with the oracle on seeded uniform samples.

    A disagreement is a region mismatch; it is out of band when both margins
    exceed tol.band_tol in magnitude.
    """
    box = default_box(dim) if box is None else tuple((float(a), float(b)) for a, b in box)
    if len(box) != n_couplings(dim):
        raise ValidationError(f"box needs {n_couplings(dim)} ranges")
    t0 = time.perf_counter()
    xs = draw_box(dim, box, count, seed)
    jobs = [(dim, xs[k:k + chunk].tolist(), tol) for k in range(0, count, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_compare_chunk, jobs))  # map keeps index order
    else:
        parts = [_compare_chunk(job) for job in jobs]
    rows = [r for part in parts for r in part]
    agree = 0
    bad = []
    counts = {r.value: 0 for r in Region}
    for k, (rc, mc, ro, mo) in enumerate(rows):
        counts[ro] += 1
        if rc == ro:
            agree += 1
        else:
            bad.append(Disagreement(k, tuple(float(x) for x in xs[k]), rc, ro, mc, mo, tol.band_tol))
    out = sum(1 for d in bad if not d.in_band)
    return AgreementReport(dim, count, seed, box, agree, tuple(bad), out, counts,
                           time.perf_counter() - t0)


def sample_inside(dim: int, count: int, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL,
                  box=None, step: float = 0.15, thin: int = 2, burn: int = 200) -> np.ndarray:
    """Seeded random-walk Metropolis draws from the uniform law on D within a box.

    Membership is decided by the oracle (strict Inside).  Uniform rejection
    sampling is hopeless at J = 5, where D fills only a few percent of the
    default box.
    """
    box = default_box(dim, 1.0) if box is None else tuple((float(a), float(b)) for a, b in box)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    width = hi - lo
    rng = np.random.default_rng(seed)

    def inside(x):
        return oracle.classify_spec(ChainSpec(dim, tuple(x)), tol).region is Region.INSIDE

    x = lo + 0.25 * width
    if not inside(x):
        x = lo.copy()
        if not inside(x):
            raise ValidationError("cannot find an Inside starting point in the box")
    out = np.empty((count, len(box)))
    k = 0
    it = 0
    while k < count:
        y = x + step * width * rng.standard_normal(len(box))
        if np.all(y >= lo) and np.all(y <= hi) and inside(y):
            x = y
        it += 1
        if it > burn and it % thin == 0:
            out[k] = x
            k += 1
    return out
