import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chainhorizon import criteria, landmarks, oracle
from chainhorizon.chain_model import ChainSpec, secular_form
from chainhorizon.config import Region
from chainhorizon.errors import ImaginaryCouplingError, NoSolutionError, ValidationError
from chainhorizon.tracer import ray_bisect


def test_spike_examples():
    assert landmarks.spikes(2) == [1.0]
    assert landmarks.spikes(3) == pytest.approx([math.sqrt(2)])
    assert landmarks.spikes(6) == pytest.approx([math.sqrt(5), math.sqrt(8), 3.0])
    assert landmarks.spikes(11) == pytest.approx([math.sqrt(v) for v in (10, 18, 24, 28, 30)])
    with pytest.raises(ValidationError):
        landmarks.spikes(1)


@pytest.mark.parametrize("dim", range(2, 12))
def test_spike_boundary_adherence(dim):
    f = secular_form(landmarks.spike_spec(dim))
    assert max(abs(c) for c in f.coeffs) <= 1e-9
    assert criteria.member(f).region is Region.BOUNDARY


@pytest.mark.parametrize("dim", range(2, 8))
def test_float_spike_still_boundary(dim):
    # rounded square roots only perturb the coefficients at rounding level
    f = secular_form(ChainSpec(dim, landmarks.spikes(dim)))
    assert criteria.member(f).region is Region.BOUNDARY


@pytest.mark.parametrize("dim", [2, 5, 9, 11])
def test_ansatz_at_zero_is_spike(dim):
    p = landmarks.ansatz_point(dim, 0.0, [0.7] * (dim // 2))
    assert p.couplings == tuple(landmarks.spikes(dim))


def test_ansatz_two_by_two():
    p = landmarks.ansatz_point(2, 0.2, [1.5])
    assert p.gammas == pytest.approx((0.3,))
    assert p.couplings[0] == pytest.approx(math.sqrt(0.7))


def test_ansatz_j3_example():
    p = landmarks.ansatz_point(6, 0.1, [1.0, 1.0, 1.0])
    assert p.gammas == pytest.approx((0.111,) * 3)
    want = [s * math.sqrt(0.889) for s in landmarks.spikes(6)]
    assert p.couplings == pytest.approx(want)


def test_ansatz_imaginary():
    with pytest.raises(ImaginaryCouplingError):
        landmarks.ansatz_point(4, 0.5, [10.0, 0.0])


@given(st.floats(0.0, 0.3), st.floats(-3, 3), st.floats(-3, 3))
def test_ansatz_continuity(t, g1, g2):
    a = landmarks.ansatz_point(5, t, [g1, g2]).couplings
    b = landmarks.ansatz_point(5, t + 1e-9, [g1, g2]).couplings
    assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-6


def test_admissible_interval_n2():
    iv = landmarks.ansatz_admissible_interval(2, 0.01, 1, [])
    assert iv.lo == pytest.approx(0.0, abs=1e-6)
    assert iv.hi == pytest.approx(100.0, rel=1e-6)


def test_admissible_interval_n4_nonempty():
    iv = landmarks.ansatz_admissible_interval(4, 0.05, 1, [-1.0])
    assert not iv.empty
    mid = 0.5 * (iv.lo + iv.hi)
    spec = landmarks.ansatz_point(4, 0.05, [mid, -1.0]).spec
    assert oracle.classify_spec(spec).region is Region.INSIDE


def test_admissible_interval_empty_when_others_imaginary():
    iv = landmarks.ansatz_admissible_interval(4, 0.5, 1, [100.0])
    assert iv.empty and iv.width == 0.0


def test_admissible_interval_validation():
    with pytest.raises(ValidationError):
        landmarks.ansatz_admissible_interval(4, 1.5, 1, [0.0])
    with pytest.raises(ValidationError):
        landmarks.ansatz_admissible_interval(4, 0.1, 3, [0.0])


def test_dep_residual_examples():
    assert landmarks.dep_residuals(3.0, math.sqrt(8.0), math.sqrt(5.0)) == pytest.approx((0.0, 0.0), abs=1e-11)
    assert landmarks.dep_residuals(0.0, 0.0, 0.0)[0] == -225.0
    # first factor pair at the EEP
    a, b2, c2 = 3.0, 8.0, 5.0
    assert (a * c2 + 15 * a, 15 + c2 + 5 * b2) == (60.0, 60.0)


def test_r1_is_minus_r(rng):
    for a, b, c in rng.uniform(0, 4, (50, 3)):
        f = secular_form(ChainSpec(6, (c, b, a)))
        r1, _ = landmarks.dep_residuals(a, b, c)
        assert r1 == pytest.approx(-f.R, rel=1e-10, abs=1e-9)


def test_r2_is_scaled_double_root_condition(rng):
    for a, b, c in rng.uniform(0, 4, (50, 3)):
        f = secular_form(ChainSpec(6, (c, b, a)))
        _, r2 = landmarks.dep_residuals(a, b, c)
        assert r2 == pytest.approx(4 * 3 * f.Q - (3 * f.P) ** 2, rel=1e-9, abs=1e-8)


def test_off_curve_point_is_generic():
    a, b, c = 2.0, 1.0, 1.0
    r1, r2 = landmarks.dep_residuals(a, b, c)
    assert abs(r1) > 1 and abs(r2) > 1
    conf = oracle.spectrum(ChainSpec(6, (c, b, a))).confluence
    assert conf.to_list() == [1, 1, 1]


def test_dep_at_eep():
    (sol,) = landmarks.dep_solve(math.sqrt(5.0))
    assert (sol.a, sol.b_sq, sol.z_sq) == pytest.approx((3.0, 8.0, 0.0), abs=1e-9)
    assert oracle.spectrum(sol.spec).confluence.to_list() == [3]


@pytest.mark.parametrize("c", [1.2, 1.6, 2.0, 2.2, 2.236])
def test_dep_curve_points(c):
    for sol in landmarks.dep_solve(c):
        assert 1.0 <= sol.a <= 3.0 and sol.b_sq >= 0 and sol.z_sq > 0
        assert max(abs(r) for r in sol.residuals) <= 1e-9
        assert not sol.warning
        conf = oracle.spectrum(sol.spec).confluence
        assert conf.to_list() == [1, 2] and conf.zero_multiplicity == 1


def test_dep_no_solution():
    with pytest.raises(NoSolutionError):
        landmarks.dep_solve(0.5)


def test_pairwise_identity():
    x, y = 0.4, 0.9
    s_min, s_max = 16 * x * x, 25 * y * y
    p3, q3, r = 2 * s_min + s_max, s_min ** 2 + 2 * s_min * s_max, s_min ** 2 * s_max
    assert (32 * x * x + 25 * y * y, 256 * x ** 4 + 800 * x * x * y * y, 6400 * x ** 4 * y * y) == pytest.approx((p3, q3, r))


def test_pairwise_decoupled_has_no_fit():
    # g = 0: s = {1, 9, 25}, all distinct
    x, y = landmarks.fit_pairwise_confluence(0.0, 0.0, 0.0)
    res = landmarks.pairwise_confluence_residual(0.0, 0.0, 0.0, x, y)
    assert max(abs(v) for v in res) > 1e-3


def test_pairwise_fit_on_traced_point():
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(12):
        bp = ray_bisect(6, np.abs(rng.normal(size=3)))
        roots = sorted(z.real for z in oracle.spectrum(ChainSpec(6, bp.g)).s_roots)
        if roots[0] < 1e-6 or abs(roots[1] - roots[0]) > 1e-4 * roots[2]:
            continue  # a different stratum of the horizon
        c, b, a = bp.g
        x, y = landmarks.fit_pairwise_confluence(a, b, c)
        assert 0 < x < 1 and 0 < y < 1
        assert max(abs(v) for v in landmarks.pairwise_confluence_residual(a, b, c, x, y)) <= 1e-8
        hits += 1
    assert hits >= 3
