from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chainhorizon import oracle
from chainhorizon.chain_model import ChainSpec, SecularForm, build, secular_form
from chainhorizon.config import Region, ToleranceConfig
from chainhorizon.errors import ValidationError
from chainhorizon.landmarks import spike_spec

from conftest import random_spec

RANK = {Region.OUTSIDE: 0, Region.BOUNDARY: 1, Region.INSIDE: 2}


def _match(found, want, tol):
    """Greedy nearest matching; sorting alone can swap near-equal conjugates."""
    left = [complex(w) for w in want]
    if len(left) != len(found):
        return False
    for z in found:
        k = min(range(len(left)), key=lambda i: abs(left[i] - z))
        if abs(left[k] - z) > tol * max(1.0, abs(z)):
            return False
        left.pop(k)
    return True


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_poly_roots_recovers_real_roots(roots):
    roots = sorted(roots)
    spread = min((b - a for a, b in zip(roots, roots[1:])), default=1.0)
    if spread < 1e-2:
        return
    found = oracle.poly_roots(np.poly(roots).tolist())
    assert _match(found, roots, 1e-6)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_conjugate_closure(seed, j):
    rng = np.random.default_rng(seed)
    coeffs = [1.0] + list(rng.normal(size=j))
    roots = oracle.poly_roots(coeffs)
    for z in roots:
        if abs(z.imag) > 1e-12:
            assert min(abs(w - z.conjugate()) for w in roots) <= 1e-8 * max(1.0, abs(z))


def test_poly_roots_matches_numpy(rng):
    for _ in range(200):
        n = int(rng.integers(1, 6))
        coeffs = [1.0] + list(rng.normal(size=n) * 10)
        assert _match(oracle.poly_roots(coeffs), list(np.roots(coeffs)), 1e-7)


def test_exact_zero_roots_deflated():
    roots = oracle.poly_roots([1.0, -3.0, 2.0, 0.0, 0.0])
    assert sorted(z.real for z in roots) == [0.0, 0.0, 1.0, 2.0]


def test_poly_roots_rejects_non_monic():
    with pytest.raises(ValidationError):
        oracle.poly_roots([2.0, 1.0])
    with pytest.raises(ValidationError):
        oracle.poly_roots([1.0, float("inf")])


def test_comp_horner_beats_cancellation():
    # (x - 1)^5 expanded, evaluated next to the root
    co = [1.0, -5.0, 10.0, -10.0, 5.0, -1.0]
    x = 1.0 + 2.0 ** -12
    exact = float(sum(Fraction(c) * Fraction(x) ** (5 - i) for i, c in enumerate(co)))
    got = oracle.comp_horner(co, complex(x)).real
    assert got == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("dim", range(2, 12))
def test_spectrum_matches_eigvals(dim, rng):
    for _ in range(5):
        spec = random_spec(rng, dim, factor=0.1)
        rep = oracle.spectrum(spec)
        assert len(rep.energies) == dim
        ev = np.linalg.eigvals(build(spec))
        assert _match(rep.energies, list(ev), 1e-7)
        assert rep.all_real_nonneg


@pytest.mark.parametrize("dim", range(2, 12))
def test_eep_confluence_total(dim):
    rep = oracle.spectrum(spike_spec(dim))
    assert rep.confluence.multiplicities == (dim // 2,)
    assert rep.confluence.zero_multiplicity == dim // 2
    assert oracle.classify(rep).region is Region.BOUNDARY


def test_odd_dimension_keeps_zero_level():
    rep = oracle.spectrum(ChainSpec(5, (0.5, 0.5)))
    assert sum(1 for e in rep.energies if e == 0) >= 1
    assert len(rep.energies) == 5


def test_cluster_squared_gap():
    tol = ToleranceConfig()
    # relative gap 5e-4 has squared gap 2.5e-7 <= 1e-6
    assert [len(g) for g in oracle.cluster([1.0, 1.0005, 3.0], tol)] == [2, 1]
    assert [len(g) for g in oracle.cluster([1.0, 1.01, 3.0], tol)] == [1, 1, 1]


def test_confluence_pattern_doublet():
    form = SecularForm.from_s_roots([0.0, 2.0, 2.0])
    rep = oracle.spectrum_of_form(form)
    conf = oracle.confluence_pattern(rep)
    assert conf.to_list() == [1, 2]
    assert conf.zero_multiplicity == 1


def test_margin_signs():
    assert oracle.classify_roots([1.0, 2.0, 3.0]).region is Region.INSIDE
    assert oracle.classify_roots([-1.0, 2.0]).region is Region.OUTSIDE
    assert oracle.classify_roots([1 + 1j, 1 - 1j]).region is Region.OUTSIDE
    assert oracle.classify_roots([0.0, 2.0]).region is Region.BOUNDARY
    assert oracle.classify_roots([2.0, 2.0]).region is Region.BOUNDARY


@given(st.integers(0, 2**32 - 1), st.integers(2, 11))
def test_region_monotone_in_real_tol(seed, dim):
    spec = random_spec(np.random.default_rng(seed), dim)
    form = secular_form(spec)
    loose = oracle.classify_form(form, ToleranceConfig(real_tol=1e-5))
    tight = oracle.classify_form(form, ToleranceConfig(real_tol=1e-12))
    assert RANK[loose.region] >= RANK[tight.region]


@given(st.integers(0, 2**32 - 1))
def test_margin_lipschitz_in_couplings(seed):
    # a small coupling step moves the margin by at most a bounded amount
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, 6, factor=1.0)
    step = 1e-7
    other = ChainSpec(6, tuple(g + step for g in spec.couplings))
    m1 = oracle.classify_spec(spec).margin
    m2 = oracle.classify_spec(other).margin
    assert abs(m1 - m2) <= 1e-4
