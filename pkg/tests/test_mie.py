import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from disturbed_fso.mie import (
    ComplexRefractiveIndex,
    MieResolutionError,
    extinction_efficiency,
    mie_coefficients,
    mie_efficiencies,
    size_parameter,
    wiscombe_nmax,
)

from oracles import brute_force_mie, rayleigh_q_sca


def test_size_parameter_values():
    assert size_parameter(12e-6, 1550e-9) == pytest.approx(24.322007640695173, rel=1e-14)
    assert size_parameter(130e-6, 800e-9) == pytest.approx(510.50880620834135, rel=1e-14)


@pytest.mark.parametrize("d, lam", [(0, 1e-6), (-1e-6, 1e-6), (1e-6, 0)])
def test_size_parameter_rejects_non_positive(d, lam):
    with pytest.raises(ValueError):
        size_parameter(d, lam)


def test_wiscombe_nmax():
    assert wiscombe_nmax(1.0) == math.ceil(1 + 4 + 2)
    assert wiscombe_nmax(1000.0) == math.ceil(1000 + 4 * 1000 ** (1 / 3) + 2)


def test_refractive_index_coerce():
    m = ComplexRefractiveIndex.coerce(1.5 + 0.01j)
    assert m.value == 1.5 + 0.01j
    assert ComplexRefractiveIndex.coerce(m) is m
    assert ComplexRefractiveIndex.coerce((1.33, 0.0)).value == 1.33


@pytest.mark.parametrize("bad", [(0.0, 0.1), (1.5, -0.1), (float("nan"), 0.0)])
def test_refractive_index_rejects_unphysical(bad):
    with pytest.raises(ValueError):
        ComplexRefractiveIndex(*bad)


@pytest.mark.parametrize(
    "m, x",
    [
        (1.5 + 0.01j, 5.0),
        (1.33 + 1e-8j, 0.5),
        (1.318 + 1e-4j, 24.3),
        (1.55 + 0.005j, 50.0),
        (2.0 + 1.0j, 10.0),
        (1.05 + 0j, 30.0),
        (1.5 + 0j, 1.0),
    ],
)
def test_agrees_with_brute_force_series(m, x):
    q_ext, q_sca = brute_force_mie(m, x)
    eff = mie_efficiencies(m, x)
    assert eff.q_ext == pytest.approx(q_ext, rel=1e-6)
    assert eff.q_sca == pytest.approx(q_sca, rel=1e-6)


def test_frozen_extinction_value():
    assert mie_efficiencies(1.5 + 0.01j, 5.0).q_ext == pytest.approx(3.818318778595336, rel=1e-12)


def test_rayleigh_limit():
    for m in (1.5 + 0j, 1.33 + 0j, 1.55 + 0.005j):
        for x in (1e-3, 5e-3, 1e-2):
            assert mie_efficiencies(m, x).q_sca == pytest.approx(rayleigh_q_sca(m, x), rel=0.01)


def test_large_sphere_approaches_extinction_paradox():
    q = mie_efficiencies(1.5, 1000.0).q_ext
    assert 1.9 <= q <= 2.1


def test_absorption_index_is_used():
    absorbing = mie_efficiencies(1.5 + 0.1j, 3.0)
    clear = mie_efficiencies(1.5, 3.0)
    assert absorbing.q_abs > 0.1
    assert clear.q_abs == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    n_re=st.floats(1.01, 2.5),
    n_im=st.floats(0.0, 1.0),
    x=st.floats(0.01, 200.0),
)
def test_energy_balance(n_re, n_im, x):
    eff = mie_efficiencies(complex(n_re, n_im), x)
    assert eff.q_ext > 0
    assert eff.q_sca >= 0
    assert eff.q_ext == pytest.approx(eff.q_sca + eff.q_abs, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(n_re=st.floats(1.01, 2.0), x=st.floats(0.05, 100.0))
def test_non_absorbing_spheres_only_scatter(n_re, x):
    eff = mie_efficiencies(complex(n_re, 0.0), x)
    assert eff.q_ext == pytest.approx(eff.q_sca, rel=1e-9)


def test_deterministic():
    a = mie_coefficients(1.55 + 0.005j, 123.4)
    b = mie_coefficients(1.55 + 0.005j, 123.4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_coefficient_count_follows_nmax():
    a, b = mie_coefficients(1.5, 10.0)
    assert a.shape == b.shape == (wiscombe_nmax(10.0),)
    a, _ = mie_coefficients(1.5, 10.0, nmax=5)
    assert a.shape == (5,)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf"), 1e7])
def test_rejects_unusable_size_parameters(x):
    with pytest.raises((ValueError, MieResolutionError)):
        mie_efficiencies(1.5, x)


def test_extinction_efficiency_from_diameter():
    q = extinction_efficiency(1.318 + 1e-4j, 12e-6, 1550e-9)
    assert q == pytest.approx(mie_efficiencies(1.318 + 1e-4j, size_parameter(12e-6, 1550e-9)).q_ext)
