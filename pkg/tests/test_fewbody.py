import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isqscatter.abscatter import anomalous_channels, flux_config, flux_config_from_g
from isqscatter.fewbody import (
    ThreeBodyMasses,
    TwoBodyMasses,
    effective_channel,
    reduce_three_body,
    reduce_two_body,
    winding_phase,
)
from isqscatter.smatrix import s_eval

masses = st.floats(1e-2, 1e2)


def test_two_body_equal_masses():
    r = reduce_two_body(TwoBodyMasses(2.0, 2.0))
    assert r.reduced_masses == (1.0, 4.0)
    assert r.kinetic_prefactor == 0.5


def test_two_body_heavy_partner():
    r = reduce_two_body(TwoBodyMasses(1.5, 1e12))
    assert r.reduced_masses[0] == pytest.approx(1.5, rel=1e-11)


def test_three_body_equal_masses_exact():
    r = reduce_three_body(ThreeBodyMasses(3.0, 3.0, 3.0))
    assert r.reduced_masses == (1.5, 2.0, 9.0)
    assert r.mu0_defaulted and r.mu_ref == 1.5
    assert r.kinetic_prefactor == 1 / 3


def test_three_body_explicit_mu0():
    r = reduce_three_body(ThreeBodyMasses(1.0, 2.0, 3.0, mu0=5.0))
    assert not r.mu0_defaulted and r.mu_ref == 5.0 and r.kinetic_prefactor == 0.1


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 1.0), (1.0, math.inf)])
def test_masses_validated(bad):
    with pytest.raises(ValueError):
        TwoBodyMasses(*bad)
    with pytest.raises(ValueError):
        ThreeBodyMasses(*bad, 1.0)


def test_mu0_validated():
    with pytest.raises(ValueError):
        ThreeBodyMasses(1.0, 1.0, 1.0, mu0=0.0)


@given(masses, masses)
def test_two_body_round_trip_and_congruence(m1, m2):
    r = reduce_two_body(TwoBodyMasses(m1, m2))
    eye = np.eye(2)
    assert np.max(np.abs(r.jacobi_forward @ r.jacobi_backward - eye)) <= 1e-14
    assert np.max(np.abs(r.jacobi_backward @ r.jacobi_forward - eye)) <= 1e-14
    inv_mass = r.jacobi_forward @ np.diag([1 / m1, 1 / m2]) @ r.jacobi_forward.T
    target = np.diag(1 / np.array(r.reduced_masses))
    assert np.max(np.abs(inv_mass - target)) <= 1e-14 * np.max(target)


@given(masses, masses, masses)
def test_three_body_round_trip_and_congruence(m1, m2, m3):
    r = reduce_three_body(ThreeBodyMasses(m1, m2, m3))
    eye = np.eye(3)
    assert np.max(np.abs(r.jacobi_forward @ r.jacobi_backward - eye)) <= 1e-14
    inv_mass = r.jacobi_forward @ np.diag([1 / m1, 1 / m2, 1 / m3]) @ r.jacobi_forward.T
    target = np.diag(1 / np.array(r.reduced_masses))
    assert np.max(np.abs(inv_mass - target)) <= 1e-14 * np.max(target)


@given(masses, masses, masses, st.none() | masses)
def test_polar_map_is_isotropic(m1, m2, m3, mu0):
    r = reduce_three_body(ThreeBodyMasses(m1, m2, m3, mu0))
    s_inv = np.diag(1 / np.array(r.polar_scaling))
    metric = s_inv @ np.diag(1 / np.array(r.reduced_masses[:2])) @ s_inv.T
    assert np.max(np.abs(metric * r.mu_ref - np.eye(2))) <= 1e-15


def test_coincidence_is_origin():
    r = reduce_three_body(ThreeBodyMasses(1.0, 2.0, 3.0))
    xi = r.jacobi_forward @ np.array([0.7, 0.7, 0.7])
    assert np.allclose(xi[:2], 0.0, atol=1e-15) and xi[2] == pytest.approx(0.7)
    xi = r.jacobi_forward @ np.array([0.7, 0.7, 0.8])
    assert abs(xi[1]) > 0


def test_winding_phase_examples():
    assert winding_phase(0, 0.37) == 1
    assert winding_phase(1, 0.5) == pytest.approx(-1, abs=1e-15)


@given(st.integers(-50, 50), st.integers(-50, 50), st.floats(-3.0, 3.0))
def test_winding_phase_homomorphism(n1, n2, alpha):
    lhs = winding_phase(n1 + n2, alpha)
    assert abs(lhs - winding_phase(n1, alpha) * winding_phase(n2, alpha)) <= 1e-12
    assert abs(abs(lhs) - 1) <= 1e-14


@pytest.mark.parametrize("m", [TwoBodyMasses(1.0, 3.0), ThreeBodyMasses(1.0, 2.0, 5.0)])
def test_effective_channel_equals_one_body(m):
    cfg, _ = effective_channel(m, 0.3)
    assert cfg == flux_config(0.3)
    assert [(n, ch.nu) for n, ch in cfg.channels] == list(anomalous_channels(0.3))


def test_two_and_three_body_share_s_matrix():
    g = (0.8, -1.3)
    c2, _ = effective_channel(TwoBodyMasses(1.0, 4.0), 0.3, g=g)
    c3, _ = effective_channel(ThreeBodyMasses(2.0, 1.0, 7.0), 0.3, g=g)
    assert c2 == c3 == flux_config_from_g(0.3, g)
    k = np.geomspace(0.1, 10, 20)
    for (_, a), (_, b) in zip(c2.channels, c3.channels):
        assert np.array_equal(s_eval(a, k), s_eval(b, k))


@given(st.floats(0.1, 10.0))
def test_mass_rescaling_invariance(c):
    base, red = effective_channel(ThreeBodyMasses(1.0, 2.0, 3.0), 1.3)
    scaled, red_c = effective_channel(ThreeBodyMasses(c, 2 * c, 3 * c), 1.3)
    assert base == scaled
    assert red_c.mu_ref == pytest.approx(c * red.mu_ref)


def test_effective_channel_rejects_integer_flux_and_bad_masses():
    with pytest.raises(ValueError):
        effective_channel(TwoBodyMasses(1.0, 1.0), 2.0)
    with pytest.raises(TypeError):
        effective_channel((1.0, 1.0), 0.3)
