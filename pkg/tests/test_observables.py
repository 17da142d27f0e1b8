"""Rates, correlators and joint port statistics."""
import math

import numpy as np
import pytest

from bellopt import closed_form as cf
from bellopt import fock
from bellopt import observables as obs

VAC = fock.vacuum()
ONE = fock.bsv_component(1)


def test_joint_distribution_vacuum():
    d = obs.joint_port_distribution(VAC, (0.4, 1.3))
    assert list(d.values()) == [pytest.approx(1.0)]
    (a, b), = d
    assert tuple(a) == (0, 0) and tuple(b) == (0, 0)


def test_joint_distribution_singlet_equal_angles():
    d = {(tuple(a), tuple(b)): p for (a, b), p in obs.joint_port_distribution(ONE, (0.7, 0.7)).items()}
    assert d == {((1, 0), (0, 1)): pytest.approx(0.5), ((0, 1), (1, 0)): pytest.approx(0.5)}


def test_joint_distribution_sector_weights():
    g = 0.5
    d = obs.joint_port_distribution(fock.bsv_state(g, 15), (0.0, 0.0))
    sectors = {}
    for (a, b), p in d.items():
        n = a.n_plus + a.n_minus
        sectors[n] = sectors.get(n, 0.0) + p
    for n in range(16):
        assert sectors[n] == pytest.approx(fock.sector_weight(g, n), rel=1e-12)


def test_local_rates():
    assert obs.rate_expectation(VAC, "A", 0.3) == 0.0
    assert obs.rate_expectation(VAC, "A", 0.3, primed=True) == 1.0
    for side in "AB":
        for angle in (0.0, 0.5, 2.0):
            assert obs.rate_expectation(ONE, side, angle) == pytest.approx(0.5)


def test_correlator_c_vacuum_is_plus_one():
    assert obs.correlator_C(VAC, (0.0, 0.0)) == 1.0


@pytest.mark.parametrize("theta,phi", [(0.0, 0.0), (0.3, 0.1), (1.0, -0.4)])
def test_correlator_singlet(theta, phi):
    delta = 2 * (theta - phi)
    assert obs.correlator_C(ONE, theta, phi) == pytest.approx(-math.cos(delta), abs=1e-14)
    assert obs.correlator_F(ONE, theta, phi) == pytest.approx(-math.cos(delta), abs=1e-14)
    assert obs.correlator_K(ONE, theta, phi) == pytest.approx((1 - math.cos(delta)) / 4, abs=1e-14)


def test_vacuum_zeros():
    assert obs.correlator_K(VAC, 0.2, 0.9) == 0.0
    assert obs.correlator_F(VAC, 0.2, 0.9) == 0.0
    assert obs.distance_correlator_rates(VAC, 0.2, 0.9) == 0.0
    assert obs.distance_correlator_intensities(VAC, 0.2, 0.9) == 0.0
    assert obs.stokes_prime_expectation(VAC, "A", 0.3) == 0.0
    ratio = obs.correlator_E_intensity(VAC, 0.0, 0.0)
    assert ratio.numerator == 0 and ratio.denominator == 0


def test_e_on_vacuum_raises():
    with pytest.raises(obs.ZeroIntensityDenominator):
        obs.correlator_E(VAC, 0.0, 0.0)


def test_distance_singlet_equal_angles():
    assert obs.distance_correlator_rates(ONE, 0.4, 0.4) == pytest.approx(1.0)
    assert obs.distance_correlator_intensities(ONE, 0.4, 0.4) == pytest.approx(1.0)


def test_stokes_single_photon_eigenstate():
    s = fock.FourModeState({(1, 0, 0, 0): 1.0})
    assert obs.stokes_prime_expectation(s, "A", 0.0) == pytest.approx(1.0)


def test_stokes_bsv_unpolarized():
    s = fock.bsv_state(0.7, 40)
    for side in "AB":
        for angle in np.linspace(0, math.pi, 7):
            assert abs(obs.stokes_prime_expectation(s, side, angle)) < 1e-14


@pytest.mark.parametrize("gamma", [0.5])
@pytest.mark.parametrize("sep", np.linspace(0, math.pi, 5))
def test_bsv_matches_closed_forms(gamma, sep):
    s = fock.bsv_state(gamma, fock.auto_cutoff(gamma, 1e-12))
    theta, phi = 0.2 + sep / 2, 0.2
    assert obs.correlator_C(s, theta, phi) == pytest.approx(cf.c_closed(gamma, sep), abs=1e-8)
    assert obs.correlator_K(s, theta, phi) == pytest.approx(cf.k_closed(gamma, sep), abs=1e-8)
    assert obs.correlator_F(s, theta, phi) == pytest.approx(cf.f_closed(gamma, sep), abs=1e-8)


def test_f_magnitude_decreases_at_large_gain():
    values = [abs(obs.correlator_F(fock.bsv_state(g, fock.auto_cutoff(g, 1e-8)), 0.0, 0.0)) for g in (1.0, 1.2, 1.4)]
    assert values[0] > values[1] > values[2]
    tail = [cf.c_coefficients(g)[1] for g in np.arange(1.4, 4.0, 0.2)]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_e_numerator_bsv():
    g = 0.6
    s = fock.bsv_state(g, fock.auto_cutoff(g, 1e-14))
    ratio = obs.correlator_E_intensity(s, 0.3, 0.1)
    assert ratio.numerator == pytest.approx(cf.e_numerator(g, 0.4), rel=1e-10)
    assert ratio.denominator == pytest.approx(cf.intensity_product_mean(g), rel=1e-10)


@pytest.mark.parametrize("n", range(1, 7))
def test_per_n_intensity_numerator(n):
    ratio = obs.correlator_E_intensity(fock.bsv_component(n), 0.0, 0.0)
    assert ratio.numerator == pytest.approx(-cf.per_n_intensity_coeff(n), abs=1e-10)


def test_visibility_helper():
    assert obs.visibility([1.0, 3.0]) == pytest.approx(0.5)


def test_setting_pair_delta():
    assert obs.SettingPair(0.5, 0.2).delta == pytest.approx(0.6)
