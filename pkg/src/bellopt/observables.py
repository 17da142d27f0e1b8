"""Expectation values of intensity and rate observables on four-mode states.

Every observable used here is diagonal in the photon-number basis of the
rotated analyzer modes, so each expectation is a sum over the joint
distribution of the four output counts. Angles are physical analyzer angles.
On the squeezed vacuum the correlators depend on ``2 * (theta - phi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from bellopt.fock import FourModeState
from bellopt.kernels import distance_sum, rotation_matrix


@dataclass(frozen=True)
class SettingPair:
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("analyzer angles must be finite")

    @property
    def delta(self) -> float:
        """Correlation angle 2 (theta - phi)."""
        return 2.0 * (self.theta - self.phi)


class PortOutcome(NamedTuple):
    n_plus: int
    n_minus: int


class IntensityRatio(NamedTuple):
    """Numerator and denominator of the normalized intensity correlator."""

    numerator: float
    denominator: float

    @property
    def value(self) -> float:
        if self.denominator == 0:
            raise ZeroIntensityDenominator("zero intensity denominator")
        return self.numerator / self.denominator


class ZeroIntensityDenominator(ZeroDivisionError):
    """<I_A I_B> vanishes, so the intensity correlator is undefined."""


def _settings(settings, phi=None):
    if phi is not None:
        return SettingPair(float(settings), float(phi))
    if isinstance(settings, SettingPair):
        return settings
    theta, phi = settings
    return SettingPair(float(theta), float(phi))


def port_blocks(state: FourModeState, theta: float, phi: float):
    """Yield ``(N_a, N_b, P)`` with ``P[i, j]`` the probability of ``i`` photons
    at Alice's + port and ``j`` at Bob's, given N_a and N_b photons per side."""
    for (na, nb), m in state.blocks().items():
        amp = rotation_matrix(na, theta) @ m @ rotation_matrix(nb, phi).T
        yield na, nb, amp.real ** 2 + amp.imag ** 2


def joint_port_distribution(state: FourModeState, settings) -> dict:
    """Joint distribution of analyzer output counts.

    Keys are ``(PortOutcome_A, PortOutcome_B)``; zero-probability outcomes
    are omitted.
    """
    s = _settings(settings)
    dist = {}
    for na, nb, p in port_blocks(state, s.theta, s.phi):
        for i, j in zip(*np.nonzero(p > 1e-30)):
            i, j = int(i), int(j)
            key = (PortOutcome(i, na - i), PortOutcome(j, nb - j))
            dist[key] = dist.get(key, 0.0) + float(p[i, j])
    return dist


# Per-side outcome functions of the photon number N on that side, evaluated
# on the + count i = 0..N.

def _rate_plus(n):
    return np.arange(n + 1) / n if n else np.zeros(1)


def _rate_plus_primed(n):
    return np.arange(n + 1) / n if n else np.ones(1)


def _rate_minus(n):
    return np.arange(n, -1, -1) / n if n else np.zeros(1)


def _balance(n):
    return _rate_plus(n) - _rate_minus(n)


def _balance_primed(n):
    return _rate_plus_primed(n) - _rate_minus(n)


def _count_plus(n):
    return np.arange(n + 1, dtype=float)


def _count_diff(n):
    return 2.0 * np.arange(n + 1) - n


def _total(n):
    return np.full(n + 1, float(n))


def _ones(n):
    return np.ones(n + 1)


Outcome = Callable[[int], np.ndarray]


def product_expectation(state: FourModeState, theta: float, phi: float, fa: Outcome, fb: Outcome) -> float:
    """<f_A g_B> for observables diagonal in the rotated bases."""
    total = 0.0
    for na, nb, p in port_blocks(state, theta, phi):
        total += float(fa(na) @ p @ fb(nb))
    return total


def _local(state, side, angle, f):
    if side.upper() == "A":
        return product_expectation(state, angle, 0.0, f, _ones)
    if side.upper() == "B":
        return product_expectation(state, 0.0, angle, _ones, f)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def rate_expectation(state: FourModeState, side: str, angle: float, primed: bool = False) -> float:
    """<R_J+(angle)>; the primed rate assigns 1 to the local vacuum."""
    return _local(state, side, angle, _rate_plus_primed if primed else _rate_plus)


def local_rate_S(state: FourModeState, side: str, angle: float) -> float:
    return rate_expectation(state, side, angle, primed=False)


def correlator_C(state: FourModeState, settings, phi=None) -> float:
    """<[R'_A+ - R_A-][R'_B+ - R_B-]>."""
    s = _settings(settings, phi)
    return product_expectation(state, s.theta, s.phi, _balance_primed, _balance_primed)


def correlator_F(state: FourModeState, settings, phi=None) -> float:
    """<[R_A+ - R_A-][R_B+ - R_B-]>; the vacuum contributes 0."""
    s = _settings(settings, phi)
    return product_expectation(state, s.theta, s.phi, _balance, _balance)


def correlator_K(state: FourModeState, settings, phi=None) -> float:
    """<R_A+ R_B+>."""
    s = _settings(settings, phi)
    return product_expectation(state, s.theta, s.phi, _rate_plus, _rate_plus)


def correlator_E_intensity(state: FourModeState, settings, phi=None) -> IntensityRatio:
    """Numerator <(I_A+ - I_A-)(I_B+ - I_B-)> and denominator <I_A I_B>.

    The denominator uses the setting-independent photon-number totals.
    """
    s = _settings(settings, phi)
    num = 0.0
    den = 0.0
    for na, nb, p in port_blocks(state, s.theta, s.phi):
        num += float(_count_diff(na) @ p @ _count_diff(nb))
        den += na * nb * float(p.sum())
    return IntensityRatio(num, den)


def correlator_E(state: FourModeState, settings, phi=None) -> float:
    """Normalized intensity correlator; raises ZeroIntensityDenominator on the vacuum."""
    return correlator_E_intensity(state, settings, phi).value


def correlator_G_intensity(state: FourModeState, settings, phi=None) -> float:
    """<I_A+ I_B+>."""
    s = _settings(settings, phi)
    return product_expectation(state, s.theta, s.phi, _count_plus, _count_plus)


def local_intensity_rate(state: FourModeState, side: str, angle: float) -> float:
    """<I_B I_A+> for side A, <I_A I_B+> for side B."""
    if side.upper() == "A":
        return product_expectation(state, angle, 0.0, _count_plus, _total)
    if side.upper() == "B":
        return product_expectation(state, 0.0, angle, _total, _count_plus)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def _distance(state, s, f):
    total = 0.0
    for na, nb, p in port_blocks(state, s.theta, s.phi):
        total += distance_sum(np.ascontiguousarray(p), f(na), f(nb))
    return total


def distance_correlator_rates(state: FourModeState, settings, phi=None) -> float:
    """<|R_A+(theta) - R_B+(phi)|>, with rate 0 on a local vacuum."""
    return _distance(state, _settings(settings, phi), _rate_plus)


def distance_correlator_intensities(state: FourModeState, settings, phi=None) -> float:
    """<|I_A+(theta) - I_B+(phi)|>."""
    return _distance(state, _settings(settings, phi), _count_plus)


def stokes_prime_expectation(state: FourModeState, side: str, angle: float) -> float:
    """Normalized Stokes parameter (n+ - n-)/(n+ + n-), vacuum projected out."""
    return _local(state, side, angle, _balance)


def visibility(values) -> float:
    """(max - min) / (max + min) over a sampled correlator curve."""
    values = np.asarray(values, dtype=float)
    hi, lo = values.max(), values.min()
    return float((hi - lo) / (hi + lo))
