"""Analytic correlators of the bright squeezed vacuum.

All functions take the gain ``gamma`` and the correlation angle ``delta``.
For linear polarization analyzers at physical angles theta and phi the
correlation angle is ``delta = 2 * (theta - phi)``.
"""
from __future__ import annotations

import math

from bellopt.fock import log_cosh

CHSH_THRESHOLD = 1.0 / math.sqrt(2.0)


def _sech4(gamma):
    return math.exp(-4.0 * log_cosh(gamma))


def _log_cosh_over_sinh2(gamma):
    # ln cosh G / sinh^2 G = log1p(u) / (2u) with u = sinh^2 G; limit 1/2
    u = math.sinh(gamma) ** 2 if gamma < 20 else math.inf
    if u == 0:
        return 0.5
    if math.isinf(u):
        return 0.0
    return math.log1p(u) / (2.0 * u)


def e_numerator(gamma: float, delta: float) -> float:
    """<(I_A+ - I_A-)(I_B+ - I_B-)> = -2 cosh^2 G sinh^2 G cos delta."""
    return -2.0 * (math.cosh(gamma) * math.sinh(gamma)) ** 2 * math.cos(delta)


def intensity_product_mean(gamma: float, as_printed: bool = False) -> float:
    """<I_A I_B> = 5/4 - 2 cosh 2G + 3/4 cosh 4G.

    Evaluated as ``6 sinh^2 cosh^2 - 4 sinh^2`` which is the same quantity
    without cancellation near zero gain. ``as_printed=True`` adds the extra
    ``cosh^4 G`` term of an alternative form (which is 1 at zero gain
    and therefore cannot be a photon-number product).
    """
    s2 = math.sinh(gamma) ** 2
    value = 6.0 * s2 * (1.0 + s2) - 4.0 * s2
    if as_printed:
        value += math.cosh(gamma) ** 4
    return value


def e_amplitude(gamma: float) -> float:
    """|E| at delta = 0, equal to ``1 / (1 + 2 tanh^2 G)`` for gamma > 0."""
    if gamma == 0:
        raise ZeroDivisionError("intensity correlator undefined on the vacuum")
    return 2.0 * (math.cosh(gamma) * math.sinh(gamma)) ** 2 / intensity_product_mean(gamma)


def e_closed(gamma: float, delta: float) -> float:
    return -e_amplitude(gamma) * math.cos(delta)


def c_coefficients(gamma: float) -> tuple[float, float]:
    """(A, B) with C(delta) = A - B cos delta."""
    a = _sech4(gamma)
    if gamma == 0:
        return 1.0, 0.0
    t2 = math.tanh(gamma) ** 2
    # (3 + cosh^2) sinh^2 / cosh^4 = tanh^2 (1 + 3 / cosh^2)
    b = (4.0 * log_cosh(gamma) * a + t2 * (1.0 + 3.0 * math.exp(-2.0 * log_cosh(gamma)))) / 3.0
    return a, b


def c_closed(gamma: float, delta: float) -> float:
    """Primed-rate correlator C for the squeezed vacuum."""
    a, b = c_coefficients(gamma)
    return a - b * math.cos(delta)


def k_coefficients(gamma: float, as_printed: bool = False) -> tuple[float, float]:
    """(alpha, beta) with K(delta) = alpha - beta cos delta.

    ``beta`` is a quarter of the C coefficient. An alternative form carries
    ``8 ln cosh G`` and the opposite sign of the cosine; ``as_printed=True``
    returns that variant, which disagrees with the Fock-space evaluation.
    """
    alpha = 0.25 * (1.0 - _sech4(gamma))
    if as_printed:
        bracket = -13 + 12 * math.cosh(2 * gamma) + math.cosh(4 * gamma) + 8 * log_cosh(gamma)
        return alpha, -bracket * _sech4(gamma) / 96.0
    return alpha, 0.25 * c_coefficients(gamma)[1]


def k_closed(gamma: float, delta: float, as_printed: bool = False) -> float:
    """Coincidence-rate correlator K for the squeezed vacuum."""
    alpha, beta = k_coefficients(gamma, as_printed)
    return alpha - beta * math.cos(delta)


def s_closed(gamma: float) -> float:
    """Local rate <R_J+> = (1 - cosh^-4 G) / 2, independent of the angle."""
    return 0.5 * (1.0 - _sech4(gamma))


def per_n_ratio_coeff(n: int) -> float:
    """Coefficient of cos delta in C on the n-pair component."""
    if n < 1:
        raise ValueError("ratio coefficient is defined for n >= 1")
    return -(n + 2) / (3.0 * n)


def per_n_intensity_coeff(n: int) -> float:
    """Amplitude of the intensity-correlator numerator on the n-pair component."""
    if n < 1:
        raise ValueError("intensity coefficient is defined for n >= 1")
    return (2.0 * n + n * n) / 3.0


def visibility_new(gamma: float, as_printed: bool = False) -> float:
    """Visibility of K: (3 + cosh^2 G + 4 ln cosh G / sinh^2 G) / (3 + 3 cosh^2 G).

    ``as_printed=True`` uses a minus sign in front of the logarithm, which
    gives 1/3 at zero gain instead of the Fock-space value 1.
    """
    if gamma < 0:
        raise ValueError("gain must be non-negative")
    if gamma > 300:
        return 1.0 / 3.0
    c2 = math.cosh(gamma) ** 2
    sign = -1.0 if as_printed else 1.0
    return (3.0 + c2 + sign * 4.0 * _log_cosh_over_sinh2(gamma)) / (3.0 + 3.0 * c2)


def visibility_old(gamma: float) -> float:
    """Visibility of the intensity correlator G: 1 / (1 + 2 tanh^2 G)."""
    if gamma < 0:
        raise ValueError("gain must be non-negative")
    return 1.0 / (1.0 + 2.0 * math.tanh(gamma) ** 2)


def chsh_c_max(gamma: float) -> float:
    """Largest CHSH value of C: 2A + 2 sqrt2 B."""
    a, b = c_coefficients(gamma)
    return 2.0 * a + 2.0 * math.sqrt(2.0) * b


def chsh_e_max(gamma: float) -> float:
    """Largest |CHSH| value of E: 2 sqrt2 |E| amplitude."""
    return 2.0 * math.sqrt(2.0) * e_amplitude(gamma)


def f_closed(gamma: float, delta: float) -> float:
    """Unprimed-rate correlator F = -B cos delta (the vacuum contributes nothing)."""
    return -c_coefficients(gamma)[1] * math.cos(delta)
