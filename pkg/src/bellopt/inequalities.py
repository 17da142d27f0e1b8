"""Bell expressions assembled from correlators, with bounds and violation margins.

Correlators are passed in as callables ``f(theta, phi) -> float`` so the same
assembly serves quantum states, closed forms and hidden-variable models.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from bellopt import fock
from bellopt import observables as obs

Correlator = Callable[[float, float], float]


class BellKind(str, enum.Enum):
    CHSH_E = "CHSH_E"
    CHSH_C = "CHSH_C"
    CHSH_F = "CHSH_F"
    CH_K = "CH_K"
    CHAINED_C = "CHAINED_C"
    CHAINED_E = "CHAINED_E"
    CHAINED_DIST_RATES = "CHAINED_DIST_RATES"
    CHAINED_DIST_INTENSITIES = "CHAINED_DIST_INTENSITIES"

    @property
    def is_distance(self) -> bool:
        return self in (BellKind.CHAINED_DIST_RATES, BellKind.CHAINED_DIST_INTENSITIES)

    @property
    def is_chsh(self) -> bool:
        return self in (BellKind.CHSH_E, BellKind.CHSH_C, BellKind.CHSH_F)

    @property
    def correlator_name(self) -> str:
        return {
            BellKind.CHSH_E: "E",
            BellKind.CHAINED_E: "E",
            BellKind.CHSH_C: "C",
            BellKind.CHAINED_C: "C",
            BellKind.CHSH_F: "F",
            BellKind.CH_K: "K",
            BellKind.CHAINED_DIST_RATES: "dist-rates",
            BellKind.CHAINED_DIST_INTENSITIES: "dist-int",
        }[self]


@dataclass(frozen=True)
class BellExpression:
    """An inequality of a given kind at explicit physical analyzer angles.

    For CHSH and CH kinds ``thetas = (theta, theta')`` and
    ``phis = (phi, phi')``. For chained kinds the angles are in chain order.
    """

    kind: BellKind
    thetas: tuple[float, ...]
    phis: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", BellKind(self.kind))
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        if len(self.thetas) != len(self.phis):
            raise ValueError("thetas and phis must have the same length")
        if self.L < 2:
            raise ValueError("at least two settings per side are required")
        if (self.kind.is_chsh or self.kind is BellKind.CH_K) and self.L != 2:
            raise ValueError(f"{self.kind.value} uses exactly two settings per side")

    @property
    def L(self) -> int:
        return len(self.thetas)

    def bounds(self) -> tuple[float, float]:
        if self.kind.is_chsh:
            return -2.0, 2.0
        if self.kind is BellKind.CH_K:
            return -1.0, 0.0
        if self.kind.is_distance:
            return 0.0, math.inf
        return -2.0 * (self.L - 1), 2.0 * (self.L - 1)


@dataclass
class InequalityReport:
    kind: str
    lhs: float
    lower_bound: float
    upper_bound: float
    thetas: tuple[float, ...]
    phis: tuple[float, ...]
    gamma: float | None = None
    cutoff_pairs: int | None = None
    tail_weight: float | None = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        """Positive when the value breaches a bound."""
        return max(self.lhs - self.upper_bound, self.lower_bound - self.lhs)

    @property
    def violated(self) -> bool:
        return self.margin > 0

    @property
    def L(self) -> int:
        return len(self.thetas)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["thetas"] = list(self.thetas)
        d["phis"] = list(self.phis)
        d["margin"] = self.margin
        d["violated"] = self.violated
        d["L"] = self.L
        extra = d.pop("extra")
        d.update(extra)
        return d


def _report(kind, lhs, thetas, phis, meta):
    lo, hi = BellExpression(kind, thetas, phis).bounds()
    return InequalityReport(BellKind(kind).value, float(lhs), lo, hi, tuple(thetas), tuple(phis), **meta)


def chained_sum(f: Correlator, thetas: Sequence[float], phis: Sequence[float]) -> float:
    """f(t1,p1) + f(t2,p1) + f(t2,p2) + ... + f(tL,pL) - f(t1,pL)."""
    L = len(thetas)
    total = 0.0
    for i in range(L):
        total += f(thetas[i], phis[i])
        if i + 1 < L:
            total += f(thetas[i + 1], phis[i])
    return total - f(thetas[0], phis[L - 1])


def chained_value(f: Correlator, L: int, thetas, phis, kind=BellKind.CHAINED_C, **meta) -> InequalityReport:
    """Chained CHSH-type expression with bounds +-2(L-1)."""
    if L != len(thetas) or L != len(phis):
        raise ValueError(f"expected {L} settings per side")
    return _report(kind, chained_sum(f, thetas, phis), thetas, phis, meta)


def chsh_value(f: Correlator, thetas, phis, kind=BellKind.CHSH_C, **meta) -> InequalityReport:
    """f(t,p) + f(t,p') + f(t',p) - f(t',p') with bounds +-2.

    Evaluated as the L=2 chain with ``(t1, t2) = (t', t)`` and
    ``(p1, p2) = (p, p')``, so both routes give identical floating-point results.
    """
    (t, tp), (p, pp) = thetas, phis
    lhs = chained_sum(f, (tp, t), (p, pp))
    return _report(kind, lhs, (t, tp), (p, pp), meta)


def ch_combination(k: Correlator, s_a: Callable[[float], float], s_b: Callable[[float], float], thetas, phis) -> float:
    """k(t,p) + k(t,p') + k(t',p) - k(t',p') - s_a(t) - s_b(p)."""
    (t, tp), (p, pp) = thetas, phis
    return k(t, p) + k(t, pp) + k(tp, p) - k(tp, pp) - s_a(t) - s_b(p)


def chained_distance_sum(d: Correlator, thetas, phis) -> float:
    """Sum of the 2L-1 chain distances minus the closing distance d(t1, pL)."""
    return chained_sum(d, thetas, phis)


def default_chain_settings(L: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Equally spaced angles theta_i = (2i-1) pi / 4L, phi_i = 2 pi i / 4L."""
    if L < 2:
        raise ValueError("L must be at least 2")
    thetas = tuple((2 * i - 1) * math.pi / (4 * L) for i in range(1, L + 1))
    phis = tuple(2 * math.pi * i / (4 * L) for i in range(1, L + 1))
    return thetas, phis


def correlated_chain_settings(L: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Default chain angles with Bob's analyzer turned by pi/2.

    The squeezed vacuum is anticorrelated in polarization, so Bob's + port at
    phi + pi/2 is the one that tracks Alice's + port at phi. Expressions that
    are not symmetric under flipping Bob's ports (C, K and the distance
    chains) need this orientation to reach their violating side.
    """
    thetas, phis = default_chain_settings(L)
    return thetas, tuple(p + math.pi / 2 for p in phis)


def chain_settings_for(kind, L: int):
    """Equal-spacing chain angles oriented for the given expression kind."""
    if BellKind(kind) in (BellKind.CHAINED_E, BellKind.CHSH_E):
        return default_chain_settings(L)
    return correlated_chain_settings(L)


def optimal_chsh_settings() -> tuple[tuple[float, float], tuple[float, float]]:
    """CHSH angles (theta, theta'), (phi, phi') maximizing |E| and C on the squeezed vacuum.

    Correlation angles 2(theta - phi) are (3pi/4, 5pi/4, 5pi/4, 7pi/4).
    """
    return (math.pi / 2, 3 * math.pi / 4), (math.pi / 8, -math.pi / 8)


def optimal_ch_settings() -> tuple[tuple[float, float], tuple[float, float]]:
    """CH angles maximizing the K combination on the squeezed vacuum."""
    return optimal_chsh_settings()


# Quantum-state evaluators -------------------------------------------------

def _state_meta(state, gamma=None):
    meta = {"cutoff_pairs": state.cutoff_pairs}
    if gamma is not None:
        meta["gamma"] = gamma
        if state.cutoff_pairs is not None:
            meta["tail_weight"] = fock.tail_weight(gamma, state.cutoff_pairs)
    return meta


def state_correlator(state, name: str) -> Correlator:
    """Bind a state to a correlator by short name (E, C, F, K, dist-rates, dist-int)."""
    table = {
        "E": obs.correlator_E,
        "C": obs.correlator_C,
        "F": obs.correlator_F,
        "K": obs.correlator_K,
        "G": obs.correlator_G_intensity,
        "dist-rates": obs.distance_correlator_rates,
        "dist-int": obs.distance_correlator_intensities,
    }
    fn = table[name]
    return lambda t, p: fn(state, t, p)


def chsh_state(state, correlator: str, thetas, phis, gamma=None) -> InequalityReport:
    kind = {"E": BellKind.CHSH_E, "C": BellKind.CHSH_C, "F": BellKind.CHSH_F}[correlator]
    return chsh_value(state_correlator(state, correlator), thetas, phis, kind=kind, **_state_meta(state, gamma))


def ch_value(state, thetas, phis, gamma=None) -> InequalityReport:
    """CH-type rate inequality, bounds [-1, 0]."""
    lhs = ch_combination(
        state_correlator(state, "K"),
        lambda a: obs.local_rate_S(state, "A", a),
        lambda b: obs.local_rate_S(state, "B", b),
        thetas,
        phis,
    )
    return _report(BellKind.CH_K, lhs, thetas, phis, _state_meta(state, gamma))


def chained_state(state, correlator: str, L: int, thetas=None, phis=None, gamma=None) -> InequalityReport:
    kind = {"C": BellKind.CHAINED_C, "E": BellKind.CHAINED_E}[correlator]
    if thetas is None:
        thetas, phis = chain_settings_for(kind, L)
    return chained_value(state_correlator(state, correlator), L, thetas, phis, kind=kind, **_state_meta(state, gamma))


def chained_distance_value(state, L: int, thetas=None, phis=None, variant: str = "rates", gamma=None) -> InequalityReport:
    """Triangle-type chained inequality, violated when the value is negative."""
    if thetas is None:
        thetas, phis = correlated_chain_settings(L)
    if L != len(thetas) or L != len(phis):
        raise ValueError(f"expected {L} settings per side")
    if variant == "rates":
        kind, name = BellKind.CHAINED_DIST_RATES, "dist-rates"
    elif variant == "intensities":
        kind, name = BellKind.CHAINED_DIST_INTENSITIES, "dist-int"
    else:
        raise ValueError(f"variant must be 'rates' or 'intensities', got {variant!r}")
    lhs = chained_distance_sum(state_correlator(state, name), thetas, phis)
    return _report(kind, lhs, thetas, phis, _state_meta(state, gamma))


def evaluate(state, expression: BellExpression, gamma=None) -> InequalityReport:
    """Evaluate any supported expression on a four-mode state."""
    k, t, p = expression.kind, expression.thetas, expression.phis
    if k.is_chsh:
        return chsh_state(state, k.correlator_name, t, p, gamma)
    if k is BellKind.CH_K:
        return ch_value(state, t, p, gamma)
    if k is BellKind.CHAINED_DIST_RATES:
        return chained_distance_value(state, expression.L, t, p, "rates", gamma)
    if k is BellKind.CHAINED_DIST_INTENSITIES:
        return chained_distance_value(state, expression.L, t, p, "intensities", gamma)
    return chained_state(state, k.correlator_name, expression.L, t, p, gamma)
