"""Four-mode photon-number states: bright squeezed vacuum and polarization rotations.

Modes are ordered ``(a_H, a_V, b_H, b_V)``; ``a`` travels to Alice, ``b`` to
Bob. States are sparse maps from occupations to complex amplitudes. Internally
the amplitudes are also grouped into blocks of fixed per-side photon number
``(N_a, N_b)``; a block is an ``(N_a+1, N_b+1)`` matrix indexed by the
horizontal (or ``+``) counts, on which polarization rotations act as small
dense matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from bellopt.kernels import rotation_matrix

PRUNE_AMPLITUDE = 1e-15


class Occupation(NamedTuple):
    n_aH: int
    n_aV: int
    n_bH: int
    n_bV: int

    @property
    def side_a(self) -> int:
        return self.n_aH + self.n_aV

    @property
    def side_b(self) -> int:
        return self.n_bH + self.n_bV


@dataclass(frozen=True, eq=False)
class FourModeState:
    """Immutable sparse four-mode state.

    ``cutoff_pairs`` records the pair-number truncation the state was built
    with (``None`` for hand-made states). After a rotation the occupation
    labels of the rotated side refer to the ``(+, -)`` analyzer outputs.
    """

    amplitudes: Mapping[Occupation, complex]
    cutoff_pairs: int | None = None
    _blocks: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for occ, amp in dict(self.amplitudes).items():
            occ = Occupation(*(int(x) for x in occ))
            if min(occ) < 0:
                raise ValueError(f"negative photon number in {occ}")
            amp = complex(amp)
            if amp != 0:
                clean[occ] = amp
        object.__setattr__(self, "amplitudes", MappingProxyType(clean))
        object.__setattr__(self, "_blocks", None)

    def __len__(self):
        return len(self.amplitudes)

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def blocks(self) -> dict[tuple[int, int], np.ndarray]:
        """Amplitudes grouped by per-side photon numbers.

        Returns ``{(N_a, N_b): M}`` with ``M[i, j]`` the amplitude of
        ``|i, N_a-i>_a |j, N_b-j>_b``. The arrays are read-only and cached.
        """
        if self._blocks is None:
            out: dict[tuple[int, int], np.ndarray] = {}
            for occ, amp in self.amplitudes.items():
                key = (occ.side_a, occ.side_b)
                if key not in out:
                    out[key] = np.zeros((key[0] + 1, key[1] + 1), dtype=complex)
                out[key][occ.n_aH, occ.n_bH] = amp
            for m in out.values():
                m.setflags(write=False)
            object.__setattr__(self, "_blocks", out)
        return self._blocks

    @classmethod
    def from_blocks(cls, blocks, cutoff_pairs=None, prune=PRUNE_AMPLITUDE) -> "FourModeState":
        amps = {}
        for (na, nb), m in blocks.items():
            idx_a, idx_b = np.nonzero(np.abs(m) > prune)
            for i, j in zip(idx_a.tolist(), idx_b.tolist()):
                amps[Occupation(i, na - i, j, nb - j)] = m[i, j]
        return cls(amps, cutoff_pairs)

    def sector_weights(self) -> dict[int, float]:
        """Probability per pair-number sector, keyed by Alice's photon number."""
        weights: dict[int, float] = {}
        for occ, amp in self.amplitudes.items():
            weights[occ.side_a] = weights.get(occ.side_a, 0.0) + abs(amp) ** 2
        return dict(sorted(weights.items()))


def vacuum() -> FourModeState:
    return FourModeState({Occupation(0, 0, 0, 0): 1.0}, cutoff_pairs=0)


def _check_gain(gamma):
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0:
        raise ValueError(f"gain must be a finite non-negative number, got {gamma}")
    return gamma


def _check_cutoff(cutoff_pairs):
    if int(cutoff_pairs) != cutoff_pairs or cutoff_pairs < 0:
        raise ValueError(f"cutoff_pairs must be a non-negative integer, got {cutoff_pairs}")
    return int(cutoff_pairs)


def log_cosh(x: float) -> float:
    """ln cosh x without overflow."""
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def bsv_component(n: int) -> FourModeState:
    """Normalized n-pair singlet-like component of the squeezed vacuum."""
    n = _check_cutoff(n)
    amp = 1.0 / math.sqrt(n + 1)
    return FourModeState(
        {Occupation(n - m, m, m, n - m): (-1) ** m * amp for m in range(n + 1)},
        cutoff_pairs=n,
    )


def sector_weight(gamma: float, n: int) -> float:
    """Probability (n+1) tanh^(2n) G / cosh^4 G of the n-pair sector."""
    gamma = _check_gain(gamma)
    if gamma == 0:
        return 1.0 if n == 0 else 0.0
    log_w = math.log(n + 1) + 2 * n * math.log(math.tanh(gamma)) - 4 * log_cosh(gamma)
    return math.exp(log_w)


def bsv_state(gamma: float, cutoff_pairs: int) -> FourModeState:
    """Bright squeezed vacuum truncated after ``cutoff_pairs`` pairs (not renormalized)."""
    gamma = _check_gain(gamma)
    cutoff_pairs = _check_cutoff(cutoff_pairs)
    amps = {}
    for n in range(cutoff_pairs + 1):
        w = sector_weight(gamma, n)
        if w == 0:
            continue
        coeff = math.sqrt(w / (n + 1))
        for m in range(n + 1):
            amps[Occupation(n - m, m, m, n - m)] = (-1) ** m * coeff
    return FourModeState(amps, cutoff_pairs=cutoff_pairs)


def tail_weight(gamma: float, cutoff_pairs: int) -> float:
    """Probability discarded by truncating the squeezed vacuum at ``cutoff_pairs``.

    Uses the closed partial sum of sum (n+1) x^n, giving
    ``x^(N+1) ((N+2) - (N+1) x)`` with ``x = tanh^2 G``; no cancellation.
    """
    gamma = _check_gain(gamma)
    n = _check_cutoff(cutoff_pairs)
    if gamma == 0:
        return 0.0
    x = math.tanh(gamma) ** 2
    if x >= 1.0:
        return 1.0
    return math.exp((n + 1) * math.log(x)) * ((n + 2) - (n + 1) * x)


def auto_cutoff(gamma: float, tol: float = 1e-10, cap: int | None = None) -> int:
    """Smallest pair cutoff with tail weight below ``tol`` (optionally capped)."""
    n = 0
    while tail_weight(gamma, n) >= tol:
        if cap is not None and n >= cap:
            return cap
        n += 1
    return n


def rotate_side(state: FourModeState, side: str, angle: float) -> FourModeState:
    """Express one side in the analyzer basis ``(c_angle, c_angle_perp)``.

    ``c_angle = cos(angle) c_H + sin(angle) c_V``. Rotations compose
    additively in ``angle``.
    """
    side = side.upper()
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    if angle == 0:
        return state
    rotated = {}
    for (na, nb), m in state.blocks().items():
        if side == "A":
            rotated[(na, nb)] = rotation_matrix(na, angle) @ m
        else:
            rotated[(na, nb)] = m @ rotation_matrix(nb, angle).T
    return FourModeState.from_blocks(rotated, cutoff_pairs=state.cutoff_pairs)


def inner_product(s1: FourModeState, s2: FourModeState) -> complex:
    """<s1|s2>."""
    small, big = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for occ in small.amplitudes:
        if occ in big.amplitudes:
            total += s1.amplitudes[occ].conjugate() * s2.amplitudes[occ]
    return total
