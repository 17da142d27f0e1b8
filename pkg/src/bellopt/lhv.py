"""Finite local hidden-variable models of two-port intensities.

A model is a weighted list of hidden states. For each hidden state, side and
local setting it assigns the two non-negative output intensities
``(I_+, I_-)``, plus optionally a "polarizer removed" total per side. Setting
labels are analyzer angles, used only as keys.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from bellopt import inequalities as iq
from bellopt.inequalities import BellExpression, BellKind, InequalityReport
from bellopt.observables import ZeroIntensityDenominator


@dataclass(frozen=True)
class ModelClass:
    """Auxiliary assumptions a model satisfies.

    ``constrained_total``: I_+ + I_- equals the setting-independent total.
    ``no_enhancement``: the total is at least I_+ at every setting. It is
    implied by ``constrained_total``.
    """

    constrained_total: bool = False
    no_enhancement: bool = False

    def __post_init__(self):
        if self.constrained_total and not self.no_enhancement:
            object.__setattr__(self, "no_enhancement", True)


@dataclass(frozen=True, eq=False)
class LhvModel:
    weights: np.ndarray
    settings_a: tuple[float, ...]
    settings_b: tuple[float, ...]
    intensities_a: np.ndarray  # (lambda, setting, port) with port 0 = +, 1 = -
    intensities_b: np.ndarray
    totals_a: np.ndarray | None = None
    totals_b: np.ndarray | None = None
    model_class: ModelClass = field(default_factory=ModelClass)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0):
            raise ValueError("weights must be a non-empty vector of non-negative numbers")
        if not math.isclose(w.sum(), 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"weights must sum to 1, got {w.sum()}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "settings_a", tuple(float(x) for x in self.settings_a))
        object.__setattr__(self, "settings_b", tuple(float(x) for x in self.settings_b))
        for side, settings in (("a", self.settings_a), ("b", self.settings_b)):
            arr = np.asarray(getattr(self, f"intensities_{side}"), dtype=float)
            if arr.shape != (w.size, len(settings), 2):
                raise ValueError(f"intensities_{side} must have shape {(w.size, len(settings), 2)}, got {arr.shape}")
            if np.any(arr < 0):
                raise ValueError("intensities must be non-negative")
            object.__setattr__(self, f"intensities_{side}", arr)
            tot = getattr(self, f"totals_{side}")
            if tot is not None:
                tot = np.asarray(tot, dtype=float)
                if tot.shape != (w.size,) or np.any(tot < 0):
                    raise ValueError(f"totals_{side} must be {w.size} non-negative numbers")
                object.__setattr__(self, f"totals_{side}", tot)
        self._check_class()

    def _check_class(self):
        if not self.model_class.no_enhancement:
            return
        for side in "AB":
            intens = self._intensities(side)
            totals = self.totals(side)[:, None]
            scale = 1e-12 * max(1.0, float(intens.max(initial=0.0)))
            if self.model_class.constrained_total and np.any(np.abs(intens.sum(axis=2) - totals) > scale):
                raise ValueError(f"side {side}: port sums differ from the setting-independent total")
            if np.any(intens[..., 0] > totals + scale):
                raise ValueError(f"side {side}: a port intensity exceeds the total")

    @property
    def num_lambda(self) -> int:
        return self.weights.size

    def setting_index(self, side: str, setting: float) -> int:
        settings = self.settings_a if side.upper() == "A" else self.settings_b
        try:
            return settings.index(float(setting))
        except ValueError:
            raise KeyError(f"setting {setting} not defined for side {side}") from None

    def _intensities(self, side):
        return self.intensities_a if side.upper() == "A" else self.intensities_b

    def totals(self, side: str) -> np.ndarray:
        """Declared polarizer-removed totals, or port sums when they are setting independent."""
        declared = self.totals_a if side.upper() == "A" else self.totals_b
        if declared is not None:
            return declared
        sums = self._intensities(side).sum(axis=2)
        if not np.allclose(sums, sums[:, :1], rtol=1e-12, atol=0):
            raise ValueError("model declares no totals and its port sums depend on the setting")
        return sums[:, 0]


def _rates(intens, primed=False):
    total = intens.sum(axis=-1)
    safe = np.where(total > 0, total, 1.0)
    plus = np.where(total > 0, intens[..., 0] / safe, 1.0 if primed else 0.0)
    minus = np.where(total > 0, intens[..., 1] / safe, 0.0)
    return plus, minus


def model_rates(model: LhvModel, lam: int, side: str, setting: float, primed: bool = False) -> tuple[float, float]:
    """(R_+, R_-) of one hidden state; zero total gives (0, 0), or R'_+ = 1 when primed."""
    intens = model._intensities(side)[lam, model.setting_index(side, setting)]
    plus, minus = _rates(intens, primed)
    return float(plus), float(minus)


def _pair_matrix(model, xa, xb):
    # sum_lambda rho x_a(lambda, i) x_b(lambda, j)
    return (model.weights[:, None] * xa).T @ xb


def correlation_matrix(model: LhvModel, name: str) -> np.ndarray:
    """All-pairs correlator matrix indexed by (setting_a, setting_b).

    ``name`` is one of C, F, K, G, E-numerator, dist-rates, dist-int.
    """
    ia, ib = model.intensities_a, model.intensities_b
    if name in ("C", "F"):
        pa, ma = _rates(ia, primed=name == "C")
        pb, mb = _rates(ib, primed=name == "C")
        return _pair_matrix(model, pa - ma, pb - mb)
    if name == "K":
        return _pair_matrix(model, _rates(ia)[0], _rates(ib)[0])
    if name == "G":
        return _pair_matrix(model, ia[..., 0], ib[..., 0])
    if name == "E-numerator":
        return _pair_matrix(model, ia[..., 0] - ia[..., 1], ib[..., 0] - ib[..., 1])
    if name in ("dist-rates", "dist-int"):
        xa = _rates(ia)[0] if name == "dist-rates" else ia[..., 0]
        xb = _rates(ib)[0] if name == "dist-rates" else ib[..., 0]
        return np.einsum("k,kij->ij", model.weights, np.abs(xa[:, :, None] - xb[:, None, :]))
    raise ValueError(f"unknown correlator {name!r}")


def intensity_product_mean(model: LhvModel) -> float:
    """Sum_lambda rho I_A I_B from the (declared) polarizer-removed totals."""
    return float(np.dot(model.weights, model.totals("A") * model.totals("B")))


def _lookup(model, matrix):
    return lambda t, p: float(matrix[model.setting_index("A", t), model.setting_index("B", p)])


def local_means(model: LhvModel, name: str, side: str) -> np.ndarray:
    """Per-setting local averages: S (mean R_+) or r (mean I_+ times the remote total)."""
    intens = model._intensities(side)
    if name == "S":
        return model.weights @ _rates(intens)[0]
    if name == "r":
        other = model.totals("B" if side.upper() == "A" else "A")
        return (model.weights * other) @ intens[..., 0]
    raise ValueError(f"unknown local quantity {name!r}")


def model_report(model: LhvModel, expression: BellExpression) -> InequalityReport:
    """Evaluate an expression on a model; bounds are the local-realistic ones."""
    k, t, p = expression.kind, expression.thetas, expression.phis
    if k in (BellKind.CHSH_E, BellKind.CHAINED_E):
        den = intensity_product_mean(model)
        if den == 0:
            raise ZeroIntensityDenominator("zero intensity denominator")
        f = _lookup(model, correlation_matrix(model, "E-numerator") / den)
    elif k is BellKind.CH_K:
        s_a = local_means(model, "S", "A")
        s_b = local_means(model, "S", "B")
        lhs = iq.ch_combination(
            _lookup(model, correlation_matrix(model, "K")),
            lambda a: float(s_a[model.setting_index("A", a)]),
            lambda b: float(s_b[model.setting_index("B", b)]),
            t,
            p,
        )
        return iq._report(k, lhs, t, p, {})
    else:
        f = _lookup(model, correlation_matrix(model, k.correlator_name))
    if k.is_chsh:
        return iq.chsh_value(f, t, p, kind=k)
    return iq.chained_value(f, expression.L, t, p, kind=k)


def evaluate_expression(model: LhvModel, expression: BellExpression) -> float:
    return model_report(model, expression).lhs


def reid_walls_ch_value(model: LhvModel, thetas, phis) -> float:
    """G(t,p) + G(t,p') + G(t',p) - G(t',p') - r_A(t) - r_B(p); at most 0 without enhancement."""
    r_a = local_means(model, "r", "A")
    r_b = local_means(model, "r", "B")
    return iq.ch_combination(
        _lookup(model, correlation_matrix(model, "G")),
        lambda a: float(r_a[model.setting_index("A", a)]),
        lambda b: float(r_b[model.setting_index("B", b)]),
        thetas,
        phis,
    )


def _draw(rng, shape, zero_prob=0.1):
    x = rng.exponential(1.0, size=shape)
    x[rng.random(shape) < zero_prob] = 0.0
    return x


def sample_random_model(seed, num_lambda: int, settings, model_class: ModelClass = ModelClass()) -> LhvModel:
    """Reproducible random model over ``settings = (thetas, phis)``.

    Intensities are exponential with an extra atom at exactly zero
    (probability 0.1). Constrained models split a random total between the
    ports, with exact 0/1 splits at the same rate.
    """
    if num_lambda < 1:
        raise ValueError("num_lambda must be at least 1")
    thetas, phis = settings
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(num_lambda))
    intens = {}
    totals = {}
    for side, n_set in (("a", len(thetas)), ("b", len(phis))):
        if model_class.constrained_total:
            tot = _draw(rng, (num_lambda,))
            u = rng.random((num_lambda, n_set))
            atoms = rng.random((num_lambda, n_set)) < 0.1
            u[atoms] = rng.integers(0, 2, size=int(atoms.sum()))
            intens[side] = np.stack([u * tot[:, None], (1.0 - u) * tot[:, None]], axis=-1)
            totals[side] = tot
        else:
            intens[side] = _draw(rng, (num_lambda, n_set, 2))
            if model_class.no_enhancement:
                totals[side] = intens[side][..., 0].max(axis=1) + _draw(rng, (num_lambda,))
            else:
                totals[side] = _draw(rng, (num_lambda,))
    return LhvModel(
        weights / weights.sum(),
        thetas,
        phis,
        intens["a"],
        intens["b"],
        totals["a"],
        totals["b"],
        model_class,
    )


def loophole_model(M: float = 10.0, eps: float = 1.0) -> LhvModel:
    """Two-state model that breaks the setting-independent-total assumption.

    Behind the analyzers every detector sees either M or 0, with the bright
    port perfectly correlated between the sides; without analyzers the totals
    are ``eps``. The normalized intensity CHSH value is ``2 (M / eps)^2``.
    """
    if M <= 0 or eps <= 0:
        raise ValueError("M and eps must be positive")
    thetas, phis = iq.optimal_chsh_settings()
    up = np.array([[M, 0.0], [M, 0.0]])
    down = up[:, ::-1]
    intens = np.stack([up, down])
    return LhvModel(
        np.array([0.5, 0.5]),
        thetas,
        phis,
        intens,
        intens.copy(),
        np.full(2, float(eps)),
        np.full(2, float(eps)),
    )


def constrained_projection(model: LhvModel) -> LhvModel:
    """Replace declared totals by the port sums (which must not depend on the setting)."""
    bare = replace(model, totals_a=None, totals_b=None)
    return replace(
        model,
        totals_a=bare.totals("A"),
        totals_b=bare.totals("B"),
        model_class=ModelClass(constrained_total=True),
    )


def ch_lemma_check(x, xp, X, y, yp, Y) -> bool:
    """xy + xy' + x'y - x'y' - xY - Xy <= 0 for 0 <= x, x' <= X and 0 <= y, y' <= Y."""
    if not (0 <= x <= X and 0 <= xp <= X and 0 <= y <= Y and 0 <= yp <= Y):
        raise ValueError("need 0 <= x, x' <= X and 0 <= y, y' <= Y")
    value = x * y + x * yp + xp * y - xp * yp - x * Y - X * y
    return value <= 1e-12 * max(1.0, X * Y)


@dataclass
class FuzzReport:
    root_seed: int
    samples: int
    checks: dict[str, int]
    violations: dict[str, int]
    worst_margin: dict[str, float]

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())


FUZZ_TOLERANCE = 1e-12


def fuzz_bounds(root_seed: int = 0, samples: int = 10_000, max_L: int = 5, max_lambda: int = 6) -> FuzzReport:
    """Search random models for breaches of the assumption-free bounds.

    Unconstrained models are checked against C-CHSH, F-CHSH, CH_K, chained C
    and both distance chains (L = 2..max_L); models with constrained totals
    are checked against the intensity CHSH bound and the intensity CH bound.
    Per-sample seeds are spawned from ``root_seed``.
    """
    labels_a = tuple(float(i) for i in range(max_L))
    labels_b = tuple(float(i) + 0.5 for i in range(max_L))
    checks: dict[str, int] = {}
    violations: dict[str, int] = {}
    worst: dict[str, float] = {}

    def record(name, margin, scale=1.0):
        checks[name] = checks.get(name, 0) + 1
        worst[name] = max(worst.get(name, -math.inf), margin)
        if margin > FUZZ_TOLERANCE * scale:
            violations[name] = violations.get(name, 0) + 1

    seeds = np.random.SeedSequence(root_seed).spawn(samples)
    for seq in seeds:
        rng = np.random.default_rng(seq)
        n_lam = int(rng.integers(1, max_lambda + 1))
        child_free, child_con = seq.spawn(2)
        model = sample_random_model(child_free, n_lam, (labels_a, labels_b))
        two = (labels_a[:2], labels_b[:2])
        for kind in (BellKind.CHSH_C, BellKind.CHSH_F, BellKind.CH_K):
            record(kind.value, model_report(model, BellExpression(kind, *two)).margin)
        for L in range(2, max_L + 1):
            sub = (labels_a[:L], labels_b[:L])
            for kind in (BellKind.CHAINED_C, BellKind.CHAINED_DIST_RATES):
                record(f"{kind.value}_L{L}", model_report(model, BellExpression(kind, *sub)).margin)
            rep = model_report(model, BellExpression(BellKind.CHAINED_DIST_INTENSITIES, *sub))
            scale = float(model.intensities_a.max() + model.intensities_b.max() + 1.0)
            record(f"CHAINED_DIST_INTENSITIES_L{L}", rep.margin, scale)

        # redraw constrained models whose intensity correlator is undefined
        while True:
            con = sample_random_model(child_con, n_lam, two, ModelClass(constrained_total=True))
            try:
                margin = model_report(con, BellExpression(BellKind.CHSH_E, *two)).margin
                break
            except ZeroIntensityDenominator:
                child_con = child_con.spawn(1)[0]
        record("CHSH_E_constrained", margin)
        scale = float(np.dot(con.weights, con.totals("A") * con.totals("B"))) + 1.0
        record("CH_G_no_enhancement", reid_walls_ch_value(con, *two), scale)
    return FuzzReport(root_seed, samples, checks, violations, worst)
