"""Gain scans: critical gains by bracketed bisection, table regeneration, visibility curves."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial

import numpy as np
import scipy.linalg
import scipy.optimize

from bellopt import closed_form as cf
from bellopt import fock
from bellopt import inequalities as iq
from bellopt import observables as obs
from bellopt.inequalities import BellExpression, BellKind

# Reference critical gains, used only for comparison columns.
REFERENCE_TABLE1 = {
    # L: (intensity chain, ratio chain)
    2: (0.491, 1.229), 3: (0.408, 1.342), 4: (0.355, 1.372), 5: (0.318, 1.392),
    6: (0.290, 1.406), 7: (0.268, 1.416), 8: (0.251, 1.425), 9: (0.237, 1.431),
    10: (0.224, 1.437), 11: (0.214, 1.441), 12: (0.205, 1.445), 13: (0.197, 1.448),
}
REFERENCE_TABLE2 = {
    # L: (intensity distances, rate distances)
    2: (0.915, 1.123), 3: (1.053, 1.367), 4: (1.165, 1.482),
    5: (1.260, 1.586), 6: (1.345, 1.687), 7: (1.427, 1.795),
}

SOURCES = ("closed_form", "fock_oracle")
DEFAULT_TAIL = 1e-10
MAX_AUTO_CUTOFF = 400


class BracketError(RuntimeError):
    """The violation margin does not change sign on the scanned gain range."""


def worker_count() -> int:
    try:
        requested = int(os.environ.get("BELLOPT_THREADS", "1"))
    except ValueError:
        requested = 1
    return max(1, min(requested, os.cpu_count() or 1))


def _map(fn, items):
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def standard_settings(kind, L=2):
    """Settings that are optimal for correlators of the form A - B cos(delta)."""
    kind = BellKind(kind)
    if kind.is_chsh or kind is BellKind.CH_K:
        return iq.optimal_chsh_settings()
    return iq.chain_settings_for(kind, L)


def closed_form_report(kind, gamma, thetas, phis):
    """Evaluate an expression from the analytic squeezed-vacuum correlators."""
    expr = BellExpression(kind, thetas, phis)
    k = expr.kind
    if k.is_distance:
        raise ValueError(f"{k.value} has no closed form; use the fock_oracle source")

    def bind(fn):
        return lambda t, p: fn(gamma, 2.0 * (t - p))

    meta = {"gamma": gamma, "note": "closed form"}
    if k is BellKind.CH_K:
        s = cf.s_closed(gamma)
        lhs = iq.ch_combination(bind(cf.k_closed), lambda a: s, lambda b: s, expr.thetas, expr.phis)
        return iq._report(k, lhs, expr.thetas, expr.phis, meta)
    fn = {"E": cf.e_closed, "C": cf.c_closed, "F": cf.f_closed}[k.correlator_name]
    if k.is_chsh:
        return iq.chsh_value(bind(fn), expr.thetas, expr.phis, kind=k, **meta)
    return iq.chained_value(bind(fn), expr.L, expr.thetas, expr.phis, kind=k, **meta)


def oracle_state(gamma, cutoff=None, tail_tol=DEFAULT_TAIL):
    if cutoff is None:
        cutoff = fock.auto_cutoff(gamma, tail_tol, cap=MAX_AUTO_CUTOFF)
    return fock.bsv_state(gamma, cutoff)


def report_at(kind, gamma, thetas, phis, source="closed_form", cutoff=None, tail_tol=DEFAULT_TAIL):
    if source == "closed_form":
        return closed_form_report(kind, gamma, thetas, phis)
    if source == "fock_oracle":
        state = oracle_state(gamma, cutoff, tail_tol)
        return iq.evaluate(state, BellExpression(kind, thetas, phis), gamma=gamma)
    raise ValueError(f"unknown source {source!r}; expected one of {SOURCES}")


def optimize_settings(objective, thetas, phis, restarts=8, seed=0, step=0.1, min_step=1e-4):
    """Coordinate ascent over all analyzer angles, with random restarts.

    Each pass tries moving single angles by +-step; the step is halved when no
    move helps and the search ends below ``min_step``.
    """
    rng = np.random.default_rng(seed)
    starts = [np.array(thetas + phis, dtype=float)]
    for _ in range(restarts):
        starts.append(starts[0] + rng.uniform(-math.pi / 4, math.pi / 4, size=len(starts[0])))
    L = len(thetas)
    best_x, best_val = None, -math.inf
    for x in starts:
        val = objective(tuple(x[:L]), tuple(x[L:]))
        h = step
        while h >= min_step:
            improved = False
            for i in range(x.size):
                for sgn in (1.0, -1.0):
                    trial = x.copy()
                    trial[i] += sgn * h
                    tval = objective(tuple(trial[:L]), tuple(trial[L:]))
                    if tval > val:
                        x, val, improved = trial, tval, True
                        break
            if not improved:
                h /= 2
        if val > best_val:
            best_x, best_val = x, val
    return (tuple(best_x[:L]), tuple(best_x[L:])), best_val


def violation_margin(kind, L, gamma, source="closed_form", cutoff=None, optimize=False, seed=0, tail_tol=DEFAULT_TAIL):
    """Margin at the standard settings, or maximized over settings when ``optimize``."""
    thetas, phis = standard_settings(kind, L)
    if not optimize:
        return report_at(kind, gamma, thetas, phis, source, cutoff, tail_tol).margin
    if source == "fock_oracle":
        state = oracle_state(gamma, cutoff, tail_tol)

        def objective(t, p):
            return iq.evaluate(state, BellExpression(kind, t, p)).margin
    else:
        def objective(t, p):
            return closed_form_report(kind, gamma, t, p).margin
    _, best = optimize_settings(objective, thetas, phis, seed=seed)
    return best


@dataclass
class CriticalGain:
    kind: str
    L: int
    source: str
    gamma: float
    bracket: tuple[float, float]
    tolerance: float
    cutoff: int | None
    optimized: bool

    def as_dict(self):
        return asdict(self)


def critical_gain(kind, L=2, source="closed_form", tol=1e-3, gamma_max=2.5, step=0.05, cutoff=None, optimize=False, seed=0, tail_tol=DEFAULT_TAIL) -> CriticalGain:
    """Gain at which the (best) violation margin first drops to zero.

    A coarse pre-scan from ``step`` upward locates the first sign change;
    bisection then narrows that bracket to ``tol``.
    """
    kind = BellKind(kind)
    if kind.is_chsh or kind is BellKind.CH_K:
        L = 2

    def margin(g):
        return violation_margin(kind, L, g, source, cutoff, optimize, seed, tail_tol)

    lo = step
    m_lo = margin(lo)
    if m_lo <= 0:
        raise BracketError(f"{kind.value} (L={L}) is not violated at gain {lo}")
    g = lo
    while True:
        g = round(g + step, 12)
        if g > gamma_max + 1e-12:
            raise BracketError(f"{kind.value} (L={L}) still violated at gain {gamma_max}")
        m = margin(g)
        if m <= 0:
            hi = g
            break
        lo = g
    root = scipy.optimize.bisect(margin, lo, hi, xtol=tol / 4)
    half = tol / 4
    return CriticalGain(kind.value, L, source, float(root), (root - half, root + half), tol, cutoff, optimize)


# Tables ---------------------------------------------------------------------

def _table1_row(L, sources, tol):
    row = {"L": L}
    for label, kind in (("rw", BellKind.CHAINED_E), ("ratios", BellKind.CHAINED_C)):
        for src in sources:
            row[f"{label}_{src}"] = critical_gain(kind, L, src, tol=tol).gamma
        ref = REFERENCE_TABLE1[L][0 if label == "rw" else 1]
        row[f"{label}_reference"] = ref
        row[f"{label}_diff"] = row[f"{label}_{sources[0]}"] - ref
        if len(sources) == 2:
            row[f"{label}_two_path_diff"] = abs(row[f"{label}_{sources[0]}"] - row[f"{label}_{sources[1]}"])
    return row


def table1(sources=SOURCES, Ls=range(2, 14), tol=1e-4):
    """Critical gains of the intensity (E) and ratio (C) chains at equal spacings."""
    sources = tuple(sources)
    return _map(partial(_table1_row, sources=sources, tol=tol), Ls)


def rotation_by_expm(n, angle):
    """Rotation block from the generator a_+^dagger a_- - a_-^dagger a_+ (independent of the recursion)."""
    j = np.arange(n)
    gen = np.zeros((n + 1, n + 1))
    gen[j + 1, j] = np.sqrt((j + 1) * (n - j))
    return scipy.linalg.expm(angle * (gen - gen.T))


def distance_by_sectors(gamma, cutoff, theta, phi, variant):
    """Distance correlator of the truncated squeezed vacuum as a weighted sum over pair sectors."""
    total = 0.0
    for n in range(1, cutoff + 1):
        w = fock.sector_weight(gamma, n)
        m = np.zeros((n + 1, n + 1))
        for k in range(n + 1):
            m[n - k, k] = (-1) ** k / math.sqrt(n + 1)
        amp = rotation_by_expm(n, theta) @ m @ rotation_by_expm(n, phi).T
        f = np.arange(n + 1) / n if variant == "rates" else np.arange(n + 1, dtype=float)
        total += w * float(np.sum(amp ** 2 * np.abs(f[:, None] - f[None, :])))
    return total


def distance_by_outcomes(state, theta, phi, variant):
    """Distance correlator summed directly over the joint outcome map."""
    total = 0.0
    for (a, b), p in obs.joint_port_distribution(state, (theta, phi)).items():
        na, nb = a.n_plus + a.n_minus, b.n_plus + b.n_minus
        if variant == "rates":
            x = a.n_plus / na if na else 0.0
            y = b.n_plus / nb if nb else 0.0
        else:
            x, y = a.n_plus, b.n_plus
        total += p * abs(x - y)
    return total


def distance_chain_two_paths(gamma, L, variant, cutoff=25):
    """Distance-chain value at the standard settings via both evaluation paths."""
    thetas, phis = iq.correlated_chain_settings(L)
    state = fock.bsv_state(gamma, cutoff)
    a = iq.chained_sum(lambda t, p: distance_by_outcomes(state, t, p, variant), thetas, phis)
    b = iq.chained_sum(lambda t, p: distance_by_sectors(gamma, cutoff, t, p, variant), thetas, phis)
    return a, b


TABLE2_TOLERANCE = {2: 0.01, 7: 0.02}


def _table2_row(L, cutoff, tol):
    row = {"L": L, "cutoff": cutoff}
    for label, kind, variant, idx in (
        ("intensities", BellKind.CHAINED_DIST_INTENSITIES, "intensities", 0),
        ("rates", BellKind.CHAINED_DIST_RATES, "rates", 1),
    ):
        g = critical_gain(kind, L, "fock_oracle", tol=tol, cutoff=cutoff).gamma
        ref = REFERENCE_TABLE2[L][idx]
        a, b = distance_chain_two_paths(g, L, variant, cutoff)
        row[f"{label}_crit"] = g
        row[f"{label}_reference"] = ref
        row[f"{label}_diff"] = g - ref
        row[f"{label}_match"] = abs(g - ref) <= TABLE2_TOLERANCE.get(L, 0.02)
        row[f"{label}_two_path_diff"] = abs(a - b)
    return row


def table2(cutoff_pairs=25, Ls=range(2, 8), tol=1e-4):
    """Critical gains of the distance chains at a fixed pair cutoff."""
    return _map(partial(_table2_row, cutoff=cutoff_pairs, tol=tol), Ls)


def discrepancies(rows, columns, tolerance):
    """Rows whose computed value differs from the reference by more than ``tolerance``.

    ``columns`` maps a computed column to its reference column.
    """
    out = []
    for row in rows:
        for col, ref in columns.items():
            diff = row[col] - row[ref]
            if abs(diff) > tolerance:
                out.append({"L": row["L"], "column": col, "computed": row[col], "reference": row[ref], "difference": diff})
    return out


def visibility_curve(gammas):
    """Rows (gamma, v_new, v_old, 1/sqrt2)."""
    return [
        {"gamma": float(g), "v_new": cf.visibility_new(g), "v_old": cf.visibility_old(g), "threshold": cf.CHSH_THRESHOLD}
        for g in gammas
    ]
