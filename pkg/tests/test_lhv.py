"""Hidden-variable models, bound fuzzing and the intensity-normalization loophole."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellopt import inequalities as iq
from bellopt import lhv
from bellopt.inequalities import BellExpression, BellKind

TWO = ((0.0, 1.0), (0.5, 1.5))


def _model(intens_a, intens_b, weights=(1.0,)):
    return lhv.LhvModel(np.array(weights), TWO[0], TWO[1], np.array(intens_a, float), np.array(intens_b, float))


def test_rates_zero_convention():
    m = _model([[[0, 0], [3, 1]]], [[[0, 5], [0, 0]]])
    assert lhv.model_rates(m, 0, "A", 0.0) == (0.0, 0.0)
    assert lhv.model_rates(m, 0, "A", 0.0, primed=True)[0] == 1.0
    assert lhv.model_rates(m, 0, "A", 1.0) == (0.75, 0.25)
    assert lhv.model_rates(m, 0, "B", 0.5) == (0.0, 1.0)


def test_deterministic_saturation():
    m = _model([[[1, 0], [1, 0]]], [[[1, 0], [1, 0]]])
    assert lhv.evaluate_expression(m, BellExpression(BellKind.CHSH_C, *TWO)) == 2.0


def test_sampling_is_reproducible():
    a = lhv.sample_random_model(1, 1, TWO)
    b = lhv.sample_random_model(1, 1, TWO)
    np.testing.assert_array_equal(a.intensities_a, b.intensities_a)
    np.testing.assert_array_equal(a.weights, b.weights)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(1, 5))
def test_sampled_models_respect_rate_bounds(seed, k):
    m = lhv.sample_random_model(seed, k, TWO)
    assert -1 - 1e-12 <= lhv.evaluate_expression(m, BellExpression(BellKind.CH_K, *TWO)) <= 1e-12
    assert lhv.evaluate_expression(m, BellExpression(BellKind.CHAINED_DIST_RATES, *TWO)) >= -1e-12
    assert abs(lhv.evaluate_expression(m, BellExpression(BellKind.CHSH_C, *TWO))) <= 2 + 1e-12


def test_fuzz_small_run_clean_and_deterministic():
    a = lhv.fuzz_bounds(5, 300)
    b = lhv.fuzz_bounds(5, 300)
    assert a.total_violations == 0
    assert a == b
    assert a.checks["CHSH_C"] == 300


def test_loophole_model():
    m = lhv.loophole_model(10, 1)
    t, p = iq.optimal_chsh_settings()
    e = lhv.evaluate_expression(m, BellExpression(BellKind.CHSH_E, t, p))
    c = lhv.evaluate_expression(m, BellExpression(BellKind.CHSH_C, t, p))
    assert e >= 10 and c <= 2
    proj = lhv.constrained_projection(m)
    assert lhv.evaluate_expression(proj, BellExpression(BellKind.CHSH_E, t, p)) <= 2


@pytest.mark.parametrize("M,eps", [(2, 1), (5, 0.5), (10, 1), (3, 3)])
def test_loophole_scaling(M, eps):
    t, p = iq.optimal_chsh_settings()
    e = lhv.evaluate_expression(lhv.loophole_model(M, eps), BellExpression(BellKind.CHSH_E, t, p))
    assert e == pytest.approx(2 * (M / eps) ** 2)


def test_loophole_closes_when_totals_match():
    t, p = iq.optimal_chsh_settings()
    e = lhv.evaluate_expression(lhv.loophole_model(4, 4), BellExpression(BellKind.CHSH_E, t, p))
    assert abs(e) <= 2


def test_ch_lemma():
    assert lhv.ch_lemma_check(1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        lhv.ch_lemma_check(1, 0, 0, 0, 0, 1)


@settings(max_examples=300, deadline=None)
@given(
    X=st.floats(0, 100), Y=st.floats(0, 100),
    u=st.lists(st.floats(0, 1), min_size=4, max_size=4),
)
def test_ch_lemma_random(X, Y, u):
    assert lhv.ch_lemma_check(u[0] * X, u[1] * X, X, u[2] * Y, u[3] * Y, Y)


def test_ch_lemma_bulk():
    rng = np.random.default_rng(11)
    X, Y = rng.exponential(size=(2, 10 ** 6))
    x, xp = rng.random((2, 10 ** 6)) * X
    y, yp = rng.random((2, 10 ** 6)) * Y
    value = x * y + x * yp + xp * y - xp * yp - x * Y - X * y
    assert np.all(value <= 1e-12 * np.maximum(1, X * Y))


def test_model_class_rules():
    assert lhv.ModelClass(constrained_total=True, no_enhancement=False).no_enhancement


def test_constrained_model_requires_fixed_totals():
    with pytest.raises(ValueError):
        lhv.LhvModel(
            np.array([1.0]), TWO[0], TWO[1],
            np.array([[[1.0, 0.0], [2.0, 0.0]]]), np.array([[[1.0, 0.0], [1.0, 0.0]]]),
            model_class=lhv.ModelClass(constrained_total=True),
        )


def test_no_enhancement_checked():
    with pytest.raises(ValueError):
        lhv.LhvModel(
            np.array([1.0]), TWO[0], TWO[1],
            np.array([[[3.0, 0.0], [1.0, 0.0]]]), np.array([[[1.0, 0.0], [1.0, 0.0]]]),
            np.array([2.0]), np.array([2.0]),
            model_class=lhv.ModelClass(no_enhancement=True),
        )
