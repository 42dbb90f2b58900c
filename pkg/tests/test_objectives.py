"""Tests of the analytic objectives and their gradient oracles."""

import math

import numpy as np
import pytest

from gravopt.objectives import logistic_synthetic, quadratic, rosenbrock


def finite_difference_gradient(evaluate, w, h=1e-6):
    w = np.asarray(w, dtype=np.float64)
    grad = np.zeros_like(w)
    for i in range(w.size):
        bump = np.zeros_like(w)
        bump[i] = h
        hi, _ = evaluate(w + bump)
        lo, _ = evaluate(w - bump)
        grad[i] = (hi - lo) / (2 * h)
    return grad


def max_relative_error(analytic, numeric, floor=1e-3):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


class TestQuadratic:
    def test_value_and_gradient(self):
        obj = quadratic(100.0)
        loss, grad = obj.evaluate(np.array([1.0]))
        assert loss == 50.0
        assert grad[0] == 100.0

    def test_minimum_at_origin(self):
        obj = quadratic(3.0, dim=4)
        loss, grad = obj.evaluate(np.zeros(4))
        assert loss == 0.0
        assert np.all(grad == 0.0)
        w_star, loss_star = obj.known_minimum
        assert np.all(w_star == 0.0) and loss_star == 0.0

    def test_plain_descent_growth_factor(self):
        """With l*k = 10 every descent iterate is -9 times the last."""
        obj = quadratic(100.0)
        w = np.array([1.0])
        for _ in range(10):
            prev = w.copy()
            _, g = obj.evaluate(w)
            w = w - 0.1 * g
            assert w[0] == pytest.approx(-9.0 * prev[0], rel=1e-12)

    def test_non_positive_curvature_rejected(self):
        with pytest.raises(ValueError):
            quadratic(0.0)


class TestRosenbrock:
    def test_global_minimum(self):
        obj = rosenbrock()
        loss, grad = obj.evaluate(np.array([1.0, 1.0]))
        assert loss == 0.0
        np.testing.assert_array_equal(grad, [0.0, 0.0])

    def test_hand_computed_point(self):
        loss, grad = rosenbrock().evaluate(np.array([0.0, 0.0]))
        assert loss == 1.0
        np.testing.assert_array_equal(grad, [-2.0, 0.0])

    def test_gradient_matches_finite_differences(self):
        obj = rosenbrock()
        rng = np.random.default_rng(20)
        for _ in range(20):
            w = rng.uniform(-1.5, 1.5, size=2)
            _, analytic = obj.evaluate(w)
            numeric = finite_difference_gradient(obj.evaluate, w)
            assert max_relative_error(analytic, numeric) <= 1e-6


class TestLogisticSynthetic:
    def test_zero_weights_cost_log_two(self):
        obj = logistic_synthetic(50, 8, seed=1)
        loss, _ = obj.evaluate(np.zeros(8))
        assert loss == pytest.approx(math.log(2), rel=1e-12)

    def test_gradient_matches_finite_differences(self):
        obj = logistic_synthetic(40, 5, seed=2)
        rng = np.random.default_rng(2)
        for _ in range(20):
            w = rng.normal(size=5)
            _, analytic = obj.evaluate(w)
            numeric = finite_difference_gradient(obj.evaluate, w)
            assert max_relative_error(analytic, numeric) <= 1e-5

    def test_scaled_separator_saturates_loss(self):
        obj = logistic_synthetic(60, 6, seed=3)
        w_true, _ = obj.known_minimum
        loss, _ = obj.evaluate(100.0 * w_true)
        assert loss < 1e-3

    def test_deterministic_per_seed(self):
        a = logistic_synthetic(30, 4, seed=9)
        b = logistic_synthetic(30, 4, seed=9)
        w = np.full(4, 0.3)
        assert a.evaluate(w)[0] == b.evaluate(w)[0]

    def test_bad_sizes_rejected(self):
        with pytest.raises(ValueError):
            logistic_synthetic(0, 4, seed=0)
        with pytest.raises(ValueError):
            logistic_synthetic(10, 0, seed=0)


class TestEveryObjectiveGradient:
    """The shared contract: analytic gradients pass central differences
    with h = 1e-6 at 20 seeded random points."""

    @pytest.mark.parametrize("obj,scale", [
        (quadratic(7.0, dim=3), 2.0),
        (rosenbrock(), 1.5),
        (logistic_synthetic(30, 4, seed=5), 1.0),
    ], ids=["quadratic", "rosenbrock", "logistic"])
    def test_twenty_point_sweep(self, obj, scale):
        rng = np.random.default_rng(42)
        for _ in range(20):
            w = rng.uniform(-scale, scale, size=obj.dim)
            _, analytic = obj.evaluate(w)
            numeric = finite_difference_gradient(obj.evaluate, w)
            assert max_relative_error(analytic, numeric) <= 1e-5
