"""Tests of the dense network: forward pass, loss, manual backprop."""

import math

import numpy as np
import pytest

from gravopt import nn


def make_model(widths, seed=0):
    """Model from a width chain, ReLU hidden and identity final."""
    final = len(widths) - 2
    specs = [nn.LayerSpec(a, b, "identity" if i == final else "relu")
             for i, (a, b) in enumerate(zip(widths, widths[1:]))]
    return nn.model_init(specs, seed)


class TestLayerSpec:
    def test_valid(self):
        spec = nn.LayerSpec(4, 3, "relu")
        assert (spec.in_dim, spec.out_dim) == (4, 3)

    def test_bad_activation_rejected(self):
        with pytest.raises(ValueError):
            nn.LayerSpec(4, 3, "tanh")

    def test_bad_dims_rejected(self):
        with pytest.raises(ValueError):
            nn.LayerSpec(0, 3, "relu")
        with pytest.raises(ValueError):
            nn.LayerSpec(4, -1, "relu")


class TestModelInit:
    def test_parameter_count_of_standard_image_net(self):
        model = make_model([784, 128, 10], seed=7)
        count = sum(p.size for p in model.parameters())
        assert count == 784 * 128 + 128 + 128 * 10 + 10 == 101_770

    def test_biases_start_zero(self):
        model = make_model([6, 5, 3], seed=1)
        for b in model.biases:
            assert np.all(b == 0.0)

    def test_weight_scale_tracks_input_width(self):
        """Draws use standard deviation 1/sqrt(in_dim)."""
        model = make_model([400, 300, 2], seed=2)
        assert abs(np.std(model.weights[0]) - 1 / math.sqrt(400)) < 0.002

    def test_deterministic_per_seed(self):
        a = make_model([3, 4, 2], seed=5)
        b = make_model([3, 4, 2], seed=5)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_empty_specs_rejected(self):
        with pytest.raises(ValueError):
            nn.model_init([], seed=0)

    def test_broken_chain_rejected(self):
        specs = [nn.LayerSpec(3, 4, "relu"), nn.LayerSpec(5, 2, "identity")]
        with pytest.raises(ValueError):
            nn.model_init(specs, seed=0)

    def test_non_identity_final_rejected(self):
        with pytest.raises(ValueError):
            nn.model_init([nn.LayerSpec(3, 2, "relu")], seed=0)


class TestForward:
    def test_zero_parameters_give_zero_logits(self):
        model = make_model([4, 3, 2], seed=0)
        for p in model.parameters():
            p[:] = 0.0
        logits = nn.forward(model, np.ones((5, 4)))
        assert np.all(logits == 0.0)

    def test_identity_weight_matrix_passes_input_through(self):
        model = nn.model_init([nn.LayerSpec(3, 3, "identity")], seed=0)
        model.weights[0][:] = np.eye(3)
        model.biases[0][:] = 0.0
        X = np.arange(6.0).reshape(2, 3)
        np.testing.assert_array_equal(nn.forward(model, X), X)

    def test_relu_zeroes_negative_preactivations(self):
        model = make_model([2, 3, 2], seed=0)
        model.weights[0][:] = -1.0
        model.biases[0][:] = 0.0
        logits = nn.forward(model, np.ones((1, 2)))
        # hidden layer is all zeros, so logits collapse to the final bias
        np.testing.assert_array_equal(logits, np.zeros((1, 2)))

    def test_pure_function_of_inputs(self):
        model = make_model([4, 4, 3], seed=3)
        X = np.random.default_rng(0).normal(size=(6, 4))
        assert np.array_equal(nn.forward(model, X), nn.forward(model, X))

    def test_wrong_width_rejected(self):
        model = make_model([4, 3, 2], seed=0)
        with pytest.raises(ValueError):
            nn.forward(model, np.ones((2, 5)))


class TestLossAndGrads:
    def test_uniform_logits_cost_log_of_class_count(self):
        model = make_model([5, 10], seed=0)
        for p in model.parameters():
            p[:] = 0.0
        loss, _ = nn.loss_and_grads(model, np.ones((4, 5)),
                                    np.array([0, 3, 7, 9]))
        assert loss == pytest.approx(math.log(10), rel=1e-12)

    def test_confident_correct_prediction_costs_nothing(self):
        model = nn.model_init([nn.LayerSpec(3, 3, "identity")], seed=0)
        model.weights[0][:] = 0.0
        model.biases[0][:] = np.array([100.0, 0.0, 0.0])
        loss, _ = nn.loss_and_grads(model, np.zeros((1, 3)), np.array([0]))
        assert 0.0 <= loss < 1e-10

    def test_loss_never_negative(self):
        rng = np.random.default_rng(6)
        model = make_model([4, 6, 3], seed=6)
        for _ in range(20):
            X = rng.normal(size=(5, 4))
            y = rng.integers(0, 3, size=5)
            loss, _ = nn.loss_and_grads(model, X, y)
            assert loss >= 0.0

    def test_logit_shift_invariance(self):
        """Adding a constant to every logit of a row leaves the loss alone."""
        rng = np.random.default_rng(7)
        logits = rng.normal(size=(6, 4))
        y = rng.integers(0, 4, size=6)
        base = nn.cross_entropy(logits, y)
        shifted = nn.cross_entropy(logits + 123.456, y)
        assert abs(base - shifted) < 1e-12

    def test_grads_match_finite_differences_across_depths(self):
        """Depths 1-3, widths <= 8, several seeds: max rel err <= 1e-5."""
        widths_by_depth = [[5, 3], [6, 8, 3], [4, 7, 5, 3]]
        for widths in widths_by_depth:
            for seed in range(3):
                model = make_model(widths, seed=seed)
                rng = np.random.default_rng(100 + seed)
                X = rng.normal(size=(4, widths[0]))
                y = rng.integers(0, widths[-1], size=4)
                worst, _ = nn.gradient_check(model, X, y)
                assert worst <= 1e-5

    def test_gradients_cover_every_parameter_tensor(self):
        model = make_model([4, 6, 3], seed=1)
        _, grads = nn.loss_and_grads(model, np.ones((2, 4)), np.array([0, 2]))
        params = model.parameters()
        assert len(grads) == len(params)
        for g, p in zip(grads, params):
            assert g.shape == p.shape

    def test_out_of_range_label_rejected(self):
        model = make_model([4, 3], seed=0)
        with pytest.raises(ValueError):
            nn.loss_and_grads(model, np.ones((1, 4)), np.array([3]))
        with pytest.raises(ValueError):
            nn.loss_and_grads(model, np.ones((1, 4)), np.array([-1]))

    def test_empty_batch_rejected(self):
        model = make_model([4, 3], seed=0)
        with pytest.raises(ValueError):
            nn.loss_and_grads(model, np.ones((0, 4)), np.array([], dtype=int))


class TestAccuracy:
    def test_perfect_predictions(self):
        logits = np.eye(4)
        assert nn.accuracy(logits, np.arange(4)) == 1.0

    def test_all_equal_logits_favor_lowest_class(self):
        logits = np.zeros((5, 3))
        assert nn.accuracy(logits, np.zeros(5, dtype=int)) == 1.0
        assert nn.accuracy(logits, np.full(5, 2)) == 0.0

    def test_half_right(self):
        logits = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
        assert nn.accuracy(logits, np.array([0, 1, 0, 1])) == 0.5

    def test_tie_breaks_to_lowest_index(self):
        logits = np.array([[0.5, 0.5, 0.1]])
        assert nn.accuracy(logits, np.array([0])) == 1.0
        assert nn.accuracy(logits, np.array([1])) == 0.0

    def test_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            nn.accuracy(np.zeros((3, 2)), np.zeros(4, dtype=int))


class TestGradientCheckHelpers:
    def test_numeric_gradients_align_with_analytic(self):
        model = make_model([3, 4, 2], seed=9)
        rng = np.random.default_rng(9)
        X = rng.normal(size=(3, 3))
        y = rng.integers(0, 2, size=3)
        _, analytic = nn.loss_and_grads(model, X, y)
        numeric = nn.numeric_gradients(model, X, y)
        for a, n in zip(analytic, numeric):
            np.testing.assert_allclose(a, n, atol=1e-7)

    def test_perturbation_is_restored(self):
        model = make_model([3, 2], seed=4)
        before = [p.copy() for p in model.parameters()]
        nn.numeric_gradients(model, np.ones((2, 3)), np.array([0, 1]))
        for p, b in zip(model.parameters(), before):
            assert np.array_equal(p, b)

    def test_reports_one_error_per_tensor(self):
        model = make_model([3, 4, 2], seed=2)
        worst, per_tensor = nn.gradient_check(model, np.ones((2, 3)),
                                              np.array([0, 1]))
        assert len(per_tensor) == len(model.parameters())
        assert worst == max(per_tensor)
