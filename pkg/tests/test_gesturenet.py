"""Layer math, forward/losses, Adam behavior, and checkpoints."""

import numpy as np
import pytest

from gestlink.gesturenet import (
    AdamState,
    ConvLayer,
    DenseLayer,
    NetworkParams,
    adam_step,
    cross_entropy,
    forward_batch,
    full_resolution_network,
    landmark_network,
    load_checkpoint,
    predict,
    raster_network,
    save_checkpoint,
    tiny_test_network,
)
from gestlink.gesturenet.layers import conv_forward, dropout_forward, max_pool, softmax

from helpers_nn import scalar_forward_probs, scalar_max_pool


class TestConv:
    def test_identity_kernel_is_relu(self):
        x = np.array([[[2.0]]])
        k = np.ones((1, 1, 1, 1))
        out, _ = conv_forward(x, k, np.zeros(1))
        assert out[0, 0, 0] == 2.0
        out_neg, _ = conv_forward(np.array([[[-2.0]]]), k, np.zeros(1))
        assert out_neg[0, 0, 0] == 0.0

    def test_zero_kernel_negative_bias_clamps(self):
        x = np.random.default_rng(0).random((5, 5, 2))
        k = np.zeros((3, 3, 2, 4))
        out, _ = conv_forward(x, k, -np.ones(4))
        assert np.all(out == 0.0)

    def test_ones_3x3_input_2x2_kernel(self):
        x = np.ones((3, 3, 1))
        k = np.ones((2, 2, 1, 1))
        out, _ = conv_forward(x, k, np.zeros(1))
        assert out.shape == (2, 2, 1)
        assert np.all(out == 4.0)

    def test_channel_mismatch_raises(self):
        with pytest.raises(ValueError, match="channels"):
            conv_forward(np.ones((4, 4, 3)), np.ones((3, 3, 2, 1)), np.zeros(1))


class TestMaxPool:
    def test_2x2_block(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1)
        out, _ = max_pool(x)
        assert out.shape == (1, 1, 1)
        assert out[0, 0, 0] == 4.0

    def test_constant_tensor_halves(self):
        x = np.full((6, 6, 3), 1.25)
        out, _ = max_pool(x)
        assert out.shape == (3, 3, 3)
        assert np.all(out == 1.25)

    def test_random_matches_window_scan_oracle(self):
        rng = np.random.default_rng(5)
        for shape in [(4, 4, 2), (5, 5, 1), (7, 4, 3), (1, 1, 2)]:
            x = rng.random(shape)
            out, _ = max_pool(x)
            expected = np.array(scalar_max_pool(x.tolist()))
            assert np.array_equal(out, expected)


class TestForward:
    def test_zero_params_give_uniform_probs(self):
        net = landmark_network(seed=0)
        for t in net.tensors():
            t[...] = 0.0
        pred = predict(net, np.zeros(42))
        assert np.allclose(pred.probs, 1.0 / 6.0, atol=1e-15)

    def test_probs_sum_to_one(self):
        net = landmark_network(seed=1)
        rng = np.random.default_rng(2)
        probs, _ = forward_batch(net, rng.random((64, 42)))
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) < 1e-9)
        assert np.all(probs >= 0.0)

    def test_prediction_confidence_matches_argmax(self):
        net = landmark_network(seed=3)
        pred = predict(net, np.random.default_rng(4).random(42))
        assert pred.confidence == pred.probs[pred.argmax_class]
        assert pred.argmax_class == int(np.argmax(pred.probs))

    def test_matches_scalar_reference_landmark(self):
        net = landmark_network(seed=7)
        x = np.random.default_rng(8).random(42)
        ours = predict(net, x).probs
        theirs = scalar_forward_probs(net, x)
        assert np.allclose(ours, theirs, rtol=0, atol=1e-12)

    def test_matches_scalar_reference_conv(self):
        net = tiny_test_network(seed=9)
        x = np.random.default_rng(10).random((8, 8, 1))
        ours = predict(net, x).probs
        theirs = scalar_forward_probs(net, x)
        assert np.allclose(ours, theirs, rtol=0, atol=1e-12)

    def test_golden_value_fixed_seed(self):
        net = tiny_test_network(seed=2024)
        x = (np.arange(64, dtype=np.float64).reshape(8, 8, 1) % 9) / 9.0
        probs = predict(net, x).probs
        golden = scalar_forward_probs(net, x)
        assert np.allclose(probs, golden, atol=1e-12)
        assert abs(probs.sum() - 1.0) < 1e-9

    def test_full_resolution_smoke(self):
        net = full_resolution_network(seed=0)
        assert len(net.conv_layers) == 4 and len(net.dense_layers) == 2
        pred = predict(net, np.random.default_rng(1).random((224, 224, 3)))
        assert abs(pred.probs.sum() - 1.0) < 1e-9

    def test_shape_mismatch_raises(self):
        net = landmark_network(seed=0)
        with pytest.raises(ValueError, match="shape"):
            predict(net, np.zeros(41))

    def test_no_nan_on_unit_inputs(self):
        net = raster_network(seed=11)
        rng = np.random.default_rng(12)
        probs, _ = forward_batch(net, rng.random((8, 32, 32, 1)))
        assert np.all(np.isfinite(probs))


class TestDropout:
    def test_infer_equals_train_expectation(self):
        rng = np.random.default_rng(21)
        x = rng.random(200) + 0.5
        total = np.zeros_like(x)
        n = 10_000
        for _ in range(n):
            dropped, _ = dropout_forward(x, 0.4, rng)
            total += dropped
        mean = total / n
        # aggregate expectation within 2%; per element within a 6-sigma band
        assert abs(mean.mean() - x.mean()) / x.mean() < 0.02
        sigma = np.sqrt(0.4 / 0.6) * x / np.sqrt(n)
        assert np.all(np.abs(mean - x) < 6 * sigma)

    def test_infer_mode_identity(self):
        net = landmark_network(seed=5)
        x = np.random.default_rng(6).random(42)
        a = predict(net, x).probs
        b = predict(net, x).probs
        assert np.array_equal(a, b)


class TestCrossEntropy:
    def test_certain_prediction_zero_loss(self):
        probs = np.zeros(6)
        probs[2] = 1.0
        assert cross_entropy(probs, 2) == pytest.approx(0.0, abs=1e-9)

    def test_uniform_is_log6(self):
        probs = np.full(6, 1.0 / 6.0)
        assert cross_entropy(probs, 0) == pytest.approx(np.log(6), abs=1e-9)

    def test_zero_probability_is_finite(self):
        probs = np.zeros(6)
        probs[0] = 1.0
        loss = cross_entropy(probs, 3)
        assert np.isfinite(loss)
        assert loss == pytest.approx(-np.log(1e-12), rel=1e-9)


class TestAdam:
    def _tiny(self):
        net = NetworkParams(
            input_shape=(3,),
            dense_layers=[DenseLayer(np.ones((3, 6)), np.zeros(6))],
        )
        return net

    def test_zero_gradient_leaves_params(self):
        net = self._tiny()
        before = [t.copy() for t in net.tensors()]
        state = AdamState.for_params(net)
        adam_step(net, net.zeros_like(), state, lr=0.01)
        for b, a in zip(before, net.tensors()):
            assert np.array_equal(b, a)
        assert state.step == 1

    def test_first_step_is_signed_lr(self):
        net = self._tiny()
        grads = net.zeros_like()
        grads.dense_layers[0].weights[...] = 0.25
        grads.dense_layers[0].bias[...] = -3.0
        before_w = net.dense_layers[0].weights.copy()
        before_b = net.dense_layers[0].bias.copy()
        state = AdamState.for_params(net)
        adam_step(net, grads, state, lr=0.001)
        # update = -lr * g / (|g| + eps) at t=1
        assert np.allclose(before_w - net.dense_layers[0].weights, 0.001, rtol=1e-6)
        assert np.allclose(before_b - net.dense_layers[0].bias, -0.001, rtol=1e-6)

    def test_constant_gradient_asymptote(self):
        net = self._tiny()
        grads = net.zeros_like()
        grads.dense_layers[0].weights[...] = 0.37
        state = AdamState.for_params(net)
        lr = 0.01
        prev = net.dense_layers[0].weights.copy()
        for _ in range(1000):
            prev = net.dense_layers[0].weights.copy()
            adam_step(net, grads, state, lr)
        step_mag = np.abs(prev - net.dense_layers[0].weights)
        assert np.all(np.abs(step_mag - lr) / lr < 0.05)


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        net = raster_network(seed=17)
        path = tmp_path / "model.gnet"
        save_checkpoint(net, path)
        loaded = load_checkpoint(path)
        assert loaded.input_shape == net.input_shape
        assert loaded.dropout_rate == net.dropout_rate
        for a, b in zip(net.tensors(), loaded.tensors()):
            assert np.array_equal(a, b)

    def test_magic_checked(self, tmp_path):
        path = tmp_path / "bad.gnet"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(Exception, match="magic"):
            load_checkpoint(path)

    def test_inference_identical_after_reload(self, tmp_path):
        net = landmark_network(seed=23)
        x = np.random.default_rng(24).random(42)
        before = predict(net, x).probs
        save_checkpoint(net, tmp_path / "m.gnet")
        after = predict(load_checkpoint(tmp_path / "m.gnet"), x).probs
        assert np.array_equal(before, after)


class TestParamsValidation:
    def test_output_width_enforced(self):
        with pytest.raises(ValueError, match="output width"):
            NetworkParams(input_shape=(3,), dense_layers=[DenseLayer(np.ones((3, 5)), np.zeros(5))])

    def test_dense_chain_enforced(self):
        with pytest.raises(ValueError, match="chain"):
            NetworkParams(
                input_shape=(3,),
                dense_layers=[
                    DenseLayer(np.ones((3, 4)), np.zeros(4)),
                    DenseLayer(np.ones((5, 6)), np.zeros(6)),
                ],
            )

    def test_conv_channel_chain_enforced(self):
        with pytest.raises(ValueError, match="channels"):
            NetworkParams(
                input_shape=(8, 8, 1),
                conv_layers=[ConvLayer(np.ones((3, 3, 2, 4)), np.zeros(4))],
                dense_layers=[DenseLayer(np.ones((4, 6)), np.zeros(6))],
            )

    def test_softmax_extreme_inputs(self):
        z = np.array([1000.0, -1000.0, 0.0, 500.0, 999.0, -5.0])
        p = softmax(z)
        assert np.all(np.isfinite(p))
        assert abs(p.sum() - 1.0) < 1e-9
