import numpy as np
import pytest

from eegbench.nn.gradcheck import max_gradcheck_error
from eegbench.nn.networks import (
    CnnNetwork,
    RnnNetwork,
    build_cnn,
    build_rnn,
    network_from_dict,
    network_to_dict,
    predict_proba,
)
from eegbench.nn import tensor as T


class TestCnnArchitecture:
    @pytest.mark.parametrize("num_classes", [2, 5])
    def test_output_width(self, num_classes):
        net = build_cnn(num_classes, seed=1)
        logits = net.forward(np.zeros((3, 178)))
        assert logits.shape == (3, num_classes)

    def test_shape_chain_with_default_kernels(self):
        # 178 -conv7-> 172 -pool2-> 86 -conv5-> 82 -pool2-> 41; flatten 16*41
        net = build_cnn(5)
        assert net.flat_dim == 16 * 41

    @pytest.mark.parametrize("kernels", [(3, 3), (5, 7), (7, 5)])
    def test_accepts_all_tuned_kernel_pairs(self, kernels):
        net = build_cnn(5, kernel_sizes=kernels, seed=0)
        out = net.forward(np.random.default_rng(0).normal(size=(2, 178)))
        assert out.shape == (2, 5)

    def test_forward_probabilities_sum_to_one(self):
        net = build_cnn(5, seed=2)
        proba = predict_proba(net, np.random.default_rng(1).normal(size=(4, 178)))
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)

    def test_same_seed_same_parameters(self):
        a = build_cnn(5, seed=7)
        b = build_cnn(5, seed=7)
        for (_, pa), (_, pb) in zip(a.named_parameters(), b.named_parameters()):
            np.testing.assert_array_equal(pa.values, pb.values)


class TestRnnArchitecture:
    def test_gru_and_lstm_share_shapes(self):
        gru = build_rnn("gru", 5, seed=1)
        lstm = build_rnn("lstm", 5, seed=1)
        x = np.random.default_rng(0).normal(size=(2, 178))
        assert gru.forward(x).shape == lstm.forward(x).shape == (2, 5)
        # Same head shapes; cells differ only in parameter count.
        assert gru.head1.w.shape == lstm.head1.w.shape
        assert gru.layer1.n_parameters() == 3264
        assert lstm.layer1.n_parameters() == 4352

    def test_unknown_cell_kind(self):
        with pytest.raises(ValueError):
            build_rnn("elman", 5)

    def test_zeroed_head_gives_uniform_predictions(self):
        net = build_rnn("gru", 5, seed=3)
        net.head2.w.values[...] = 0.0
        net.head2.b.values[...] = 0.0
        proba = predict_proba(net, np.random.default_rng(2).normal(size=(3, 178)))
        np.testing.assert_allclose(proba, np.full((3, 5), 0.2), atol=1e-12)

    def test_repeated_predict_identical(self):
        net = build_rnn("lstm", 3, seed=4)
        x = np.random.default_rng(3).normal(size=(4, 178))
        np.testing.assert_array_equal(predict_proba(net, x), predict_proba(net, x))

    def test_batch_of_one_matches_batch_row(self):
        for builder in (lambda: build_cnn(4, seed=5), lambda: build_rnn("gru", 4, seed=5)):
            net = builder()
            x = np.random.default_rng(4).normal(size=(6, 178))
            full = predict_proba(net, x)
            single = predict_proba(net, x[2:3])
            np.testing.assert_allclose(single[0], full[2], atol=1e-12)

    def test_training_forward_requires_rng(self):
        net = build_rnn("gru", 2, seed=0)
        with pytest.raises(ValueError, match="rng"):
            net.forward(np.zeros((1, 178)), training=True)


class TestNetworkGradients:
    def test_cnn_end_to_end_gradcheck(self):
        # A miniature copy of the architecture keeps the check affordable.
        net = CnnNetwork(3, kernel_sizes=(3, 3), seed=6, input_length=20)
        x = np.random.default_rng(5).normal(size=(2, 20))
        labels = np.array([0, 2])

        def loss_fn():
            return T.softmax_cross_entropy(net.forward(x), labels)[0]

        picked = [net.conv1.w, net.conv2.b, net.dense[0].b, net.dense[-1].w]
        assert max_gradcheck_error(loss_fn, picked) < 1e-4

    def test_rnn_end_to_end_gradcheck(self):
        net = RnnNetwork("lstm", 2, seed=7, input_length=6)
        x = np.random.default_rng(6).normal(size=(2, 6))
        labels = np.array([0, 1])

        def loss_fn():
            return T.softmax_cross_entropy(net.forward(x), labels)[0]

        picked = [net.layer1.w_in, net.layer2.w_rec, net.head2.w]
        assert max_gradcheck_error(loss_fn, picked) < 1e-4


class TestNetworkSerialization:
    @pytest.mark.parametrize("builder", [
        lambda: build_cnn(5, seed=8),
        lambda: build_rnn("gru", 5, seed=8),
        lambda: build_rnn("lstm", 5, seed=8),
    ])
    def test_round_trip(self, builder):
        net = builder()
        net.classes_ = [1, 2, 3, 4, 5]
        x = np.random.default_rng(7).normal(size=(3, 178))
        again = network_from_dict(network_to_dict(net))
        np.testing.assert_array_equal(predict_proba(again, x), predict_proba(net, x))
        assert again.classes_ == net.classes_
