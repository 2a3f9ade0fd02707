import numpy as np
import pytest
import sympy

from eegbench.nn import tensor as T
from eegbench.nn.gradcheck import max_gradcheck_error
from eegbench.nn.recurrent import (
    GruCell,
    LstmCell,
    gru_sequence,
    gru_step,
    lstm_sequence,
    lstm_step,
)
from eegbench.nn.tensor import Tensor


def zeroed(cell):
    for p in cell.parameters():
        p.values[...] = 0.0
    return cell


class TestStepValues:
    def test_gru_zero_cell_keeps_zero_state(self):
        cell = zeroed(GruCell(3, 4, np.random.default_rng(0)))
        x = Tensor(np.random.default_rng(1).normal(size=(2, 3)))
        h = Tensor(np.zeros((2, 4)))
        out = gru_step(cell, x, h)
        np.testing.assert_allclose(out.values, np.zeros((2, 4)), atol=1e-15)

    def test_lstm_zero_cell_keeps_zero_state(self):
        cell = zeroed(LstmCell(3, 4, np.random.default_rng(0)))
        x = Tensor(np.random.default_rng(2).normal(size=(2, 3)))
        h = Tensor(np.zeros((2, 4)))
        c = Tensor(np.zeros((2, 4)))
        h_t, c_t = lstm_step(cell, x, h, c)
        np.testing.assert_allclose(h_t.values, np.zeros((2, 4)), atol=1e-15)
        np.testing.assert_allclose(c_t.values, np.zeros((2, 4)), atol=1e-15)

    def test_zero_cell_stays_zero_over_many_steps(self):
        cell = zeroed(GruCell(1, 2, np.random.default_rng(0)))
        h = Tensor(np.zeros((1, 2)))
        for t in range(178):
            h = gru_step(cell, Tensor(np.zeros((1, 1))), h)
        np.testing.assert_array_equal(h.values, np.zeros((1, 2)))

    def test_sequence_matches_composed_steps_gru(self):
        rng = np.random.default_rng(3)
        cell = GruCell(2, 3, rng)
        x_val = rng.normal(size=(2, 5, 2))
        seq = gru_sequence(cell, Tensor(x_val))
        h = Tensor(np.zeros((2, 3)))
        for t in range(5):
            h = gru_step(cell, Tensor(x_val[:, t, :]), h)
            np.testing.assert_allclose(seq.values[:, t, :], h.values, atol=1e-12)

    def test_sequence_matches_composed_steps_lstm(self):
        rng = np.random.default_rng(4)
        cell = LstmCell(2, 3, rng)
        x_val = rng.normal(size=(2, 5, 2))
        seq = lstm_sequence(cell, Tensor(x_val))
        h = Tensor(np.zeros((2, 3)))
        c = Tensor(np.zeros((2, 3)))
        for t in range(5):
            h, c = lstm_step(cell, Tensor(x_val[:, t, :]), h, c)
            np.testing.assert_allclose(seq.values[:, t, :], h.values, atol=1e-12)

    def test_forget_gate_bias_initialized_to_one(self):
        cell = LstmCell(1, 4, np.random.default_rng(0))
        np.testing.assert_array_equal(cell.b.values[4:8], np.ones(4))
        np.testing.assert_array_equal(cell.b.values[:4], np.zeros(4))


class TestParameterCounts:
    def test_gru_layer_one(self):
        cell = GruCell(1, 32, np.random.default_rng(0))
        assert cell.n_parameters() == 3 * (32 * 1 + 32 * 32 + 32) == 3264

    def test_lstm_layer_one(self):
        cell = LstmCell(1, 32, np.random.default_rng(0))
        assert cell.n_parameters() == 4 * (32 * 1 + 32 * 32 + 32) == 4352


class TestStepGradients:
    def test_gru_step_gradcheck(self):
        rng = np.random.default_rng(5)
        cell = GruCell(2, 3, rng)
        x = Tensor(rng.normal(size=(2, 2)), requires_grad=True)
        h = Tensor(rng.normal(size=(2, 3)), requires_grad=True)

        def loss_fn():
            out = gru_step(cell, x, h)
            return T.sum_all(T.mul(out, out))

        assert max_gradcheck_error(loss_fn, cell.parameters() + [x, h]) < 1e-4

    def test_lstm_step_gradcheck(self):
        rng = np.random.default_rng(6)
        cell = LstmCell(2, 3, rng)
        x = Tensor(rng.normal(size=(2, 2)), requires_grad=True)
        h = Tensor(rng.normal(size=(2, 3)), requires_grad=True)
        c = Tensor(rng.normal(size=(2, 3)), requires_grad=True)

        def loss_fn():
            h_t, c_t = lstm_step(cell, x, h, c)
            return T.sum_all(T.add(T.mul(h_t, h_t), T.mul(c_t, c_t)))

        assert max_gradcheck_error(loss_fn, cell.parameters() + [x, h, c]) < 1e-4


class TestSequenceGradients:
    @pytest.mark.parametrize("kind", ["gru", "lstm"])
    def test_sequence_gradcheck(self, kind):
        rng = np.random.default_rng(7)
        cell = (GruCell if kind == "gru" else LstmCell)(2, 3, rng)
        seq_fn = gru_sequence if kind == "gru" else lstm_sequence
        x = Tensor(rng.normal(size=(2, 4, 2)), requires_grad=True)
        labels = np.array([0, 2])

        def loss_fn():
            out = seq_fn(cell, x)
            return T.softmax_cross_entropy(T.last_step(out), labels)[0]

        assert max_gradcheck_error(loss_fn, cell.parameters() + [x]) < 1e-4

    @pytest.mark.parametrize("kind", ["gru", "lstm"])
    def test_sequence_matches_step_composition_gradients(self, kind):
        # The fused BPTT node and the primitive-composed unroll must agree.
        rng = np.random.default_rng(8)
        cell = (GruCell if kind == "gru" else LstmCell)(2, 3, rng)
        x_val = rng.normal(size=(2, 6, 2))
        labels = np.array([1, 0])

        seq_fn = gru_sequence if kind == "gru" else lstm_sequence
        for p in cell.parameters():
            p.zero_grad()
        loss, _ = T.softmax_cross_entropy(
            T.last_step(seq_fn(cell, Tensor(x_val))), labels
        )
        loss.backward()
        fused = [p.grad.copy() for p in cell.parameters()]

        for p in cell.parameters():
            p.zero_grad()
        h = Tensor(np.zeros((2, 3)))
        c = Tensor(np.zeros((2, 3)))
        for t in range(6):
            if kind == "gru":
                h = gru_step(cell, Tensor(x_val[:, t, :]), h)
            else:
                h, c = lstm_step(cell, Tensor(x_val[:, t, :]), h, c)
        loss, _ = T.softmax_cross_entropy(h, labels)
        loss.backward()
        composed = [p.grad.copy() for p in cell.parameters()]

        for f, s in zip(fused, composed):
            np.testing.assert_allclose(f, s, atol=1e-12)


def _sym_sigmoid(z):
    return 1 / (1 + sympy.exp(-z))


class TestUnrolledBpttOracle:
    def test_gru_three_step_symbolic(self):
        # Scalar GRU unrolled by hand for 3 steps; sympy differentiates the
        # explicit expression, giving an oracle independent of the engine.
        names = "wz uz bz wr ur br wh uh bh".split()
        syms = sympy.symbols(names)
        wz, uz, bz, wr, ur, br, wh, uh, bh = syms
        xs = [sympy.Rational(3, 10), sympy.Rational(-7, 10), sympy.Rational(1, 2)]
        h = sympy.Integer(0)
        for x in xs:
            z = _sym_sigmoid(wz * x + uz * h + bz)
            r = _sym_sigmoid(wr * x + ur * h + br)
            cand = sympy.tanh(wh * x + uh * (r * h) + bh)
            h = (1 - z) * h + z * cand
        loss_expr = h**2

        rng = np.random.default_rng(9)
        point = rng.normal(size=9) * 0.7
        grads_expected = {
            name: float(sympy.lambdify(syms, sympy.diff(loss_expr, sym), "math")(*point))
            for name, sym in zip(names, syms)
        }
        values = {name: float(v) for name, v in zip(names, point)}

        cell = GruCell(1, 1, rng)
        cell.w_in_gates.values[...] = [[values["wz"], values["wr"]]]
        cell.w_rec_gates.values[...] = [[values["uz"], values["ur"]]]
        cell.b_gates.values[...] = [values["bz"], values["br"]]
        cell.w_in_cand.values[...] = [[values["wh"]]]
        cell.w_rec_cand.values[...] = [[values["uh"]]]
        cell.b_cand.values[...] = [values["bh"]]
        for p in cell.parameters():
            p.zero_grad()
        x_val = np.array([[float(x) for x in xs]]).reshape(1, 3, 1)
        out = T.last_step(gru_sequence(cell, Tensor(x_val)))
        T.sum_all(T.mul(out, out)).backward()

        got = {
            "wz": cell.w_in_gates.grad[0, 0],
            "wr": cell.w_in_gates.grad[0, 1],
            "uz": cell.w_rec_gates.grad[0, 0],
            "ur": cell.w_rec_gates.grad[0, 1],
            "bz": cell.b_gates.grad[0],
            "br": cell.b_gates.grad[1],
            "wh": cell.w_in_cand.grad[0, 0],
            "uh": cell.w_rec_cand.grad[0, 0],
            "bh": cell.b_cand.grad[0],
        }
        for name in names:
            assert got[name] == pytest.approx(grads_expected[name], abs=1e-10), name

    def test_lstm_three_step_symbolic(self):
        names = "wi ui bi wf uf bf wo uo bo wg ug bg".split()
        syms = sympy.symbols(names)
        wi, ui, bi, wf, uf, bf, wo, uo, bo, wg, ug, bg = syms
        xs = [sympy.Rational(4, 10), sympy.Rational(-1, 2), sympy.Rational(9, 10)]
        h = sympy.Integer(0)
        c = sympy.Integer(0)
        for x in xs:
            gi = _sym_sigmoid(wi * x + ui * h + bi)
            gf = _sym_sigmoid(wf * x + uf * h + bf)
            go = _sym_sigmoid(wo * x + uo * h + bo)
            gc = sympy.tanh(wg * x + ug * h + bg)
            c = gf * c + gi * gc
            h = go * sympy.tanh(c)
        loss_expr = h**2

        rng = np.random.default_rng(10)
        point = rng.normal(size=12) * 0.7
        grads_expected = {
            name: float(sympy.lambdify(syms, sympy.diff(loss_expr, sym), "math")(*point))
            for name, sym in zip(names, syms)
        }
        values = {name: float(v) for name, v in zip(names, point)}

        cell = LstmCell(1, 1, rng)
        cell.w_in.values[...] = [[values["wi"], values["wf"], values["wo"], values["wg"]]]
        cell.w_rec.values[...] = [[values["ui"], values["uf"], values["uo"], values["ug"]]]
        cell.b.values[...] = [values["bi"], values["bf"], values["bo"], values["bg"]]
        for p in cell.parameters():
            p.zero_grad()
        x_val = np.array([[float(x) for x in xs]]).reshape(1, 3, 1)
        out = T.last_step(lstm_sequence(cell, Tensor(x_val)))
        T.sum_all(T.mul(out, out)).backward()

        got = {
            "wi": cell.w_in.grad[0, 0],
            "wf": cell.w_in.grad[0, 1],
            "wo": cell.w_in.grad[0, 2],
            "wg": cell.w_in.grad[0, 3],
            "ui": cell.w_rec.grad[0, 0],
            "uf": cell.w_rec.grad[0, 1],
            "uo": cell.w_rec.grad[0, 2],
            "ug": cell.w_rec.grad[0, 3],
            "bi": cell.b.grad[0],
            "bf": cell.b.grad[1],
            "bo": cell.b.grad[2],
            "bg": cell.b.grad[3],
        }
        for name in names:
            assert got[name] == pytest.approx(grads_expected[name], abs=1e-10), name
