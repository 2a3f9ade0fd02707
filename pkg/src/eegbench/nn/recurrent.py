"""GRU and LSTM cells with full backpropagation through time.

Standard formulations: the GRU computes update gate z, reset gate r and a
candidate state tanh(W x + U(r*h) + b), blending h = (1-z)*h + z*candidate;
the LSTM computes input/forget/output gates plus a tanh cell candidate with
c = f*c + i*g and h = o*tanh(c).

Two routes are provided. ``gru_step``/``lstm_step`` compose one timestep out
of tensor primitives (handy for unit-level gradient checks). The
``*_sequence`` ops run a whole (batch, time, features) input through one
fused graph node whose backward replays all timesteps in reverse; the
input-side projections are batched into single matmuls across time.
"""

from __future__ import annotations

import numpy as np

from eegbench.nn import tensor as T
from eegbench.nn.tensor import Tensor, make_op

GATE_INIT_FORGET_BIAS = 1.0


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape: tuple) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def _gate_matrix(rng, input_dim, hidden_dim, n_gates) -> np.ndarray:
    """Concatenated per-gate blocks, each with its own Glorot bound."""
    blocks = [
        glorot(rng, input_dim, hidden_dim, (input_dim, hidden_dim)) for _ in range(n_gates)
    ]
    return np.concatenate(blocks, axis=1)


class GruCell:
    kind = "gru"

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        # update+reset gates share one concatenated matrix; candidate is separate
        self.w_in_gates = Tensor(_gate_matrix(rng, input_dim, hidden_dim, 2), requires_grad=True)
        self.w_rec_gates = Tensor(_gate_matrix(rng, hidden_dim, hidden_dim, 2), requires_grad=True)
        self.b_gates = Tensor(np.zeros(2 * hidden_dim), requires_grad=True)
        self.w_in_cand = Tensor(_gate_matrix(rng, input_dim, hidden_dim, 1), requires_grad=True)
        self.w_rec_cand = Tensor(_gate_matrix(rng, hidden_dim, hidden_dim, 1), requires_grad=True)
        self.b_cand = Tensor(np.zeros(hidden_dim), requires_grad=True)

    def parameters(self) -> list[Tensor]:
        return [
            self.w_in_gates,
            self.w_rec_gates,
            self.b_gates,
            self.w_in_cand,
            self.w_rec_cand,
            self.b_cand,
        ]

    def n_parameters(self) -> int:
        return sum(p.values.size for p in self.parameters())


class LstmCell:
    kind = "lstm"

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        # gate order: input, forget, output, cell candidate
        self.w_in = Tensor(_gate_matrix(rng, input_dim, hidden_dim, 4), requires_grad=True)
        self.w_rec = Tensor(_gate_matrix(rng, hidden_dim, hidden_dim, 4), requires_grad=True)
        bias = np.zeros(4 * hidden_dim)
        bias[hidden_dim : 2 * hidden_dim] = GATE_INIT_FORGET_BIAS
        self.b = Tensor(bias, requires_grad=True)

    def parameters(self) -> list[Tensor]:
        return [self.w_in, self.w_rec, self.b]

    def n_parameters(self) -> int:
        return sum(p.values.size for p in self.parameters())


def gru_step(cell: GruCell, x_t: Tensor, h_prev: Tensor) -> Tensor:
    """One GRU step from tensor primitives."""
    H = cell.hidden_dim
    a = T.add(
        T.add(T.matmul(x_t, cell.w_in_gates), T.matmul(h_prev, cell.w_rec_gates)), cell.b_gates
    )
    z = T.sigmoid(T.slice_cols(a, 0, H))
    r = T.sigmoid(T.slice_cols(a, H, 2 * H))
    s = T.mul(r, h_prev)
    candidate = T.tanh(
        T.add(T.add(T.matmul(x_t, cell.w_in_cand), T.matmul(s, cell.w_rec_cand)), cell.b_cand)
    )
    return T.add(h_prev, T.mul(z, T.sub(candidate, h_prev)))


def lstm_step(cell: LstmCell, x_t: Tensor, h_prev: Tensor, c_prev: Tensor) -> tuple[Tensor, Tensor]:
    """One LSTM step from tensor primitives; returns (h_t, c_t)."""
    H = cell.hidden_dim
    a = T.add(T.add(T.matmul(x_t, cell.w_in), T.matmul(h_prev, cell.w_rec)), cell.b)
    gate_in = T.sigmoid(T.slice_cols(a, 0, H))
    gate_forget = T.sigmoid(T.slice_cols(a, H, 2 * H))
    gate_out = T.sigmoid(T.slice_cols(a, 2 * H, 3 * H))
    candidate = T.tanh(T.slice_cols(a, 3 * H, 4 * H))
    c_t = T.add(T.mul(gate_forget, c_prev), T.mul(gate_in, candidate))
    h_t = T.mul(gate_out, T.tanh(c_t))
    return h_t, c_t


def _sigm(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def gru_sequence(cell: GruCell, x: Tensor) -> Tensor:
    """All hidden states of a GRU layer over (batch, time, features) input.

    One fused graph node; backward is an explicit reverse-time loop with the
    input projections batched across timesteps.
    """
    B, T_len, D = x.values.shape
    H = cell.hidden_dim
    in_gates = (x.values.reshape(B * T_len, D) @ cell.w_in_gates.values).reshape(B, T_len, 2 * H)
    in_cand = (x.values.reshape(B * T_len, D) @ cell.w_in_cand.values).reshape(B, T_len, H)

    h = np.zeros((B, H))
    hidden = np.empty((B, T_len, H))
    zs = np.empty((B, T_len, H))
    rs = np.empty((B, T_len, H))
    ss = np.empty((B, T_len, H))
    cands = np.empty((B, T_len, H))
    for t in range(T_len):
        a = in_gates[:, t, :] + h @ cell.w_rec_gates.values + cell.b_gates.values
        z = _sigm(a[:, :H])
        r = _sigm(a[:, H:])
        s = r * h
        cand = np.tanh(in_cand[:, t, :] + s @ cell.w_rec_cand.values + cell.b_cand.values)
        zs[:, t], rs[:, t], ss[:, t], cands[:, t] = z, r, s, cand
        h = (1.0 - z) * h + z * cand
        hidden[:, t] = h

    def backward(grad):
        h_prev_all = np.concatenate([np.zeros((B, 1, H)), hidden[:, :-1]], axis=1)
        d_gates = np.empty((B, T_len, 2 * H))
        d_cand_pre = np.empty((B, T_len, H))
        dh_carry = np.zeros((B, H))
        for t in range(T_len - 1, -1, -1):
            z, r, s, cand = zs[:, t], rs[:, t], ss[:, t], cands[:, t]
            h_prev = h_prev_all[:, t]
            dh = grad[:, t, :] + dh_carry
            dz = dh * (cand - h_prev)
            dcand = dh * z
            dh_prev = dh * (1.0 - z)
            dc_pre = dcand * (1.0 - cand * cand)
            ds = dc_pre @ cell.w_rec_cand.values.T
            dr = ds * h_prev
            dh_prev += ds * r
            da = np.concatenate([dz * z * (1.0 - z), dr * r * (1.0 - r)], axis=1)
            dh_prev += da @ cell.w_rec_gates.values.T
            d_gates[:, t] = da
            d_cand_pre[:, t] = dc_pre
            dh_carry = dh_prev
        flat_x = x.values.reshape(B * T_len, D)
        flat_h_prev = h_prev_all.reshape(B * T_len, H)
        flat_gates = d_gates.reshape(B * T_len, 2 * H)
        flat_cand = d_cand_pre.reshape(B * T_len, H)
        if cell.w_in_gates.requires_grad:
            cell.w_in_gates.grad += flat_x.T @ flat_gates
            cell.w_rec_gates.grad += flat_h_prev.T @ flat_gates
            cell.b_gates.grad += flat_gates.sum(axis=0)
            cell.w_in_cand.grad += flat_x.T @ flat_cand
            cell.w_rec_cand.grad += ss.reshape(B * T_len, H).T @ flat_cand
            cell.b_cand.grad += flat_cand.sum(axis=0)
        if x.requires_grad:
            dx = flat_gates @ cell.w_in_gates.values.T + flat_cand @ cell.w_in_cand.values.T
            x.grad += dx.reshape(B, T_len, D)

    return make_op(hidden, (x, *cell.parameters()), backward)


def lstm_sequence(cell: LstmCell, x: Tensor) -> Tensor:
    """All hidden states of an LSTM layer over (batch, time, features) input."""
    B, T_len, D = x.values.shape
    H = cell.hidden_dim
    in_proj = (x.values.reshape(B * T_len, D) @ cell.w_in.values).reshape(B, T_len, 4 * H)

    h = np.zeros((B, H))
    c = np.zeros((B, H))
    hidden = np.empty((B, T_len, H))
    cells = np.empty((B, T_len, H))
    gates = np.empty((B, T_len, 4 * H))  # sigm/tanh-activated i,f,o,g
    for t in range(T_len):
        a = in_proj[:, t, :] + h @ cell.w_rec.values + cell.b.values
        gi = _sigm(a[:, :H])
        gf = _sigm(a[:, H : 2 * H])
        go = _sigm(a[:, 2 * H : 3 * H])
        gc = np.tanh(a[:, 3 * H :])
        c = gf * c + gi * gc
        h = go * np.tanh(c)
        gates[:, t] = np.concatenate([gi, gf, go, gc], axis=1)
        cells[:, t] = c
        hidden[:, t] = h

    def backward(grad):
        h_prev_all = np.concatenate([np.zeros((B, 1, H)), hidden[:, :-1]], axis=1)
        c_prev_all = np.concatenate([np.zeros((B, 1, H)), cells[:, :-1]], axis=1)
        d_pre = np.empty((B, T_len, 4 * H))
        dh_carry = np.zeros((B, H))
        dc_carry = np.zeros((B, H))
        for t in range(T_len - 1, -1, -1):
            gi = gates[:, t, :H]
            gf = gates[:, t, H : 2 * H]
            go = gates[:, t, 2 * H : 3 * H]
            gc = gates[:, t, 3 * H :]
            tc = np.tanh(cells[:, t])
            dh = grad[:, t, :] + dh_carry
            do = dh * tc
            dc = dh * go * (1.0 - tc * tc) + dc_carry
            di = dc * gc
            df = dc * c_prev_all[:, t]
            dg = dc * gi
            dc_carry = dc * gf
            da = np.concatenate(
                [
                    di * gi * (1.0 - gi),
                    df * gf * (1.0 - gf),
                    do * go * (1.0 - go),
                    dg * (1.0 - gc * gc),
                ],
                axis=1,
            )
            dh_carry = da @ cell.w_rec.values.T
            d_pre[:, t] = da
        flat_x = x.values.reshape(B * T_len, D)
        flat_h_prev = h_prev_all.reshape(B * T_len, H)
        flat_pre = d_pre.reshape(B * T_len, 4 * H)
        if cell.w_in.requires_grad:
            cell.w_in.grad += flat_x.T @ flat_pre
            cell.w_rec.grad += flat_h_prev.T @ flat_pre
            cell.b.grad += flat_pre.sum(axis=0)
        if x.requires_grad:
            x.grad += (flat_pre @ cell.w_in.values.T).reshape(B, T_len, D)

    return make_op(hidden, (x, *cell.parameters()), backward)
