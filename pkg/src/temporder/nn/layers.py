"""Layers with explicit forward/backward passes over numpy arrays.

No autograd tape: every layer returns a cache from forward and consumes it
in backward, accumulating parameter gradients in place. Parameterized
layers are classes; stateless ops are plain function pairs. All caches are
external, so one layer instance can be applied to many inputs per example
(shared/siamese use).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import BadIndex, EmptySequence, NonFinite, ShapeMismatch

_DEBUG = False


def set_debug(on: bool) -> None:
    """Enable NaN/Inf post-condition checks on layer outputs."""
    global _DEBUG
    _DEBUG = bool(on)


def debug_checks() -> bool:
    return _DEBUG


def _finite(x: np.ndarray) -> np.ndarray:
    if _DEBUG and not np.all(np.isfinite(x)):
        raise NonFinite("non-finite value produced")
    return x


class Parameter:
    """A named array with a same-shaped gradient accumulator."""

    __slots__ = ("name", "data", "grad")

    def __init__(self, name: str, data: np.ndarray):
        self.name = name
        self.data = data
        self.grad = np.zeros_like(data)

    def zero_grad(self) -> None:
        self.grad[...] = 0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape})"


def glorot_uniform(rng: np.random.Generator, shape, dtype=np.float32) -> np.ndarray:
    fan_out, fan_in = shape
    r = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-r, r, size=shape).astype(dtype)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form avoids exp overflow for large negative pre-activations
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


class Linear:
    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "linear"):
        self.W = Parameter(f"{name}.W", glorot_uniform(rng, (d_out, d_in), dtype))
        self.b = Parameter(f"{name}.b", np.zeros(d_out, dtype=dtype))

    def forward(self, x: np.ndarray):
        if x.shape != (self.W.data.shape[1],):
            raise ShapeMismatch(
                f"linear expects ({self.W.data.shape[1]},), got {x.shape}")
        return _finite(self.W.data @ x + self.b.data), x

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        x = cache
        self.W.grad += np.outer(dy, x)
        self.b.grad += dy
        return self.W.data.T @ dy

    def parameters(self):
        return [self.W, self.b]


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(dy: np.ndarray, x: np.ndarray) -> np.ndarray:
    # subgradient 0 at exactly 0
    return dy * (x > 0)


def mean_pool(X: np.ndarray) -> np.ndarray:
    """(T, K) -> (K,) arithmetic mean over positions."""
    if X.ndim != 2:
        raise ShapeMismatch(f"mean_pool expects a (T, K) matrix, got {X.shape}")
    if X.shape[0] == 0:
        raise EmptySequence("mean_pool over an empty sequence")
    return _finite(X.mean(axis=0))


def mean_pool_backward(dv: np.ndarray, T: int) -> np.ndarray:
    return np.tile(dv / T, (T, 1))


def concat(vectors) -> np.ndarray:
    return np.concatenate(vectors)


def concat_backward(dz: np.ndarray, sizes) -> list[np.ndarray]:
    out, offset = [], 0
    for size in sizes:
        out.append(dz[offset:offset + size])
        offset += size
    return out


def softmax_cross_entropy(logits: np.ndarray, gold: int):
    """Stable softmax + cross entropy; returns (loss, probs, dlogits)."""
    k = logits.shape[0]
    if k < 2:
        raise ShapeMismatch("need at least 2 classes")
    if not 0 <= gold < k:
        raise BadIndex(f"gold index {gold} outside 0..{k - 1}")
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    total = exp.sum()
    probs = exp / total
    loss = float(np.log(total) - shifted[gold])
    dlogits = probs.copy()
    dlogits[gold] -= 1.0
    _finite(probs)
    return loss, probs, dlogits


class LstmCell:
    """Single LSTM cell; gate rows ordered input, forget, candidate, output."""

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "lstm", forget_bias: float = 1.0):
        self.d_in = d_in
        self.hidden = hidden
        self.W = Parameter(f"{name}.W", glorot_uniform(rng, (4 * hidden, d_in), dtype))
        self.U = Parameter(f"{name}.U", glorot_uniform(rng, (4 * hidden, hidden), dtype))
        b = np.zeros(4 * hidden, dtype=dtype)
        b[hidden:2 * hidden] = forget_bias
        self.b = Parameter(f"{name}.b", b)

    def parameters(self):
        return [self.W, self.U, self.b]

    def step(self, x: np.ndarray, h: np.ndarray, c: np.ndarray):
        """One gated update; returns (h', c', cache)."""
        if x.shape != (self.d_in,) or h.shape != (self.hidden,) or c.shape != (self.hidden,):
            raise ShapeMismatch(
                f"lstm step shapes x{x.shape} h{h.shape} c{c.shape} "
                f"vs D={self.d_in} H={self.hidden}")
        n = self.hidden
        pre = self.W.data @ x + self.U.data @ h + self.b.data
        i = _sigmoid(pre[:n])
        f = _sigmoid(pre[n:2 * n])
        g = np.tanh(pre[2 * n:3 * n])
        o = _sigmoid(pre[3 * n:])
        c2 = f * c + i * g
        tc = np.tanh(c2)
        h2 = o * tc
        _finite(h2)
        return h2, c2, (x, h, c, i, f, g, o, tc)

    def step_backward(self, dh2: np.ndarray, dc2: np.ndarray, cache):
        """Backward through one step; returns (dx, dh, dc)."""
        x, h, c, i, f, g, o, tc = cache
        do = dh2 * tc
        dc = dc2 + dh2 * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c
        dc_prev = dc * f
        dpre = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ])
        self.W.grad += np.outer(dpre, x)
        self.U.grad += np.outer(dpre, h)
        self.b.grad += dpre
        dx = self.W.data.T @ dpre
        dh = self.U.data.T @ dpre
        return dx, dh, dc_prev

    def run(self, X: np.ndarray):
        """Unroll over a (T, D) sequence from zero states; returns (H, cache).

        The input projection is batched into one matmul; only the recurrent
        matvec stays inside the loop.
        """
        if X.ndim != 2 or X.shape[1] != self.d_in:
            raise ShapeMismatch(f"lstm run expects (T, {self.d_in}), got {X.shape}")
        T = X.shape[0]
        if T == 0:
            raise EmptySequence("lstm over an empty sequence")
        n = self.hidden
        dtype = X.dtype
        XW = X @ self.W.data.T + self.b.data
        U = self.U.data
        I = np.empty((T, n), dtype)
        F = np.empty((T, n), dtype)
        G = np.empty((T, n), dtype)
        O = np.empty((T, n), dtype)
        C = np.empty((T, n), dtype)
        TC = np.empty((T, n), dtype)
        HS = np.empty((T, n), dtype)
        h = np.zeros(n, dtype)
        c = np.zeros(n, dtype)
        for t in range(T):
            pre = XW[t] + U @ h
            i = _sigmoid(pre[:n])
            f = _sigmoid(pre[n:2 * n])
            g = np.tanh(pre[2 * n:3 * n])
            o = _sigmoid(pre[3 * n:])
            c = f * c + i * g
            tc = np.tanh(c)
            h = o * tc
            I[t] = i
            F[t] = f
            G[t] = g
            O[t] = o
            C[t] = c
            TC[t] = tc
            HS[t] = h
        _finite(HS)
        return HS, (X, I, F, G, O, C, TC, HS)

    def run_backward(self, dH: np.ndarray, cache) -> np.ndarray:
        X, I, F, G, O, C, TC, HS = cache
        T, n = dH.shape
        dtype = X.dtype
        dPre = np.empty((T, 4 * n), dtype)
        dh = np.zeros(n, dtype)
        dc = np.zeros(n, dtype)
        UT = self.U.data.T
        for t in range(T - 1, -1, -1):
            dh = dh + dH[t]
            tc = TC[t]
            do = dh * tc
            dc = dc + dh * O[t] * (1.0 - tc * tc)
            c_prev = C[t - 1] if t > 0 else 0.0
            row = dPre[t]
            row[:n] = dc * G[t] * I[t] * (1.0 - I[t])
            row[n:2 * n] = dc * c_prev * F[t] * (1.0 - F[t])
            row[2 * n:3 * n] = dc * I[t] * (1.0 - G[t] * G[t])
            row[3 * n:] = do * O[t] * (1.0 - O[t])
            dh = UT @ row
            dc = dc * F[t]
        h_prev = np.vstack([np.zeros((1, n), dtype), HS[:-1]])
        self.W.grad += dPre.T @ X
        self.U.grad += dPre.T @ h_prev
        self.b.grad += dPre.sum(axis=0)
        return dPre @ self.W.data


class BiLstm:
    """Bidirectional wrapper: output t is [forward state t; backward state t]."""

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "bilstm"):
        self.hidden = hidden
        self.fwd = LstmCell(d_in, hidden, rng, dtype, name=f"{name}.fwd")
        self.bwd = LstmCell(d_in, hidden, rng, dtype, name=f"{name}.bwd")

    def parameters(self):
        return self.fwd.parameters() + self.bwd.parameters()

    def forward(self, X: np.ndarray):
        if X.shape[0] == 0:
            raise EmptySequence("bilstm over an empty sequence")
        Hf, cache_f = self.fwd.run(X)
        Hb, cache_b = self.bwd.run(np.ascontiguousarray(X[::-1]))
        Y = np.concatenate([Hf, Hb[::-1]], axis=1)
        return Y, (cache_f, cache_b)

    def backward(self, dY: np.ndarray, cache) -> np.ndarray:
        cache_f, cache_b = cache
        n = self.hidden
        dXf = self.fwd.run_backward(np.ascontiguousarray(dY[:, :n]), cache_f)
        dXb = self.bwd.run_backward(np.ascontiguousarray(dY[::-1, n:]), cache_b)
        return dXf + dXb[::-1]


class Embedding:
    def __init__(self, vocab_size: int, dim: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "emb", scale: float = 0.1):
        self.table = Parameter(
            name, rng.uniform(-scale, scale, size=(vocab_size, dim)).astype(dtype))

    def parameters(self):
        return [self.table]

    def forward(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.size == 0:
            raise EmptySequence("embedding lookup on an empty id sequence")
        if ids.min() < 0 or ids.max() >= self.table.data.shape[0]:
            raise BadIndex("embedding id out of range")
        return self.table.data[ids]

    def backward(self, dX: np.ndarray, ids: np.ndarray) -> None:
        np.add.at(self.table.grad, ids, dX)


class FeedForward:
    """Stack of ReLU hidden layers plus a final projection."""

    def __init__(self, d_in: int, hidden_dims, d_out: int,
                 rng: np.random.Generator, dtype=np.float32, name: str = "ff"):
        self.layers = []
        prev = d_in
        for k, dim in enumerate(hidden_dims):
            self.layers.append(Linear(prev, dim, rng, dtype, name=f"{name}.h{k}"))
            prev = dim
        self.out = Linear(prev, d_out, rng, dtype, name=f"{name}.out")

    def parameters(self):
        params = []
        for layer in self.layers:
            params.extend(layer.parameters())
        params.extend(self.out.parameters())
        return params

    def forward(self, x: np.ndarray):
        caches = []
        for layer in self.layers:
            pre, cache = layer.forward(x)
            caches.append((cache, pre))
            x = relu(pre)
        logits, out_cache = self.out.forward(x)
        return logits, (caches, out_cache)

    def backward(self, dlogits: np.ndarray, cache) -> np.ndarray:
        caches, out_cache = cache
        dx = self.out.backward(dlogits, out_cache)
        for layer, (lin_cache, pre) in zip(reversed(self.layers), reversed(caches)):
            dx = layer.backward(relu_backward(dx, pre), lin_cache)
        return dx
