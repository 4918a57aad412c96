"""Minimal reverse-mode autodiff over numpy arrays.

Exactly the primitives the graph network needs: matmul, add, sub,
concat, relu, sigmoid, row gather/tile, row mean, grouped segment max,
batch norm, softmax cross-entropy, and weighted binary cross-entropy.
Every op checks its forward output for NaN/Inf and reports the op name.
Backward accumulates into .grad, never overwrites.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteError, ShapeMismatchError


class Value:
    """A tensor node on the tape."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "op")

    def __init__(self, data, requires_grad: bool = False, parents=(), backward=None, op="leaf"):
        self.data = np.asarray(data)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = parents
        self._backward = backward
        self.op = op

    @property
    def shape(self):
        return self.data.shape

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self, seed=None):
        """Reverse sweep from this node; seed defaults to ones."""
        topo = []
        seen = set()

        def visit(node):
            if id(node) in seen:
                return
            seen.add(id(node))
            for p in node._parents:
                visit(p)
            topo.append(node)

        visit(self)
        self._accumulate(np.ones_like(self.data) if seed is None else np.asarray(seed))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _result(data, parents, backward, op) -> Value:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"non-finite value produced by op {op!r}")
    requires = any(p.requires_grad for p in parents)
    return Value(data, requires_grad=requires, parents=parents if requires else (),
                 backward=backward if requires else None, op=op)


def constant(data) -> Value:
    return Value(np.asarray(data), requires_grad=False, op="const")


def matmul(a: Value, b: Value) -> Value:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatchError(f"matmul: {a.data.shape} @ {b.data.shape}")
    out_data = a.data @ b.data

    def bw(g):
        if a.requires_grad:
            a._accumulate(g @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ g)

    return _result(out_data, (a, b), bw, "matmul")


def add(a: Value, b: Value) -> Value:
    """Elementwise add; also supports a row-vector bias (N,D) + (1,D)."""
    broadcast = a.data.shape != b.data.shape
    if broadcast and not (b.data.ndim == 2 and b.data.shape == (1, a.data.shape[1])):
        raise ShapeMismatchError(f"add: {a.data.shape} + {b.data.shape}")

    def bw(g):
        if a.requires_grad:
            a._accumulate(g)
        if b.requires_grad:
            b._accumulate(g.sum(axis=0, keepdims=True) if broadcast else g)

    return _result(a.data + b.data, (a, b), bw, "add")


def sub(a: Value, b: Value) -> Value:
    if a.data.shape != b.data.shape:
        raise ShapeMismatchError(f"sub: {a.data.shape} - {b.data.shape}")

    def bw(g):
        if a.requires_grad:
            a._accumulate(g)
        if b.requires_grad:
            b._accumulate(-g)

    return _result(a.data - b.data, (a, b), bw, "sub")


def relu(x: Value) -> Value:
    mask = x.data > 0

    def bw(g):
        if x.requires_grad:
            x._accumulate(g * mask)

    return _result(np.where(mask, x.data, 0.0), (x,), bw, "relu")


def sigmoid(x: Value) -> Value:
    out_data = np.where(x.data >= 0,
                        1.0 / (1.0 + np.exp(-np.abs(x.data))),
                        np.exp(-np.abs(x.data)) / (1.0 + np.exp(-np.abs(x.data))))

    def bw(g):
        if x.requires_grad:
            x._accumulate(g * out_data * (1.0 - out_data))

    return _result(out_data, (x,), bw, "sigmoid")


def concat_cols(parts: list[Value]) -> Value:
    rows = parts[0].data.shape[0]
    if any(p.data.ndim != 2 or p.data.shape[0] != rows for p in parts):
        raise ShapeMismatchError(f"concat_cols: shapes {[p.data.shape for p in parts]}")
    widths = [p.data.shape[1] for p in parts]
    offsets = np.cumsum([0] + widths)

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._accumulate(g[:, lo:hi])

    return _result(np.concatenate([p.data for p in parts], axis=1), tuple(parts), bw, "concat_cols")


def concat_rows(parts: list[Value]) -> Value:
    cols = parts[0].data.shape[1]
    if any(p.data.ndim != 2 or p.data.shape[1] != cols for p in parts):
        raise ShapeMismatchError(f"concat_rows: shapes {[p.data.shape for p in parts]}")
    counts = [p.data.shape[0] for p in parts]
    offsets = np.cumsum([0] + counts)

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._accumulate(g[lo:hi])

    return _result(np.concatenate([p.data for p in parts], axis=0), tuple(parts), bw, "concat_rows")


def take_rows(x: Value, idx: np.ndarray) -> Value:
    idx = np.asarray(idx, dtype=int)

    def bw(g):
        if x.requires_grad:
            gx = np.zeros_like(x.data)
            np.add.at(gx, idx, g)
            x._accumulate(gx)

    return _result(x.data[idx], (x,), bw, "take_rows")


def tile_rows(x: Value, n: int) -> Value:
    if x.data.ndim != 2 or x.data.shape[0] != 1:
        raise ShapeMismatchError(f"tile_rows expects a (1, D) input, got {x.data.shape}")

    def bw(g):
        if x.requires_grad:
            x._accumulate(g.sum(axis=0, keepdims=True))

    return _result(np.repeat(x.data, n, axis=0), (x,), bw, "tile_rows")


def mean_rows(x: Value) -> Value:
    """(N, D) -> (1, D) mean over rows."""
    if x.data.ndim != 2 or x.data.shape[0] == 0:
        raise ShapeMismatchError(f"mean_rows needs a non-empty 2-d input, got {x.data.shape}")
    n = x.data.shape[0]

    def bw(g):
        if x.requires_grad:
            x._accumulate(np.repeat(g / n, n, axis=0))

    return _result(x.data.mean(axis=0, keepdims=True), (x,), bw, "mean_rows")


def segment_max(x: Value, starts: np.ndarray, counts: np.ndarray, num_segments: int) -> Value:
    """Per-feature max over row groups.

    Rows of x are grouped by destination segment: segment s owns rows
    starts[s] .. starts[s]+counts[s]. Empty segments produce zeros and
    receive no gradient; ties route the gradient to the lowest row index.
    """
    starts = np.asarray(starts, dtype=int)
    counts = np.asarray(counts, dtype=int)
    m, d = x.data.shape
    out_data = np.zeros((num_segments, d), dtype=x.data.dtype)
    arg = np.full((num_segments, d), -1, dtype=int)
    nonempty = counts > 0
    if m and nonempty.any():
        red_starts = starts[nonempty]
        maxima = np.maximum.reduceat(x.data, red_starts, axis=0)
        out_data[nonempty] = maxima
        seg_of_row = np.repeat(np.flatnonzero(nonempty), counts[nonempty])
        hit = x.data == out_data[seg_of_row]
        row_idx = np.where(hit, np.arange(m)[:, None], m)
        arg[nonempty] = np.minimum.reduceat(row_idx, red_starts, axis=0)

    def bw(g):
        if x.requires_grad:
            gx = np.zeros_like(x.data)
            valid = arg >= 0
            flat = arg[valid] * d + np.broadcast_to(np.arange(d), arg.shape)[valid]
            np.add.at(gx.reshape(-1), flat, g[valid])
            x._accumulate(gx)

    return _result(out_data, (x,), bw, "segment_max")


def batchnorm(x: Value, gamma: Value, beta: Value,
              running_mean: np.ndarray, running_var: np.ndarray,
              training: bool, momentum: float = 0.1, eps: float = 1e-5) -> Value:
    """Batch normalization over rows.

    Training mode normalizes with batch statistics (biased variance) and
    updates the running buffers in place; eval mode uses the running
    statistics and never mutates them.
    """
    if x.data.ndim != 2 or x.data.shape[0] == 0:
        raise ShapeMismatchError(f"batchnorm expects non-empty 2-d input, got {x.data.shape}")
    if training:
        mu = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        running_mean *= 1.0 - momentum
        running_mean += momentum * mu
        running_var *= 1.0 - momentum
        running_var += momentum * var
    else:
        mu = running_mean
        var = running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (x.data - mu) * inv_std
    out_data = x_hat * gamma.data + beta.data

    def bw(g):
        if beta.requires_grad:
            beta._accumulate(g.sum(axis=0, keepdims=True))
        if gamma.requires_grad:
            gamma._accumulate((g * x_hat).sum(axis=0, keepdims=True))
        if x.requires_grad:
            if training:
                gy = g * gamma.data
                x._accumulate(inv_std * (gy - gy.mean(axis=0)
                                         - x_hat * (gy * x_hat).mean(axis=0)))
            else:
                x._accumulate(g * gamma.data * inv_std)

    return _result(out_data, (x, gamma, beta), bw, "batchnorm")


def softmax_cross_entropy(logits: Value, labels: np.ndarray) -> Value:
    """Mean cross-entropy of (N, K) logits against integer labels (N,)."""
    labels = np.asarray(labels, dtype=int)
    if logits.data.ndim != 2 or labels.shape != (logits.data.shape[0],):
        raise ShapeMismatchError(
            f"softmax_cross_entropy: logits {logits.data.shape}, labels {labels.shape}")
    if labels.min() < 0 or labels.max() >= logits.data.shape[1]:
        raise ShapeMismatchError("softmax_cross_entropy: label out of range")
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = logits.data.shape[0]
    loss = -log_probs[np.arange(n), labels].mean()

    def bw(g):
        if logits.requires_grad:
            probs = np.exp(log_probs)
            probs[np.arange(n), labels] -= 1.0
            logits._accumulate(g * probs / n)

    return _result(loss, (logits,), bw, "softmax_cross_entropy")


def weighted_bce_with_logits(logits: Value, targets: np.ndarray, weights: np.ndarray) -> Value:
    """Weighted-mean binary cross-entropy: sum(w * l) / sum(w)."""
    targets = np.asarray(targets, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    z = logits.data.reshape(-1)
    if not (z.shape == targets.shape == weights.shape):
        raise ShapeMismatchError(
            f"weighted_bce: logits {z.shape}, targets {targets.shape}, weights {weights.shape}")
    wsum = weights.sum()
    losses = np.maximum(z, 0.0) - z * targets + np.log1p(np.exp(-np.abs(z)))
    loss = (weights * losses).sum() / wsum

    def bw(g):
        if logits.requires_grad:
            sig = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                           np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
            logits._accumulate((g * weights * (sig - targets) / wsum).reshape(logits.data.shape))

    return _result(loss, (logits,), bw, "weighted_bce")
