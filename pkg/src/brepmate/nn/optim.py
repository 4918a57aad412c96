"""Adam with bias correction over a ParamStore."""

from __future__ import annotations

import numpy as np

from .params import ParamStore


def adam_step(store: ParamStore, lr: float = 0.001,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    """One update over every parameter with a populated gradient.

    Moments persist in the store; gradients are zeroed afterwards. The
    step counter advances even when all gradients are zero or missing.
    """
    store.step_count += 1
    t = store.step_count
    bias1 = 1.0 - beta1**t
    bias2 = 1.0 - beta2**t
    for name, p in store.params.items():
        g = p.grad
        if g is None:
            g = np.zeros_like(p.data)
        if name not in store.opt_m:
            store.opt_m[name] = np.zeros_like(p.data)
            store.opt_v[name] = np.zeros_like(p.data)
        m = store.opt_m[name]
        v = store.opt_v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p.data = p.data - lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
    store.zero_grads()
