"""Named parameter/buffer store with bit-exact checkpoint round-trips."""

from __future__ import annotations

import base64
import json

import numpy as np

from ..errors import CheckpointError
from .autodiff import Value

CHECKPOINT_VERSION = 1


class ParamStore:
    """Ordered named parameters (trainable Values), persistent buffers
    (batch-norm running statistics), and optimizer moments."""

    def __init__(self):
        self.params: dict[str, Value] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self.opt_m: dict[str, np.ndarray] = {}
        self.opt_v: dict[str, np.ndarray] = {}
        self.step_count = 0
        self.metadata: dict = {}

    def add_param(self, name: str, data: np.ndarray) -> Value:
        if name in self.params:
            raise CheckpointError(f"duplicate parameter name {name!r}")
        v = Value(np.asarray(data), requires_grad=True, op=f"param:{name}")
        self.params[name] = v
        return v

    def add_buffer(self, name: str, data: np.ndarray) -> np.ndarray:
        if name in self.buffers:
            raise CheckpointError(f"duplicate buffer name {name!r}")
        arr = np.asarray(data)
        self.buffers[name] = arr
        return arr

    def zero_grads(self):
        for p in self.params.values():
            p.zero_grad()

    def parameter_count(self) -> int:
        return int(sum(p.data.size for p in self.params.values()))

    def copy(self) -> "ParamStore":
        out = ParamStore()
        for name, p in self.params.items():
            out.add_param(name, p.data.copy())
        for name, b in self.buffers.items():
            out.add_buffer(name, b.copy())
        out.opt_m = {k: v.copy() for k, v in self.opt_m.items()}
        out.opt_v = {k: v.copy() for k, v in self.opt_v.items()}
        out.step_count = self.step_count
        out.metadata = dict(self.metadata)
        return out


def _encode(arr: np.ndarray) -> dict:
    contiguous = np.ascontiguousarray(arr)
    return {
        "shape": list(arr.shape),
        "dtype": str(arr.dtype),
        "data": base64.b64encode(contiguous.tobytes()).decode("ascii"),
    }


def _decode(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    return np.frombuffer(raw, dtype=np.dtype(obj["dtype"])).reshape(obj["shape"]).copy()


def save_checkpoint(store: ParamStore, path: str) -> None:
    doc = {
        "version": CHECKPOINT_VERSION,
        "metadata": store.metadata,
        "step_count": store.step_count,
        "params": {k: _encode(v.data) for k, v in store.params.items()},
        "buffers": {k: _encode(v) for k, v in store.buffers.items()},
        "opt_m": {k: _encode(v) for k, v in store.opt_m.items()},
        "opt_v": {k: _encode(v) for k, v in store.opt_v.items()},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_checkpoint(path: str) -> ParamStore:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise CheckpointError(f"checkpoint not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {exc}") from None
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')!r}")
    store = ParamStore()
    for name, obj in doc["params"].items():
        store.add_param(name, _decode(obj))
    for name, obj in doc["buffers"].items():
        store.add_buffer(name, _decode(obj))
    store.opt_m = {k: _decode(v) for k, v in doc["opt_m"].items()}
    store.opt_v = {k: _decode(v) for k, v in doc["opt_v"].items()}
    store.step_count = doc["step_count"]
    store.metadata = doc["metadata"]
    return store
