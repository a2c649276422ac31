"""Minimal float64 MLP with hand-written backprop, Adam, and flat binary checkpoints.

Everything here is numpy-only and deliberately small: fully connected layers
with ReLU hidden activations, a linear or softmax output head, exact reverse-
mode gradients (batch-summed; callers scale the upstream signal), an Adam
optimizer with bias correction, a central-difference gradient checker, and a
versioned checkpoint format whose bytes depend only on the stored arrays.

For the softmax head, `backward` expects the upstream derivative with respect
to the output probabilities and routes it through the softmax Jacobian
internally.
"""

from __future__ import annotations

import io
import json
import math

import numpy as np

from .errors import CheckpointError

CHECKPOINT_MAGIC = b"SLIMNN01"


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax."""
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


class MLP:
    """Fully connected ReLU network.

    layer_sizes includes input and output widths, e.g. (8, 400, 300, 200,
    100, 18). head is "linear" or "softmax". Weights start uniform in
    +-1/sqrt(fan_in); biases start at zero.
    """

    def __init__(
        self,
        layer_sizes: tuple[int, ...],
        head: str = "linear",
        rng: np.random.Generator | None = None,
    ):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output widths")
        if head not in ("linear", "softmax"):
            raise ValueError(f"unknown head {head!r}")
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        self.head = head
        rng = rng if rng is not None else np.random.default_rng()
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / math.sqrt(fan_in)
            self.weights.append(
                rng.uniform(-bound, bound, size=(fan_in, fan_out))
            )
            self.biases.append(np.zeros(fan_out))
        self._cache_inputs: list[np.ndarray] | None = None
        self._cache_output: np.ndarray | None = None

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batched forward pass; caches activations for backward.

        x: (B, in). Returns (B, out) logits (linear head) or probabilities
        (softmax head).
        """
        a = np.asarray(x, dtype=np.float64)
        inputs = [a]
        for i in range(self.n_layers - 1):
            a = relu(a @ self.weights[i] + self.biases[i])
            inputs.append(a)
        z = a @ self.weights[-1] + self.biases[-1]
        out = softmax(z) if self.head == "softmax" else z
        self._cache_inputs = inputs
        self._cache_output = out
        return out

    def backward(self, upstream: np.ndarray) -> dict[str, np.ndarray]:
        """Exact gradients of sum_b L_b given dL/d(output) per sample.

        Gradients are summed over the batch; divide the upstream signal by
        the batch size for means. For the softmax head, upstream is the
        derivative with respect to the probabilities.
        """
        if self._cache_inputs is None:
            raise RuntimeError("backward called before forward")
        inputs = self._cache_inputs
        out = self._cache_output
        delta = np.asarray(upstream, dtype=np.float64)
        if self.head == "softmax":
            # dL/dz_k = p_k * (u_k - sum_j u_j p_j)
            inner = (delta * out).sum(axis=1, keepdims=True)
            delta = out * (delta - inner)
        grads: dict[str, np.ndarray] = {}
        for i in range(self.n_layers - 1, -1, -1):
            grads[f"w{i}"] = inputs[i].T @ delta
            grads[f"b{i}"] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (inputs[i] > 0.0)
        return grads

    def params(self) -> dict[str, np.ndarray]:
        """Live parameter arrays keyed w0, b0, w1, b1, ..."""
        out: dict[str, np.ndarray] = {}
        for i in range(self.n_layers):
            out[f"w{i}"] = self.weights[i]
            out[f"b{i}"] = self.biases[i]
        return out

    def set_params(self, values: dict[str, np.ndarray]) -> None:
        for i in range(self.n_layers):
            self.weights[i][...] = values[f"w{i}"]
            self.biases[i][...] = values[f"b{i}"]

    def copy(self) -> "MLP":
        clone = MLP.__new__(MLP)
        clone.layer_sizes = self.layer_sizes
        clone.head = self.head
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        clone._cache_inputs = None
        clone._cache_output = None
        return clone


class Adam:
    """Adam with bias correction. Refuses non-finite gradients."""

    def __init__(
        self,
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(
        self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]
    ) -> None:
        """In-place update of params given matching gradient arrays."""
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise ValueError(f"non-finite gradient for {name!r}")
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, g in grads.items():
            p = params[name]
            m = self._m.setdefault(name, np.zeros_like(p))
            v = self._v.setdefault(name, np.zeros_like(p))
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def finite_difference_check(
    loss_and_grads,
    params: dict[str, np.ndarray],
    rng: np.random.Generator,
    n_probes: int = 100,
    h: float = 1e-5,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    loss_and_grads() must evaluate the loss at the current params and return
    (loss, grads_dict). Probes n_probes random parameter entries in place.
    Relative error uses a small denominator floor so near-zero pairs do not
    blow up.
    """
    names = sorted(params)
    _, grads = loss_and_grads()
    worst = 0.0
    for _ in range(n_probes):
        name = names[int(rng.integers(len(names)))]
        arr = params[name]
        idx = int(rng.integers(arr.size))
        orig = arr.flat[idx]
        arr.flat[idx] = orig + h
        lp, _ = loss_and_grads()
        arr.flat[idx] = orig - h
        lm, _ = loss_and_grads()
        arr.flat[idx] = orig
        numeric = (lp - lm) / (2.0 * h)
        analytic = grads[name].flat[idx]
        denom = max(abs(numeric), abs(analytic), 1e-3)
        worst = max(worst, abs(numeric - analytic) / denom)
    return worst


# ---- checkpoint I/O ----


def save_arrays(path: str, arrays: dict[str, np.ndarray]) -> None:
    """Write arrays to a flat binary file with deterministic bytes.

    Layout: magic, u32 header length, JSON header (sorted keys), then the
    raw little-endian float64 bytes of each array in header order.
    """
    names = sorted(arrays)
    header = {
        "names": names,
        "shapes": {n: list(arrays[n].shape) for n in names},
        "dtype": "<f8",
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    buf = io.BytesIO()
    buf.write(CHECKPOINT_MAGIC)
    buf.write(len(blob).to_bytes(4, "little"))
    buf.write(blob)
    for n in names:
        buf.write(
            np.ascontiguousarray(arrays[n], dtype="<f8").tobytes()
        )
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def load_arrays(path: str) -> dict[str, np.ndarray]:
    """Read a checkpoint written by save_arrays."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if raw[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint file")
    off = len(CHECKPOINT_MAGIC)
    hlen = int.from_bytes(raw[off : off + 4], "little")
    off += 4
    try:
        header = json.loads(raw[off : off + hlen])
    except ValueError as exc:
        raise CheckpointError(f"corrupt checkpoint header in {path}") from exc
    off += hlen
    out: dict[str, np.ndarray] = {}
    for name in header["names"]:
        shape = tuple(header["shapes"][name])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        chunk = raw[off : off + nbytes]
        if len(chunk) != nbytes:
            raise CheckpointError(f"truncated checkpoint {path}")
        off += nbytes
        out[name] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
    if off != len(raw):
        raise CheckpointError(f"trailing bytes in checkpoint {path}")
    return out
