"""Layers with explicit forward/backward passes. Images are (batch, height, width, channels)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

ACTIVATIONS = ("relu", "leaky_relu", "sigmoid", "softmax", "none")


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network.

    kind: dense | conv2d | maxpool2d | flatten | dropout
    units: output width for dense, filter count for conv2d
    kernel: conv kernel side (odd) or pool size
    rate: dropout probability
    """

    kind: str
    units: int = 0
    activation: str = "none"
    slope: float = 0.1
    kernel: int = 3
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dense", "conv2d", "maxpool2d", "flatten", "dropout"):
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.kind in ("dense", "conv2d") and self.units < 1:
            raise ValueError(f"{self.kind} needs units >= 1")
        if self.kind == "conv2d" and self.kernel % 2 == 0:
            raise ValueError("conv kernel must be odd for 'same' padding")
        if self.kind == "dropout" and not 0 <= self.rate < 1:
            raise ValueError("dropout rate must be in [0, 1)")


def sigmoid(x):
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x):
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def activate(x, name: str, slope: float):
    if name == "relu":
        return np.maximum(x, 0.0)
    if name == "leaky_relu":
        return np.where(x > 0, x, slope * x)
    if name == "sigmoid":
        return sigmoid(x)
    if name == "softmax":
        return softmax(x)
    return x


def activate_grad(pre, out, grad, name: str, slope: float):
    if name == "relu":
        return grad * (pre > 0)
    if name == "leaky_relu":
        return grad * np.where(pre > 0, 1.0, slope)
    if name == "sigmoid":
        return grad * out * (1 - out)
    if name == "softmax":
        s = (grad * out).sum(axis=-1, keepdims=True)
        return out * (grad - s)
    return grad


class Layer:
    spec: LayerSpec
    params: dict
    grads: dict

    def __init__(self, spec: LayerSpec):
        self.spec = spec
        self.params = {}
        self.grads = {}

    def build(self, in_shape: tuple, rng: np.random.Generator) -> tuple:
        return in_shape

    def forward(self, x, training=False, rng=None, final=False):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError


class _Activated(Layer):
    """Shared activation handling; ``final=True`` returns pre-activations (logits)."""

    def _act(self, pre, final):
        self._pre = pre
        self._skip = final and self.spec.activation in ("sigmoid", "softmax")
        out = pre if self._skip else activate(pre, self.spec.activation, self.spec.slope)
        self._out = out
        return out

    def _act_back(self, grad):
        if self._skip:
            return grad
        return activate_grad(self._pre, self._out, grad, self.spec.activation, self.spec.slope)


def he_uniform(rng, fan_in, shape):
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Dense(_Activated):
    def build(self, in_shape, rng):
        if len(in_shape) != 1:
            raise ShapeError(f"dense expects flat input, got shape {in_shape}")
        n_in = in_shape[0]
        self.params = {
            "W": he_uniform(rng, n_in, (self.spec.units, n_in)),
            "b": np.zeros(self.spec.units),
        }
        return (self.spec.units,)

    def forward(self, x, training=False, rng=None, final=False):
        W = self.params["W"]
        if x.ndim != 2 or x.shape[1] != W.shape[1]:
            raise ShapeError(f"dense expects (batch, {W.shape[1]}), got {x.shape}")
        self._x = x
        return self._act(x @ W.T + self.params["b"], final)

    def backward(self, grad):
        g = self._act_back(grad)
        self.grads = {"W": g.T @ self._x, "b": g.sum(axis=0)}
        return g @ self.params["W"]


class Conv2D(_Activated):
    """'same' convolution, stride 1."""

    def build(self, in_shape, rng):
        if len(in_shape) != 3:
            raise ShapeError(f"conv2d expects (H, W, C) input, got {in_shape}")
        h, w, c = in_shape
        k = self.spec.kernel
        self.params = {
            "W": he_uniform(rng, k * k * c, (k, k, c, self.spec.units)),
            "b": np.zeros(self.spec.units),
        }
        return (h, w, self.spec.units)

    def _cols(self, x):
        k = self.spec.kernel
        r = k // 2
        xp = np.pad(x, ((0, 0), (r, r), (r, r), (0, 0)))
        # (B, H, W, C, k, k) -> (B, H, W, k, k, C)
        win = sliding_window_view(xp, (k, k), axis=(1, 2)).transpose(0, 1, 2, 4, 5, 3)
        return win.reshape(x.shape[0] * x.shape[1] * x.shape[2], -1)

    def forward(self, x, training=False, rng=None, final=False):
        W = self.params["W"]
        if x.ndim != 4 or x.shape[3] != W.shape[2]:
            raise ShapeError(f"conv2d expects (batch, H, W, {W.shape[2]}), got {x.shape}")
        self._shape = x.shape
        cols = self._cols(x)
        self._colsv = cols
        out = cols @ W.reshape(-1, W.shape[3]) + self.params["b"]
        return self._act(out.reshape(x.shape[0], x.shape[1], x.shape[2], -1), final)

    def backward(self, grad):
        g = self._act_back(grad)
        W = self.params["W"]
        k = self.spec.kernel
        r = k // 2
        B, H, Wd, C = self._shape
        g2 = g.reshape(-1, W.shape[3])
        self.grads = {
            "W": (self._colsv.T @ g2).reshape(W.shape),
            "b": g2.sum(axis=0),
        }
        dcols = (g2 @ W.reshape(-1, W.shape[3]).T).reshape(B, H, Wd, k, k, C)
        dxp = np.zeros((B, H + 2 * r, Wd + 2 * r, C))
        for i in range(k):
            for j in range(k):
                dxp[:, i : i + H, j : j + Wd, :] += dcols[:, :, :, i, j, :]
        return dxp[:, r : r + H, r : r + Wd, :]


class MaxPool2D(Layer):
    """Non-overlapping pooling, odd sizes padded ('same', output = ceil(n / k))."""

    def build(self, in_shape, rng):
        h, w, c = in_shape
        k = self.spec.kernel
        return (-(-h // k), -(-w // k), c)

    def forward(self, x, training=False, rng=None, final=False):
        k = self.spec.kernel
        B, H, W, C = x.shape
        Ho, Wo = -(-H // k), -(-W // k)
        xp = np.full((B, Ho * k, Wo * k, C), -np.inf)
        xp[:, :H, :W, :] = x
        blocks = xp.reshape(B, Ho, k, Wo, k, C).transpose(0, 1, 3, 5, 2, 4).reshape(B, Ho, Wo, C, k * k)
        idx = blocks.argmax(axis=-1)
        self._cache = (x.shape, idx)
        return np.take_along_axis(blocks, idx[..., None], axis=-1)[..., 0]

    def backward(self, grad):
        (B, H, W, C), idx = self._cache
        k = self.spec.kernel
        Ho, Wo = grad.shape[1], grad.shape[2]
        blocks = np.zeros((B, Ho, Wo, C, k * k))
        np.put_along_axis(blocks, idx[..., None], grad[..., None], axis=-1)
        dx = blocks.reshape(B, Ho, Wo, C, k, k).transpose(0, 1, 4, 2, 5, 3).reshape(B, Ho * k, Wo * k, C)
        return dx[:, :H, :W, :]


class Flatten(Layer):
    def build(self, in_shape, rng):
        return (int(np.prod(in_shape)),)

    def forward(self, x, training=False, rng=None, final=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)


class Dropout(Layer):
    """Inverted dropout; identity unless ``training``."""

    def forward(self, x, training=False, rng=None, final=False):
        if not training or self.spec.rate == 0:
            self._mask = None
            return x
        keep = 1.0 - self.spec.rate
        self._mask = (rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask


LAYER_TYPES = {
    "dense": Dense,
    "conv2d": Conv2D,
    "maxpool2d": MaxPool2D,
    "flatten": Flatten,
    "dropout": Dropout,
}


def make_layer(spec: LayerSpec) -> Layer:
    return LAYER_TYPES[spec.kind](spec)
