"""Sequential networks, losses, Adam and the training loop."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layers import Layer, LayerSpec, ShapeError, activate, make_layer, sigmoid


class TrainingDivergedError(ArithmeticError):
    def __init__(self, step, loss):
        super().__init__(f"training diverged at step {step} (loss {loss})")
        self.step = step


def rng_for(seed: int, purpose: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 0x6D6C0000 + purpose]))


class Network:
    """A stack of layers. The last layer's sigmoid/softmax is folded into the loss."""

    def __init__(self, specs, input_shape, seed: int = 0):
        self.specs = [s if isinstance(s, LayerSpec) else LayerSpec(**s) for s in specs]
        if not self.specs:
            raise ValueError("network needs at least one layer")
        self.input_shape = tuple(int(v) for v in input_shape)
        self.seed = int(seed)
        rng = rng_for(seed, 1)
        self.layers: list[Layer] = []
        shape = self.input_shape
        for s in self.specs:
            layer = make_layer(s)
            shape = layer.build(shape, rng)
            self.layers.append(layer)
        self.output_shape = shape

    @property
    def output_activation(self) -> str:
        for s in reversed(self.specs):
            if s.kind in ("dense", "conv2d"):
                return s.activation
        return "none"

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[1:] != self.input_shape:
            raise ShapeError(f"expected input (batch, {self.input_shape}), got {x.shape}")
        return x

    def logits(self, x, training: bool = False, rng=None) -> np.ndarray:
        """Pre-activation output of the final layer."""
        x = self._check(x)
        last = max(i for i, s in enumerate(self.specs) if s.kind in ("dense", "conv2d"))
        for i, layer in enumerate(self.layers):
            x = layer.forward(x, training=training, rng=rng, final=(i == last))
        return x

    def forward(self, x) -> np.ndarray:
        z = self.logits(x)
        act = self.output_activation
        if act in ("sigmoid", "softmax"):
            return activate(z, act, 0.0)
        return z

    def predict(self, x, batch: int = 1024) -> np.ndarray:
        """Class labels: logit >= 0 for a single output, argmax otherwise."""
        out = []
        for i in range(0, len(x), batch):
            z = self.logits(x[i : i + batch])
            out.append((z[:, 0] >= 0).astype(int) if z.shape[1] == 1 else z.argmax(axis=1))
        return np.concatenate(out) if out else np.zeros(0, dtype=int)

    def backward(self, grad):
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def parameters(self):
        """(layer index, name, array) for every trainable tensor, in canonical order."""
        for i, layer in enumerate(self.layers):
            for name in sorted(layer.params):
                yield i, name, layer.params[name]

    def gradients(self):
        for i, layer in enumerate(self.layers):
            for name in sorted(layer.params):
                yield i, name, layer.grads[name]


def loss_and_grad(z: np.ndarray, y: np.ndarray, activation: str):
    """Mean loss and its gradient with respect to the final logits."""
    n = z.shape[0]
    if activation == "sigmoid":
        t = y.reshape(-1, 1).astype(float)
        # binary cross-entropy written on logits
        loss = np.mean(np.maximum(z, 0) - z * t + np.log1p(np.exp(-np.abs(z))))
        return float(loss), (sigmoid(z) - t) / n
    if activation == "softmax":
        m = z.max(axis=1, keepdims=True)
        lse = m[:, 0] + np.log(np.exp(z - m).sum(axis=1))
        loss = np.mean(lse - z[np.arange(n), y])
        p = np.exp(z - lse[:, None])
        p[np.arange(n), y] -= 1
        return float(loss), p / n
    t = y.reshape(z.shape).astype(float)
    return float(np.mean((z - t) ** 2)), 2 * (z - t) / z.size


@dataclass
class TrainParams:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 20
    batch: int = 32


class Adam:
    def __init__(self, params: list[np.ndarray], hp: TrainParams):
        self.hp = hp
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        hp = self.hp
        self.t += 1
        c1 = 1 - hp.beta1**self.t
        c2 = 1 - hp.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= hp.beta1
            m += (1 - hp.beta1) * g
            v *= hp.beta2
            v += (1 - hp.beta2) * g * g
            p -= hp.lr * (m / c1) / (np.sqrt(v / c2) + hp.eps)


@dataclass
class TrainResult:
    network: Network
    history: list[float] = field(default_factory=list)


def train(specs, X, y, hp: TrainParams | None = None, seed: int = 0) -> TrainResult:
    """Mini-batch Adam on shuffled data; returns the network and per-epoch mean loss."""
    hp = hp or TrainParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if len(X) != len(y) or len(X) == 0:
        raise ValueError("X and y must be nonempty and of equal length")
    net = Network(specs, X.shape[1:], seed=seed)
    act = net.output_activation
    params = [p for _, _, p in net.parameters()]
    opt = Adam(params, hp)
    rng = rng_for(seed, 2)
    history = []
    step = 0
    for _ in range(hp.epochs):
        order = rng.permutation(len(X))
        total = 0.0
        for i in range(0, len(X), hp.batch):
            idx = order[i : i + hp.batch]
            z = net.logits(X[idx], training=True, rng=rng)
            loss, g = loss_and_grad(z, y[idx], act)
            if not np.isfinite(loss):
                raise TrainingDivergedError(step, loss)
            net.backward(g)
            grads = [g for _, _, g in net.gradients()]
            with np.errstate(over="ignore", invalid="ignore"):
                opt.step(params, grads)
            state = params + opt.m + opt.v
            if not all(np.all(np.isfinite(a)) for a in state):
                raise TrainingDivergedError(step, "finite, but parameters or optimizer state are not")
            total += loss * len(idx)
            step += 1
        history.append(total / len(X))
    return TrainResult(net, history)


def gradient_check(net: Network, X, y, h: float = 1e-4, seed: int = 0, training: bool = False):
    """Max relative error between backprop and central differences, per parameter tensor.

    With ``training=True`` dropout masks are regenerated from the same seed on
    every evaluation, so the function being differentiated stays fixed.
    """
    act = net.output_activation

    def loss_at():
        rng = rng_for(seed, 3)
        z = net.logits(X, training=training, rng=rng)
        return loss_and_grad(z, y, act)

    _, g = loss_at()
    net.backward(g)
    analytic = [(i, name, gr.copy()) for i, name, gr in net.gradients()]
    report = {}
    for (i, name, p), (_, _, ga) in zip(list(net.parameters()), analytic):
        num = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            k = it.multi_index
            old = p[k]
            p[k] = old + h
            lp, _ = loss_at()
            p[k] = old - h
            lm, _ = loss_at()
            p[k] = old
            num[k] = (lp - lm) / (2 * h)
        denom = np.maximum(np.abs(num) + np.abs(ga), 1e-8)
        report[(i, name)] = float(np.max(np.abs(num - ga) / denom))
    return report


# ---------------------------------------------------------------------------
# architecture presets


def mlp(n_in: int, n_classes: int, hidden=(100,), activation="relu") -> list[LayerSpec]:
    """Dense ReLU hidden layers and a sigmoid (2 classes) or softmax head."""
    layers = [LayerSpec("dense", units=h, activation=activation) for h in hidden]
    if n_classes == 2:
        layers.append(LayerSpec("dense", units=1, activation="sigmoid"))
    else:
        layers.append(LayerSpec("dense", units=n_classes, activation="softmax"))
    return layers


def image_cnn(side: int, blocks: int = 3, slope: float = 0.01, dropout: float = 0.01) -> list[LayerSpec]:
    """Conv(3x3, same, ``side`` filters) + leaky ReLU + 2x2 max-pool + dropout, repeated."""
    layers = []
    for _ in range(blocks):
        layers += [
            LayerSpec("conv2d", units=side, kernel=3, activation="leaky_relu", slope=slope),
            LayerSpec("maxpool2d", kernel=2),
            LayerSpec("dropout", rate=dropout),
        ]
    layers += [
        LayerSpec("flatten"),
        LayerSpec("dense", units=side, activation="leaky_relu", slope=slope),
        LayerSpec("dense", units=1, activation="sigmoid"),
    ]
    return layers
