"""Weight export/import and the Heaviside genus formula g = theta(p)."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .layers import LayerSpec, activate
from .network import Network

HEADER = "# amoebakit weights v1"


class UnsupportedNetworkError(ValueError):
    pass


class WeightFormatError(ValueError):
    pass


@dataclass
class WeightRecord:
    input_shape: tuple[int, ...]
    specs: list[LayerSpec]
    params: list[dict[str, np.ndarray]]  # one dict per layer, canonical key order

    def dense_chain(self):
        """(W, b, activation, slope) for every dense layer, or None if other kinds appear."""
        out = []
        for spec, p in zip(self.specs, self.params):
            if spec.kind == "dense":
                out.append((p["W"], p["b"], spec.activation, spec.slope))
            elif spec.kind == "dropout":
                continue
            else:
                return None
        return out


def export_weights(net: Network) -> WeightRecord:
    params = [{k: layer.params[k].copy() for k in sorted(layer.params)} for layer in net.layers]
    return WeightRecord(net.input_shape, list(net.specs), params)


def import_weights(rec: WeightRecord) -> Network:
    net = Network(rec.specs, rec.input_shape, seed=0)
    for layer, p in zip(net.layers, rec.params):
        for k, v in p.items():
            if layer.params[k].shape != v.shape:
                raise WeightFormatError(f"shape mismatch for {k}: {layer.params[k].shape} vs {v.shape}")
            layer.params[k][...] = v
    return net


def decision_value(rec: WeightRecord, X) -> np.ndarray:
    """The final logit p for each row.

    For dense stacks this is the explicit chain
    p = W_L f(... f(W_1 x + b_1) ...) + b_L; other stacks are replayed layer by layer.
    """
    X = np.asarray(X, dtype=float)
    chain = rec.dense_chain()
    if chain is None:
        net = import_weights(rec)
        z = net.logits(X)
    else:
        h = X.reshape(len(X), -1)
        for k, (W, b, act, slope) in enumerate(chain):
            h = h @ W.T + b
            if k < len(chain) - 1:
                h = activate(h, act, slope)
            elif act not in ("sigmoid", "softmax", "none"):
                h = activate(h, act, slope)
        z = h
    if z.ndim != 2 or z.shape[1] != 1:
        raise UnsupportedNetworkError("Heaviside formula needs a single output logit")
    return z[:, 0]


def heaviside(p) -> np.ndarray:
    """theta(p) = 1 for p >= 0 (the sigmoid midpoint), else 0."""
    return (np.asarray(p) >= 0).astype(int)


def heaviside_genus(rec: WeightRecord, X) -> np.ndarray:
    return heaviside(decision_value(rec, X))


def _spec_line(s: LayerSpec) -> str:
    return (
        f"layer {s.kind} units={s.units} activation={s.activation} slope={s.slope!r} "
        f"kernel={s.kernel} rate={s.rate!r}"
    )


def format_weights(rec: WeightRecord, comment: str = "") -> str:
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    if comment:
        buf.write(comment.rstrip("\n") + "\n")
    buf.write("input " + " ".join(str(v) for v in rec.input_shape) + "\n")
    buf.write(f"layers {len(rec.specs)}\n")
    for s, p in zip(rec.specs, rec.params):
        buf.write(_spec_line(s) + "\n")
        for name, arr in p.items():
            buf.write(f"param {name} " + " ".join(str(v) for v in arr.shape) + "\n")
            rows = arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr.reshape(1, -1)
            for row in rows:
                buf.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def parse_weights(text: str) -> WeightRecord:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != HEADER:
        raise WeightFormatError("missing weights header")
    lines = lines[:1] + [ln for ln in lines[1:] if not ln.startswith("#")]
    pos = 1

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise WeightFormatError("unexpected end of weights file")
        pos += 1
        return lines[pos - 1].split()

    try:
        tok = take()
        if tok[0] != "input":
            raise WeightFormatError(f"line {pos}: expected 'input'")
        input_shape = tuple(int(v) for v in tok[1:])
        tok = take()
        n_layers = int(tok[1])
        specs, params = [], []
        for _ in range(n_layers):
            tok = take()
            if tok[0] != "layer":
                raise WeightFormatError(f"line {pos}: expected 'layer'")
            kw = dict(t.split("=", 1) for t in tok[2:])
            spec = LayerSpec(
                tok[1],
                units=int(kw["units"]),
                activation=kw["activation"],
                slope=float(kw["slope"]),
                kernel=int(kw["kernel"]),
                rate=float(kw["rate"]),
            )
            specs.append(spec)
            p = {}
            n_params = 2 if spec.kind in ("dense", "conv2d") else 0
            for _ in range(n_params):
                tok = take()
                name, shape = tok[1], tuple(int(v) for v in tok[2:])
                n_rows = shape[0] if len(shape) > 1 else 1
                vals = []
                for _ in range(n_rows):
                    vals += [float(v) for v in take()]
                arr = np.array(vals, dtype=float)
                if arr.size != int(np.prod(shape)):
                    raise WeightFormatError(f"line {pos}: {name} has {arr.size} values, expected {int(np.prod(shape))}")
                p[name] = arr.reshape(shape)
            params.append(p)
    except (IndexError, KeyError, ValueError) as exc:
        if isinstance(exc, WeightFormatError):
            raise
        raise WeightFormatError(f"line {pos}: {exc}") from None
    return WeightRecord(input_shape, specs, params)


def dense_record(weights: list[tuple], input_dim: int, activations: list[str], slope: float = 0.1) -> WeightRecord:
    """Record for a hand-specified dense stack; ``weights`` is [(W, b), ...] with W shaped (out, in)."""
    specs, params = [], []
    for (W, b), act in zip(weights, activations):
        W = np.atleast_2d(np.asarray(W, dtype=float))
        specs.append(LayerSpec("dense", units=W.shape[0], activation=act, slope=slope))
        params.append({"W": W, "b": np.asarray(b, dtype=float).reshape(W.shape[0])})
    return WeightRecord((input_dim,), specs, params)
