"""Multilayer perceptron with a per-layer activation spec.

The output layer uses the identity activation (regression targets are
unbounded).  Forward returns a tape; backward consumes it and writes
gradients into buffers that mirror every parameter array, including the
activation-mix parameters of learnable layers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import activations as act
from .activations import ActivationSpec, Fixed, LinearMix, QuadraticMix
from .linalg import ShapeError
from .rng import Rng


class TapeError(RuntimeError):
    """Backward called with a tape that does not match this network."""


@dataclass
class LayerSpec:
    """Shape and activation of one dense layer; activation None = identity."""

    in_dim: int
    out_dim: int
    activation: ActivationSpec | None = None

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ShapeError(f"layer dims must be >= 1, got {self.in_dim}x{self.out_dim}")


class DenseLayer:
    """W (out x in), b (out,), optional activation, parallel grad buffers."""

    def __init__(self, spec: LayerSpec):
        self.in_dim = spec.in_dim
        self.out_dim = spec.out_dim
        self.activation = spec.activation
        self.W = np.zeros((spec.out_dim, spec.in_dim))
        self.b = np.zeros(spec.out_dim)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self.act_grads: dict[str, np.ndarray] = {}

    def alloc_act_grads(self) -> None:
        if self.activation is None or isinstance(self.activation, Fixed):
            return
        for name, arr in self.activation.param_arrays().items():
            self.act_grads[name] = np.zeros_like(arr)


class Network:
    """Stack of dense layers with chained dimensions."""

    def __init__(self, layer_specs: list[LayerSpec]):
        if not layer_specs:
            raise ShapeError("network needs at least one layer")
        for prev, cur in zip(layer_specs, layer_specs[1:]):
            if prev.out_dim != cur.in_dim:
                raise ShapeError(
                    f"layer dims do not chain: {prev.out_dim} -> {cur.in_dim}"
                )
        self.layers = [DenseLayer(s) for s in layer_specs]

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    def init(self, rng: Rng) -> None:
        """Seeded init: weights/biases uniform on +-1/sqrt(fan_in), then
        any uninitialized activation-mix parameters (normal, fan = |S|).

        Preset mix parameters are kept and consume no draws, so a run
        with preset mixes draws the same weights as a fixed-activation
        run with the same seed.
        """
        for layer in self.layers:
            bound = 1.0 / np.sqrt(layer.in_dim)
            self.fill_uniform(rng, layer.W, bound)
            self.fill_uniform(rng, layer.b, bound)
        for layer in self.layers:
            if layer.activation is not None:
                act.init_params(layer.activation, rng)
            layer.alloc_act_grads()

    @staticmethod
    def fill_uniform(rng: Rng, arr: np.ndarray, bound: float) -> None:
        arr[...] = (rng.uniform(arr.size) * 2.0 - 1.0).reshape(arr.shape) * bound

    # -- forward / backward -------------------------------------------------

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list]:
        """Batch forward pass; returns (yhat, tape) for backward."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeError(f"input shape {x.shape} incompatible with in_dim {self.in_dim}")
        tape = []
        out = x
        for layer in self.layers:
            z = out @ layer.W.T + layer.b
            if layer.activation is None:
                y, cache = z, None
            else:
                y, cache = act.forward(layer.activation, z)
            tape.append((out, cache))
            out = y
        return out, tape

    def backward(self, tape: list, d_out: np.ndarray) -> None:
        """Accumulate gradients of every parameter into the grad buffers.

        For the loss mean((yhat - y)^2) over all entries pass
        d_out = 2 (yhat - y) / yhat.size.
        """
        if len(tape) != len(self.layers):
            raise TapeError(f"tape has {len(tape)} entries for {len(self.layers)} layers")
        d_up = np.asarray(d_out, dtype=np.float64)
        for layer, (x_in, cache) in zip(reversed(self.layers), reversed(tape)):
            if layer.activation is None:
                d_z = d_up
            else:
                d_z, param_grads = act.backward(layer.activation, cache, d_up)
                for name, g in param_grads.items():
                    layer.act_grads[name] += g
            layer.dW += d_z.T @ x_in
            layer.db += d_z.sum(axis=0)
            d_up = d_z @ layer.W
        return None

    def zero_grads(self) -> None:
        for layer in self.layers:
            layer.dW[...] = 0.0
            layer.db[...] = 0.0
            for g in layer.act_grads.values():
                g[...] = 0.0

    # -- parameter access ----------------------------------------------------

    def slots(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        """(name, value, grad) triplets for every parameter tensor."""
        out = []
        for i, layer in enumerate(self.layers):
            out.append((f"layer{i}.W", layer.W, layer.dW))
            out.append((f"layer{i}.b", layer.b, layer.db))
            if layer.activation is not None and not isinstance(layer.activation, Fixed):
                for name, arr in layer.activation.param_arrays().items():
                    out.append((f"layer{i}.{name}", arr, layer.act_grads[name]))
        return out

    def count_parameters(self) -> tuple[int, list[dict]]:
        """Total parameter count and a per-layer breakdown.

        Weights and biases contribute out*(in+1); a linear mix adds |S|
        and a quadratic mix adds |S| + |S|(|S|+1)/2 per layer.
        """
        breakdown = []
        total = 0
        for i, layer in enumerate(self.layers):
            wb = layer.out_dim * (layer.in_dim + 1)
            mix = 0
            if isinstance(layer.activation, LinearMix):
                mix = len(layer.activation.library)
            elif isinstance(layer.activation, QuadraticMix):
                s = len(layer.activation.library)
                mix = s + s * (s + 1) // 2
            breakdown.append({"layer": i, "weights_biases": wb, "activation": mix})
            total += wb + mix
        return total, breakdown

    # -- checkpointing ---------------------------------------------------------

    def to_dict(self, seed: int | None = None) -> dict:
        layers = []
        for layer in self.layers:
            entry = {
                "in_dim": layer.in_dim,
                "out_dim": layer.out_dim,
                "W": layer.W.tolist(),
                "b": layer.b.tolist(),
                "activation": _spec_to_dict(layer.activation),
            }
            layers.append(entry)
        return {"layers": layers, "seed": seed}

    def save(self, path, seed: int | None = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(seed), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, doc: dict) -> "Network":
        specs = []
        for entry in doc["layers"]:
            specs.append(
                LayerSpec(entry["in_dim"], entry["out_dim"], _spec_from_dict(entry["activation"]))
            )
        net = cls(specs)
        for layer, entry in zip(net.layers, doc["layers"]):
            layer.W[...] = np.asarray(entry["W"], dtype=np.float64)
            layer.b[...] = np.asarray(entry["b"], dtype=np.float64)
            layer.alloc_act_grads()
        return net

    @classmethod
    def load(cls, path) -> "Network":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _spec_to_dict(spec: ActivationSpec | None) -> dict | None:
    if spec is None:
        return None
    if isinstance(spec, Fixed):
        return {"kind": "fixed", "base": spec.base}
    if isinstance(spec, LinearMix):
        return {
            "kind": "linear",
            "library": list(spec.library),
            "theta": spec.theta.tolist(),
            "constrained": spec.constrained,
        }
    return {
        "kind": "quadratic",
        "library": list(spec.library),
        "lin": spec.lin.tolist(),
        "quad": spec.quad.tolist(),
        "constrained": spec.constrained,
    }


def _spec_from_dict(doc: dict | None) -> ActivationSpec | None:
    if doc is None:
        return None
    kind = doc["kind"]
    if kind == "fixed":
        return Fixed(doc["base"])
    if kind == "linear":
        return LinearMix(tuple(doc["library"]), np.asarray(doc["theta"]), doc["constrained"])
    if kind == "quadratic":
        return QuadraticMix(
            tuple(doc["library"]),
            np.asarray(doc["lin"]),
            np.asarray(doc["quad"]),
            doc["constrained"],
        )
    raise act.ActivationError(f"unknown activation kind {kind!r}")


def mlp(dims: list[int], hidden_activation, output_activation=None) -> Network:
    """Convenience constructor: dims [in, h1, ..., out] with one spec shared
    structure per hidden layer (each layer gets its own copy).
    """
    if len(dims) < 2:
        raise ShapeError("mlp needs at least input and output dims")
    specs = []
    for i in range(len(dims) - 1):
        last = i == len(dims) - 2
        spec = output_activation if last else _copy_spec(hidden_activation)
        specs.append(LayerSpec(dims[i], dims[i + 1], spec))
    return Network(specs)


def _copy_spec(spec: ActivationSpec | None) -> ActivationSpec | None:
    if spec is None or isinstance(spec, Fixed):
        return spec if spec is None else Fixed(spec.base)
    if isinstance(spec, LinearMix):
        theta = None if spec.theta is None else spec.theta.copy()
        return LinearMix(spec.library, theta, spec.constrained)
    lin = None if spec.lin is None else spec.lin.copy()
    quad = None if spec.quad is None else spec.quad.copy()
    return QuadraticMix(spec.library, lin, quad, spec.constrained)
