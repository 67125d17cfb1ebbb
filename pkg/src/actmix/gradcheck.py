"""Finite-difference verification of the analytic gradients.

Central differences with a fixed step on the scalar training loss,
compared entry-by-entry against the backward pass.  The error measure is
|analytic - numeric| / max(|analytic|, |numeric|, 1), i.e. relative with
a unit floor so that near-zero gradients are judged on the absolute
scale where float64 differencing noise lives.
"""

from __future__ import annotations

import numpy as np

from .activations import LinearMix, QuadraticMix
from .network import LayerSpec, Network
from .optim import mse_loss
from .rng import Rng

DEFAULT_STEP = 1e-5


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float(np.max(np.abs(analytic - numeric) / denom))


def loss_on(net: Network, X: np.ndarray, y: np.ndarray) -> float:
    yhat, _ = net.forward(X)
    return mse_loss(yhat, y)


def network_gradcheck(net: Network, X: np.ndarray, y: np.ndarray, step: float = DEFAULT_STEP) -> float:
    """Max relative error over every parameter entry of every tensor."""
    yhat, tape = net.forward(X)
    net.zero_grads()
    net.backward(tape, 2.0 * (yhat - y) / yhat.size)
    worst = 0.0
    for _, param, grad in net.slots():
        analytic = grad.copy()
        numeric = np.zeros_like(param)
        flat_p = param.reshape(-1)
        flat_n = numeric.reshape(-1)
        for i in range(flat_p.size):
            keep = flat_p[i]
            flat_p[i] = keep + step
            up = loss_on(net, X, y)
            flat_p[i] = keep - step
            down = loss_on(net, X, y)
            flat_p[i] = keep
            flat_n[i] = (up - down) / (2.0 * step)
        worst = max(worst, relative_error(analytic, numeric))
    return worst


def standard_mixed_net(library=("relu", "gelu", "tanh", "sigmoid"), seed: int = 13) -> Network:
    """The 2-20-20-1 regression net with one linear-mix and one
    quadratic-mix hidden layer, seeded."""
    net = Network(
        [
            LayerSpec(2, 20, LinearMix(library, constrained=True)),
            LayerSpec(20, 20, QuadraticMix(library, constrained=False)),
            LayerSpec(20, 1, None),
        ]
    )
    net.init(Rng(seed))
    return net


def run_standard_check(settings: int = 20, batch: int = 8, step: float = DEFAULT_STEP) -> float:
    """Max relative error across `settings` random parameter settings."""
    worst = 0.0
    for s in range(settings):
        net = standard_mixed_net(seed=1000 + s)
        data_rng = Rng(2000 + s)
        X = data_rng.normal(0.0, 1.0, (batch, 2))
        y = data_rng.normal(0.0, 1.0, (batch, 1))
        worst = max(worst, network_gradcheck(net, X, y, step))
    return worst
