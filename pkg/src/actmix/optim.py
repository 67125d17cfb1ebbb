"""Adam optimizer, seeded initializers, and the mini-batch training loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ShapeError
from .network import Network
from .rng import Rng, RngError


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during training."""


def kaiming_normal(rng: Rng, fan_in: int, shape) -> np.ndarray:
    """Normal draws with mean 0 and std sqrt(2/fan_in)."""
    if fan_in < 1:
        raise RngError(f"kaiming_normal requires fan_in >= 1, got {fan_in}")
    return rng.normal(0.0, math.sqrt(2.0 / fan_in), shape)


class Adam:
    """Adam with bias correction over a list of (name, value, grad) slots.

    Frozen slot names are skipped entirely: no state, no updates.
    """

    def __init__(self, slots, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, frozen=()):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        frozen = set(frozen)
        unknown = frozen - {name for name, _, _ in slots}
        if unknown:
            raise ShapeError(f"freeze names not found among parameters: {sorted(unknown)}")
        self.slots = [(n, p, g) for n, p, g in slots if n not in frozen]
        self.m = [np.zeros_like(p) for _, p, _ in self.slots]
        self.v = [np.zeros_like(p) for _, p, _ in self.slots]

    def step(self) -> None:
        """One update from the gradients currently in the grad buffers."""
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for (name, p, g), m, v in zip(self.slots, self.m, self.v):
            if p.shape != g.shape:
                raise ShapeError(f"{name}: param shape {p.shape} != grad shape {g.shape}")
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * np.square(g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class TrainConfig:
    epochs: int
    batch_size: int = 256
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    shuffle: bool = True
    freeze: tuple[str, ...] = ()
    early_stop_patience: int | None = None


@dataclass
class TrainResult:
    train_mse: list[float] = field(default_factory=list)
    val_mse: list[float] | None = None
    epochs_run: int = 0


def mse_loss(yhat: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.square(yhat - y)))


def _dataset_mse(net: Network, X: np.ndarray, y: np.ndarray) -> float:
    yhat, _ = net.forward(X)
    return mse_loss(yhat, y)


def _first_bad_layer(net: Network, x: np.ndarray) -> str:
    out = x
    for i, layer in enumerate(net.layers):
        z = out @ layer.W.T + layer.b
        if not np.all(np.isfinite(z)):
            return f"layer{i} pre-activation"
        if layer.activation is None:
            out = z
        else:
            from . import activations as act

            out, _ = act.forward(layer.activation, z)
        if not np.all(np.isfinite(out)):
            return f"layer{i} activation"
    return "loss"


def train(
    net: Network,
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig,
    rng: Rng,
    val: tuple[np.ndarray, np.ndarray] | None = None,
) -> TrainResult:
    """Mini-batch Adam on mean-squared error over all output entries.

    Shuffles each epoch with the given stream when cfg.shuffle; a trailing
    partial batch is kept.  The recorded per-epoch train MSE is a full
    forward pass after the epoch's updates, so it is deterministic given
    (seed, config, dataset).  With early stopping enabled, training halts
    after `patience` epochs without validation improvement and the best
    parameters are restored.
    """
    if len(X) == 0:
        raise ShapeError("train: empty dataset")
    if len(X) != len(y):
        raise ShapeError(f"train: {len(X)} inputs vs {len(y)} targets")
    adam = Adam(
        net.slots(),
        lr=cfg.lr,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        eps=cfg.eps,
        frozen=cfg.freeze,
    )
    result = TrainResult(val_mse=[] if val is not None else None)
    n = len(X)
    best_val = math.inf
    best_snapshot = None
    stall = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb, yb = X[idx], y[idx]
            yhat, tape = net.forward(xb)
            batch_loss = mse_loss(yhat, yb)
            if not math.isfinite(batch_loss):
                where = _first_bad_layer(net, xb)
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}, step {start // cfg.batch_size}"
                    f" (first non-finite: {where})"
                )
            net.zero_grads()
            net.backward(tape, 2.0 * (yhat - yb) / yhat.size)
            adam.step()
        result.train_mse.append(_dataset_mse(net, X, y))
        result.epochs_run = epoch + 1
        if val is not None:
            vm = _dataset_mse(net, val[0], val[1])
            result.val_mse.append(vm)
            if cfg.early_stop_patience is not None:
                if vm < best_val:
                    best_val = vm
                    best_snapshot = [p.copy() for _, p, _ in net.slots()]
                    stall = 0
                else:
                    stall += 1
                    if stall > cfg.early_stop_patience:
                        break
    if best_snapshot is not None:
        for (_, p, _), saved in zip(net.slots(), best_snapshot):
            p[...] = saved
    return result
