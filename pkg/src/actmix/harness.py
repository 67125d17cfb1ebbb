"""Experiment orchestration: synthetic benchmarks, forecasting, sweeps.

Every runner takes a resolved config (see config.parse_config), writes
its artifacts under the config's output directory, and returns the
report dict it wrote.  Reports embed the resolved config, so any number
in any output can be traced back to the run that produced it.  Repeated
runs of the same config produce byte-identical reports apart from the
wall-clock field.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import pentagon as pent
from .benchmarks import get_function, make_dataset
from .config import ConfigError, build_activation
from .linalg import Matrix, ShapeError
from .network import LayerSpec, Network
from .optim import TrainConfig, train
from .rng import Rng
from .sampling import HaltonSampler, grid2d
from .timeseries import (
    SplitPolicy,
    load_csv,
    normalize,
    split_chronological,
    window,
)


def metrics(yhat: Matrix, y: Matrix) -> tuple[float, float]:
    """(MSE, MAE): means of squared / absolute residuals over all entries."""
    if yhat.shape != y.shape:
        raise ShapeError(f"metrics: shapes differ, {yhat.shape} vs {y.shape}")
    resid = yhat - y
    return float(np.mean(np.square(resid))), float(np.mean(np.abs(resid)))


def build_network(cfg: dict, in_dim: int, out_dim: int) -> Network:
    """Instantiate the MLP described by a resolved config."""
    hidden = cfg["network"]["hidden"]
    activation = cfg["network"]["activation"]
    act_docs = activation if isinstance(activation, list) else [activation] * len(hidden)
    dims = [in_dim, *hidden, out_dim]
    specs = []
    for i in range(len(dims) - 1):
        if i < len(hidden):
            spec = build_activation(act_docs[i], cfg["library"])
        else:
            spec = None
        specs.append(LayerSpec(dims[i], dims[i + 1], spec))
    return Network(specs)


def _train_config(cfg: dict, freeze=()) -> TrainConfig:
    opt = cfg["optimizer"]
    return TrainConfig(
        epochs=opt["epochs"],
        batch_size=opt["batch_size"],
        lr=opt["lr"],
        shuffle=opt["shuffle"],
        freeze=tuple(freeze),
        early_stop_patience=opt["early_stop_patience"],
    )


def _write_report(outdir: str, report: dict) -> None:
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_loss_csv(outdir: str, train_mse, val_mse=None) -> None:
    with open(os.path.join(outdir, "loss.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        if val_mse is None:
            writer.writerow(["epoch", "train_mse"])
            for i, m in enumerate(train_mse):
                writer.writerow([i, repr(m)])
        else:
            writer.writerow(["epoch", "train_mse", "val_mse"])
            for i, (m, v) in enumerate(zip(train_mse, val_mse)):
                writer.writerow([i, repr(m), repr(v)])


def run_synthetic(cfg: dict) -> dict:
    """Train on a quasi-random sample of a test function, evaluate held out.

    Training points are Halton indices 1..n_train; the evaluation set is
    the fixed window starting at index eval_start (default 15001), so
    runs at different training sizes share the same held-out points.
    For 2-D targets the learned surface is exported on a regular grid.
    """
    t0 = time.perf_counter()
    data_cfg = cfg["data"]
    dim = data_cfg["dim"]
    fn = get_function(cfg["target"], dim=dim, domain=data_cfg["domain"])
    sampler = HaltonSampler(dim)
    X_train, y_train = make_dataset(fn, sampler, data_cfg["train_points"])
    sampler.skip(data_cfg["eval_start"] - sampler.index)
    X_eval, y_eval = make_dataset(fn, sampler, data_cfg["eval_points"])

    net = build_network(cfg, in_dim=dim, out_dim=1)
    rng = Rng(cfg["seed"])
    net.init(rng)
    result = train(net, X_train, y_train, _train_config(cfg), rng)

    yhat, _ = net.forward(X_eval)
    mse, mae = metrics(yhat, y_eval)
    total, breakdown = net.count_parameters()

    outdir = cfg["output"]
    os.makedirs(outdir, exist_ok=True)
    report = {
        "kind": "synthetic",
        "config": cfg,
        "train_mse": result.train_mse,
        "eval_mse": mse,
        "eval_mae": mae,
        "parameter_count": total,
        "parameter_breakdown": breakdown,
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    _write_report(outdir, report)
    _write_loss_csv(outdir, result.train_mse)
    net.save(os.path.join(outdir, "checkpoint.json"), seed=cfg["seed"])
    if dim == 2:
        export_surface(net, fn, os.path.join(outdir, "surface.csv"),
                       data_cfg["surface_resolution"])
    return report


def export_surface(net: Network, fn, path, resolution: int = 101) -> None:
    """True vs predicted values on a regular grid over the 2-D domain."""
    grid = grid2d(fn.lo, fn.hi, resolution)
    f_true = fn.eval_batch(grid)
    f_pred, _ = net.forward(grid)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "f_true", "f_pred"])
        for (x1, x2), t, p in zip(grid, f_true, f_pred[:, 0]):
            writer.writerow([repr(float(x1)), repr(float(x2)), repr(float(t)), repr(float(p))])


def run_forecast(cfg: dict) -> dict:
    """History-to-horizon forecasting on a local CSV series.

    Chronological split, train-split normalization, sliding windows,
    then one MLP mapping flattened history to flattened horizon.  Test
    MSE/MAE are in normalized units.
    """
    t0 = time.perf_counter()
    fcfg = cfg["forecast"]
    columns = None if fcfg["columns"] == "ett" else fcfg["columns"]
    series = load_csv(cfg["target"], columns)
    policy = SplitPolicy(**fcfg["split"])
    train_s, val_s, test_s = split_chronological(series, policy)
    train_n, val_n, test_n, stats = normalize(train_s, val_s, test_s, fcfg["normalization"])

    history, horizon = fcfg["history"], fcfg["horizon"]
    w_train = window(train_n, history, horizon)
    w_test = window(test_n, history, horizon)
    n_feat = w_train.n_features
    val_pair = None
    w_val = None
    if len(val_n) >= history + horizon:
        w_val = window(val_n, history, horizon)
        val_pair = (w_val.X, w_val.Y)

    net = build_network(cfg, in_dim=history * n_feat, out_dim=horizon * n_feat)
    rng = Rng(cfg["seed"])
    net.init(rng)
    result = train(net, w_train.X, w_train.Y, _train_config(cfg), rng, val=val_pair)

    yhat, _ = net.forward(w_test.X)
    mse, mae = metrics(yhat, w_test.Y)
    total, breakdown = net.count_parameters()

    outdir = cfg["output"]
    os.makedirs(outdir, exist_ok=True)
    report = {
        "kind": "forecast",
        "config": cfg,
        "train_mse": result.train_mse,
        "val_mse": result.val_mse,
        "eval_mse": mse,
        "eval_mae": mae,
        "window_counts": {
            "train": len(w_train.X),
            "val": 0 if w_val is None else len(w_val.X),
            "test": len(w_test.X),
        },
        "normalization": {
            "method": stats.method,
            "offset": stats.offset.tolist(),
            "scale": stats.scale.tolist(),
        },
        "parameter_count": total,
        "parameter_breakdown": breakdown,
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    _write_report(outdir, report)
    _write_loss_csv(outdir, result.train_mse, result.val_mse)
    net.save(os.path.join(outdir, "checkpoint.json"), seed=cfg["seed"])
    _write_predictions(outdir, w_test, yhat, series.columns)
    return report


def _write_predictions(outdir, windowed, yhat, columns) -> None:
    """First test window, every horizon step and feature."""
    with open(os.path.join(outdir, "predictions.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_index", "step", "feature", "actual", "predicted"])
        f = windowed.n_features
        actual = windowed.Y[0].reshape(windowed.horizon, f)
        pred = yhat[0].reshape(windowed.horizon, f)
        for step in range(windowed.horizon):
            for j, name in enumerate(columns):
                writer.writerow(
                    [0, step, name, repr(float(actual[step, j])), repr(float(pred[step, j]))]
                )


def _pentagon_point(args):
    cfg, fn, X, y, index, lam = args
    net = build_network(cfg, in_dim=fn.dim, out_dim=1)
    freeze = []
    for i, layer in enumerate(net.layers):
        if layer.activation is not None and hasattr(layer.activation, "theta"):
            layer.activation.theta = lam.copy()
            layer.activation.constrained = False
            freeze.append(f"layer{i}.theta")
    rng = Rng(cfg["seed"] + index)
    net.init(rng)
    result = train(net, X, y, _train_config(cfg, freeze=freeze), rng)
    return result.train_mse[-1] if result.train_mse else float("nan")


def run_pentagon(cfg: dict, threads: int = 1) -> dict:
    """Loss landscape over fixed mixing weights drawn from a pentagon.

    Each sweep point fixes both hidden layers' mix weights to the
    point's barycentric coordinates (frozen during training), trains the
    remaining parameters from a per-point seed (base seed + index), and
    records the final train MSE.  The five vertices and the centroid are
    always included; vertex points are exact one-hot mixes.
    """
    t0 = time.perf_counter()
    if len(cfg["library"]) != 5:
        raise ConfigError(f"pentagon sweep needs |library| == 5, got {len(cfg['library'])}")
    data_cfg = cfg["data"]
    fn = get_function(cfg["target"], dim=data_cfg["dim"], domain=data_cfg["domain"])
    sampler = HaltonSampler(fn.dim)
    X, y = make_dataset(fn, sampler, data_cfg["train_points"])

    verts = pent.regular_pentagon()
    points = pent.sweep_points(cfg["pentagon"]["resolution"])
    lambdas = [pent.barycentric(p, verts) for p in points]
    jobs = [(cfg, fn, X, y, i, lam) for i, (lam, _) in enumerate(zip(lambdas, points))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mses = list(pool.map(_pentagon_point, jobs))
    else:
        mses = [_pentagon_point(j) for j in jobs]

    outdir = cfg["output"]
    os.makedirs(outdir, exist_ok=True)
    lib = cfg["library"]
    with open(os.path.join(outdir, "pentagon.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", *[f"lambda_{t}" for t in lib], "mse"])
        for p, lam, mse in zip(points, lambdas, mses):
            writer.writerow(
                [repr(float(p[0])), repr(float(p[1])), *[repr(float(v)) for v in lam], repr(mse)]
            )
    report = {
        "kind": "pentagon",
        "config": cfg,
        "n_points": len(points),
        "mse_min": min(mses),
        "mse_max": max(mses),
        "vertex_mse": mses[:5],
        "centroid_mse": mses[5],
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    _write_report(outdir, report)
    return report


def run(cfg: dict, threads: int = 1) -> dict:
    """Dispatch a resolved config to its runner."""
    kind = cfg["kind"]
    if kind == "synthetic":
        return run_synthetic(cfg)
    if kind == "forecast":
        return run_forecast(cfg)
    if kind == "pentagon":
        return run_pentagon(cfg, threads=threads)
    raise ConfigError(f"unknown experiment kind {kind!r}")
