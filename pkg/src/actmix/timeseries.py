"""Timestamped CSV ingestion, chronological splits, normalization, windows.

The canonical input is the electricity-transformer CSV layout: a `date`
column followed by seven named load/temperature features, uniformly
spaced (hourly or 15-minute).  The pipeline also accepts any
`date,f1,...,fk` layout so synthetic series run through the same code.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .linalg import Matrix
from .rng import Rng

ETT_COLUMNS = ("HUFL", "HULL", "MUFL", "MULL", "LUFL", "LULL", "OT")


class SchemaError(ValueError):
    """CSV header does not match the expected layout."""


class DataError(ValueError):
    """Data contents violate an ingestion or windowing precondition."""


@dataclass
class RawSeries:
    """Uniformly spaced multivariate series with named feature columns."""

    timestamps: list[datetime]
    values: Matrix  # (T x F)
    columns: tuple[str, ...]
    rejected_rows: int = 0

    def __len__(self) -> int:
        return len(self.timestamps)

    def slice(self, start: int, stop: int) -> "RawSeries":
        return RawSeries(
            self.timestamps[start:stop], self.values[start:stop], self.columns, 0
        )


def _parse_timestamp(text: str) -> datetime:
    return datetime.fromisoformat(text.strip())


def load_csv(path, columns: tuple[str, ...] | str | None = None) -> RawSeries:
    """Parse a `date,<features>` CSV into a RawSeries.

    columns=None expects the canonical 7-feature layout; feature columns
    are mapped by name, so a shuffled header parses to the same series.
    columns="auto" takes every column after `date` in header order.
    Rows with unparseable cells are dropped and counted.  Timestamps must
    be strictly increasing and uniformly spaced.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "date":
            raise SchemaError(f"{path}: first column must be 'date', got {header[:1]}")
        if columns == "auto":
            if len(header) < 2:
                raise SchemaError(f"{path}: no feature columns after 'date'")
            wanted = tuple(header[1:])
        else:
            wanted = ETT_COLUMNS if columns is None else tuple(columns)
        missing = [c for c in wanted if c not in header[1:]]
        if missing:
            raise SchemaError(f"{path}: missing feature column(s) {missing}")
        order = [header.index(c) for c in wanted]

        timestamps: list[datetime] = []
        rows: list[list[float]] = []
        rejected = 0
        for raw in reader:
            if not raw:
                continue
            try:
                ts = _parse_timestamp(raw[0])
                vals = [float(raw[k]) for k in order]
            except (ValueError, IndexError):
                rejected += 1
                continue
            timestamps.append(ts)
            rows.append(vals)

    if not timestamps:
        raise DataError(f"{path}: no parseable data rows (rejected {rejected})")
    values = np.array(rows, dtype=np.float64)
    _check_uniform(timestamps, path)
    return RawSeries(timestamps, values, wanted, rejected)


def _check_uniform(timestamps: list[datetime], origin) -> None:
    if len(timestamps) < 2:
        return
    step = timestamps[1] - timestamps[0]
    if step.total_seconds() <= 0:
        raise DataError(f"{origin}: timestamps not strictly increasing at row 1")
    for i in range(1, len(timestamps)):
        d = timestamps[i] - timestamps[i - 1]
        if d.total_seconds() <= 0:
            raise DataError(f"{origin}: timestamps not strictly increasing at row {i}")
        if d != step:
            raise DataError(
                f"{origin}: non-uniform spacing at row {i} ({d} vs {step})"
            )


def save_csv(series: RawSeries, path) -> None:
    """Write a RawSeries back to the canonical CSV layout (round-trips)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *series.columns])
        for ts, row in zip(series.timestamps, series.values):
            writer.writerow([ts.isoformat(sep=" "), *[repr(float(v)) for v in row]])


@dataclass(frozen=True)
class SplitPolicy:
    """Contiguous chronological split measured in uniform 'months'.

    A month is total_rows / total_months rows; the series is assumed to
    span exactly the policy's total.  Defaults mirror a 24-month series
    split 16 / 4 / 4.
    """

    train_months: int = 16
    val_months: int = 4
    test_months: int = 4

    @property
    def total_months(self) -> int:
        return self.train_months + self.val_months + self.test_months


def split_chronological(
    series: RawSeries, policy: SplitPolicy = SplitPolicy()
) -> tuple[RawSeries, RawSeries, RawSeries]:
    """Slice into contiguous (train, val, test) row ranges."""
    t = len(series)
    if t < policy.total_months:
        raise DataError(
            f"series of {t} rows cannot span {policy.total_months} months"
        )
    b1 = t * policy.train_months // policy.total_months
    b2 = t * (policy.train_months + policy.val_months) // policy.total_months
    return series.slice(0, b1), series.slice(b1, b2), series.slice(b2, t)


@dataclass
class NormStats:
    """Per-feature affine normalization, fit on the train split only.

    apply(x) = (x - offset) / scale.  For z-score the offset/scale are
    mean/std; for min-max they are min/range.  Scales are floored at
    1e-8 so constant features map to zero instead of blowing up.
    """

    offset: np.ndarray
    scale: np.ndarray
    method: str = "zscore"

    def apply(self, values: Matrix) -> Matrix:
        return (values - self.offset) / self.scale

    def invert(self, values: Matrix) -> Matrix:
        return values * self.scale + self.offset


def normalize(
    train: RawSeries, val: RawSeries, test: RawSeries, method: str = "zscore"
) -> tuple[RawSeries, RawSeries, RawSeries, NormStats]:
    """Normalize all three splits using train-split statistics."""
    if len(train) == 0:
        raise DataError("normalize: empty train split")
    if method == "zscore":
        offset = train.values.mean(axis=0)
        scale = train.values.std(axis=0)
    elif method == "minmax":
        offset = train.values.min(axis=0)
        scale = train.values.max(axis=0) - offset
    else:
        raise DataError(f"unknown normalization method {method!r}")
    stats = NormStats(offset, np.maximum(scale, 1e-8), method)

    def scaled(s: RawSeries) -> RawSeries:
        return RawSeries(s.timestamps, stats.apply(s.values), s.columns, 0)

    return scaled(train), scaled(val), scaled(test), stats


@dataclass
class WindowedSeries:
    """Supervised (history -> horizon) pairs from one contiguous split.

    X rows are history windows flattened timestep-major (all features of
    step 0, then step 1, ...); Y rows are horizon windows in the same
    layout.
    """

    X: Matrix  # (N, history * F)
    Y: Matrix  # (N, horizon * F)
    history: int
    horizon: int
    n_features: int


def window(split: RawSeries, history: int = 512, horizon: int = 96) -> WindowedSeries:
    """All in-split sliding windows, ordered by start index."""
    t, f = split.values.shape
    need = history + horizon
    if t < need:
        raise DataError(f"split of {t} rows is shorter than history+horizon={need}")
    n = t - need + 1
    idx = np.arange(history)[None, :] + np.arange(n)[:, None]
    hx = split.values[idx]  # (N, history, F)
    hy = split.values[idx[:, -1][:, None] + 1 + np.arange(horizon)[None, :]]
    return WindowedSeries(
        hx.reshape(n, history * f),
        hy.reshape(n, horizon * f),
        history,
        horizon,
        f,
    )


def make_periodic_series(
    n_rows: int,
    n_features: int,
    periods: tuple[float, float],
    noise_frac: float,
    seed: int,
    start: str = "2020-01-01 00:00:00",
) -> RawSeries:
    """Synthetic series: sum of two sines per feature plus Gaussian noise.

    Feature f gets distinct phases for both components; noise std is
    noise_frac times the clean-signal std (which is 1 for a two-sine sum
    of unit amplitudes).
    """
    from datetime import timedelta

    rng = Rng(seed)
    t = np.arange(n_rows, dtype=np.float64)
    cols = []
    for f in range(n_features):
        p1 = 2.0 * np.pi * f / n_features
        p2 = 2.0 * np.pi * (f + 0.37) / n_features
        clean = np.sin(2.0 * np.pi * t / periods[0] + p1) + np.sin(
            2.0 * np.pi * t / periods[1] + p2
        )
        cols.append(clean)
    values = np.column_stack(cols)
    values += rng.normal(0.0, noise_frac, values.shape)
    t0 = datetime.fromisoformat(start)
    stamps = [t0 + timedelta(hours=i) for i in range(n_rows)]
    names = tuple(f"F{f}" for f in range(n_features))
    return RawSeries(stamps, values, names, 0)
