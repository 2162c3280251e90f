"""Benchmark signals and their washout/train/validation/test splits."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateInputError, InsufficientDataError
from .numerics import SeededRng, derive_seed

MSO_FREQUENCIES = (0.2, 0.331, 0.42, 0.51, 0.63, 0.74, 0.85, 0.97, 1.08, 1.19, 1.27, 1.32)

NARMA_SETTLE = 200
NARMA_BOUND = 1.0
MG_TRANSIENT = 1000.0
TRANSIENT = 100


@dataclass
class TimeSeries:
    values: np.ndarray
    name: str = ""
    dt: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("a time series needs at least one sample")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"series {self.name!r} has non-finite values")

    def __len__(self):
        return self.values.size


def narma10_recursion(u) -> np.ndarray:
    """y(0..n) of the NARMA10 map driven by ``u``; history before t = 0 is zero."""
    n = len(u)
    y = np.zeros(n + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(n):
            window = y[max(0, t - 9): t + 1].sum()
            lagged = u[t - 9] if t >= 9 else 0.0
            y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * window + 1.5 * lagged * u[t] + 0.1
    return y


def gen_narma10(length: int, seed: int, settle: int = NARMA_SETTLE, inputs=None,
                bound: float = NARMA_BOUND, max_redraws: int = 100):
    """NARMA10 input/target pair.

    ``target[t]`` is y(t+1), the quantity predicted from the state at t.
    Out-of-range history is zero and the first ``settle`` steps are dropped.

    The map is unstable for some input draws (y escapes and blows up). A draw
    whose trajectory reaches ``|y| >= bound`` is discarded and the input is
    redrawn from ``derive_seed(seed, "narma10", attempt)``. Pass ``inputs``
    (length ``settle + length``) to override the random drive; no redraw is
    attempted then.
    """
    if length < 11:
        raise ValueError("NARMA10 needs length >= 11")
    n = settle + length
    if inputs is not None:
        u = np.asarray(inputs, dtype=float)
        if u.shape != (n,):
            raise ValueError(f"inputs must have shape ({n},)")
        y = narma10_recursion(u)
    else:
        for attempt in range(max_redraws + 1):
            stream = seed if attempt == 0 else derive_seed(seed, "narma10", attempt)
            u = SeededRng(stream).uniform(0.0, 0.5, n)
            y = narma10_recursion(u)
            if np.all(np.abs(y) < bound):
                break
        else:
            raise DataError(f"NARMA10 stayed unstable after {max_redraws} redraws")
    return (TimeSeries(u[settle:], "narma10_u"),
            TimeSeries(y[settle + 1: n + 1], "narma10_y"))


def _mackey_glass_rhs(y, y_delayed):
    return 0.2 * y_delayed / (1.0 + y_delayed ** 10) - 0.1 * y


def integrate_mackey_glass(history, n_steps: int, tau: float = 17.0, dt: float = 0.1):
    """Fixed-step RK4 on the Mackey-Glass delay equation.

    ``history`` holds y on the grid ``-tau, -tau+dt, ..., 0`` (its last entry
    is y(0)). Delayed values off the grid are linearly interpolated. Returns
    y at ``0, dt, ..., n_steps*dt``.
    """
    lag = tau / dt
    hist = np.asarray(history, dtype=float)
    n_hist = hist.size
    need = int(math.ceil(lag)) + 1
    if n_hist < need:
        raise ValueError(f"history needs at least {need} grid points, got {n_hist}")
    buf = np.empty(n_hist + n_steps)
    buf[:n_hist] = hist
    zero = n_hist - 1  # buffer index of t = 0

    def delayed(pos):
        # pos: fractional grid position of t - tau relative to t = 0
        idx = zero + pos
        lo = int(math.floor(idx))
        frac = idx - lo
        if frac == 0.0:
            return buf[lo]
        return buf[lo] + frac * (buf[lo + 1] - buf[lo])

    y = buf[zero]
    for k in range(n_steps):
        d0 = delayed(k - lag)
        dh = delayed(k + 0.5 - lag)
        d1 = delayed(k + 1 - lag)
        k1 = _mackey_glass_rhs(y, d0)
        k2 = _mackey_glass_rhs(y + 0.5 * dt * k1, dh)
        k3 = _mackey_glass_rhs(y + 0.5 * dt * k2, dh)
        k4 = _mackey_glass_rhs(y + dt * k3, d1)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        buf[zero + k + 1] = y
    return buf[zero:].copy()


def gen_mackey_glass(length: int, tau: float = 17.0, dt: float = 0.1, subsample: int = 10,
                     seed: int = 0, transient: float = MG_TRANSIENT,
                     history_value: float = 1.2, noise: float = 1e-4) -> TimeSeries:
    """Mackey-Glass series sampled once per ``subsample * dt`` time units."""
    if dt <= 0 or tau <= 0:
        raise ValueError("dt and tau must be positive")
    if subsample < 1 or length < 1:
        raise ValueError("subsample and length must be >= 1")
    n_hist = int(math.ceil(tau / dt)) + 1
    history = np.full(n_hist, float(history_value))
    if noise:
        history = history + noise * SeededRng(seed).uniform(-1.0, 1.0, n_hist)
    skip = int(round(transient / dt))
    traj = integrate_mackey_glass(history, skip + length * subsample, tau, dt)
    return TimeSeries(traj[skip:skip + length * subsample:subsample], "mackey_glass",
                      dt * subsample)


def gen_mso12(length: int, phases=MSO_FREQUENCIES, start: int = 0) -> TimeSeries:
    """Sum of twelve sines evaluated at integer t = start .. start+length-1."""
    if length < 1:
        raise ValueError("length must be >= 1")
    t = np.arange(start, start + length, dtype=float)
    values = np.zeros(length)
    for phi in phases:
        values += np.sin(phi * t)
    return TimeSeries(values, "mso12")


def load_santa_fe(path, min_length: int = 0) -> TimeSeries:
    """Read one sample per line (blank lines skipped), min-max normalised to [0, 1]."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Santa Fe data file not found: {path}")
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DataError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not values:
        raise InsufficientDataError(f"{path}: no samples", shortfall=max(min_length, 1))
    if len(values) < min_length:
        raise InsufficientDataError(
            f"{path}: {len(values)} samples, {min_length} required",
            shortfall=min_length - len(values),
        )
    v = np.asarray(values)
    lo, hi = v.min(), v.max()
    if hi == lo:
        raise DegenerateInputError(f"{path}: constant series cannot be normalised")
    return TimeSeries((v - lo) / (hi - lo), "santa_fe")


@dataclass
class DatasetSplit:
    """Aligned input/target rows with contiguous segment boundaries.

    Row ``t`` pairs ``inputs[t]`` with ``targets[t]``. Training uses rows
    ``[washout, washout + train)`` after a reset at row 0. Validation and test
    are each scored after a fresh reset ``transient`` rows before the segment.
    """

    inputs: np.ndarray
    targets: np.ndarray
    washout: int
    train: int
    validation: int
    test: int
    horizon: int
    transient: int = TRANSIENT
    name: str = ""
    append_raw_input: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def train_range(self):
        return self.washout, self.washout + self.train

    @property
    def validation_range(self):
        a = self.washout + self.train
        return a, a + self.validation

    @property
    def test_range(self):
        a = self.washout + self.train + self.validation
        return a, a + self.test

    def segment(self, which: str):
        return {"train": self.train_range, "validation": self.validation_range,
                "test": self.test_range}[which]


def split_dataset(inputs, targets, lengths, horizon: int, shift: int | None = None,
                  transient: int = TRANSIENT, name: str = "") -> DatasetSplit:
    """Cut aligned segments washout -> train -> validation -> test.

    ``targets[t]`` of the split is ``target_series[t + shift]``; ``shift``
    defaults to ``horizon``. Generators that already emit the look-ahead
    target (NARMA10) pass ``shift=0``.
    """
    u = inputs.values if isinstance(inputs, TimeSeries) else np.asarray(inputs, dtype=float)
    y = targets.values if isinstance(targets, TimeSeries) else np.asarray(targets, dtype=float)
    washout, train, val, test = (int(x) for x in lengths)
    if min(washout, train, val, test) < 0 or horizon < 0:
        raise ValueError("segment lengths and horizon must be non-negative")
    if train < 1 or val < 2 or test < 2:
        raise ValueError("need train >= 1, validation >= 2 and test >= 2 rows")
    shift = horizon if shift is None else int(shift)
    total = washout + train + val + test
    have = min(u.shape[0], y.shape[0] - shift)
    if have < total:
        raise InsufficientDataError(
            f"split needs {total + shift} samples ({washout}+{train}+{val}+{test} rows "
            f"plus {shift} look-ahead), series provides {min(u.shape[0] + shift, y.shape[0])}; "
            f"short by {total - have}",
            shortfall=total - have,
        )
    if transient > washout + train:
        raise ValueError("transient before validation would reach before row 0")
    return DatasetSplit(u[:total].copy(), y[shift:shift + total].copy(), washout, train, val,
                        test, horizon, transient, name)


TASK_DEFAULTS = {
    "narma10": {"lengths": (100, 3000, 100, 1000), "horizon": 1, "append_raw_input": True},
    "santa_fe": {"lengths": (100, 3000, 1000, 1000), "horizon": 1, "append_raw_input": False},
    "mackey_glass": {"lengths": (100, 1000, 1000, 1000), "horizon": 84,
                     "append_raw_input": False},
    "mso12": {"lengths": (100, 3000, 1000, 1000), "horizon": 1, "append_raw_input": False},
}


def make_task(name: str, seed: int = 0, data_path=None, lengths=None,
              horizon: int | None = None) -> DatasetSplit:
    """Generate (or load) a benchmark and split it with its default protocol."""
    if name not in TASK_DEFAULTS:
        raise ValueError(f"unknown task {name!r}; choose from {sorted(TASK_DEFAULTS)}")
    d = TASK_DEFAULTS[name]
    lengths = tuple(lengths or d["lengths"])
    horizon = d["horizon"] if horizon is None else horizon
    total = sum(lengths)
    if name == "narma10":
        u, y = gen_narma10(total, seed)
        split = split_dataset(u, y, lengths, horizon, shift=0, name=name)
    elif name == "mackey_glass":
        s = gen_mackey_glass(total + horizon, seed=seed)
        split = split_dataset(s, s, lengths, horizon, name=name)
    elif name == "mso12":
        s = gen_mso12(total + horizon)
        split = split_dataset(s, s, lengths, horizon, name=name)
    else:
        if data_path is None:
            raise DataError("santa_fe needs a data_path to the laser intensity file")
        s = load_santa_fe(data_path, min_length=total + horizon)
        split = split_dataset(s, s, lengths, horizon, name=name)
    split.append_raw_input = d["append_raw_input"]
    return split


def write_csv(path, columns: dict):
    """Write equal-length columns with a header row."""
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def export_series_csv(path, series: TimeSeries):
    write_csv(path, {"t": np.arange(len(series)), "value": series.values})
