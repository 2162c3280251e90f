"""Linear readout trained by ridge regression, and the NRMSE score."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError
from .numerics import ridge_solve
from .reservoir import StateTrace

DEFAULT_LAMBDA = 1e-8


@dataclass(frozen=True)
class FeatureSpec:
    append_raw_input: bool = False
    append_bias: bool = True
    use_reservoir_state: bool = True

    def width(self, n_states: int, input_dim: int) -> int:
        return n_states + (input_dim if self.append_raw_input else 0) + int(self.append_bias)


def _as_rows(a, name) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 1-D or 2-D, got shape {a.shape}")
    return a


def build_features(trace: StateTrace, inputs, spec: FeatureSpec) -> np.ndarray:
    states = trace.readout_states
    cols = [states]
    if spec.append_raw_input:
        u = _as_rows(inputs, "inputs")
        if u.shape[0] != states.shape[0]:
            raise DimensionError(f"{states.shape[0]} state rows vs {u.shape[0]} input rows")
        cols.append(u)
    if spec.append_bias:
        cols.append(np.ones((states.shape[0], 1)))
    return np.hstack(cols) if len(cols) > 1 else states


@dataclass(frozen=True)
class Readout:
    w_out: np.ndarray
    spec: FeatureSpec
    lam: float

    def predict(self, trace: StateTrace, inputs=None) -> np.ndarray:
        feats = build_features(trace, inputs, self.spec)
        if feats.shape[1] != self.w_out.shape[1]:
            raise DimensionError(
                f"readout expects {self.w_out.shape[1]} features, got {feats.shape[1]}"
            )
        return feats @ self.w_out.T

    def to_dict(self) -> dict:
        return {
            "w_out": self.w_out.tolist(),
            "spec": {"append_raw_input": self.spec.append_raw_input,
                     "append_bias": self.spec.append_bias},
            "lambda": self.lam,
        }

    @classmethod
    def from_dict(cls, doc) -> "Readout":
        return cls(np.asarray(doc["w_out"], dtype=float), FeatureSpec(**doc["spec"]),
                   float(doc["lambda"]))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def train_readout(trace: StateTrace, inputs, targets, washout: int,
                  spec: FeatureSpec = FeatureSpec(), lam: float = DEFAULT_LAMBDA) -> Readout:
    """Fit W_out on trace rows ``[washout, T)``."""
    y = _as_rows(targets, "targets")
    t = trace.steps
    if y.shape[0] != t:
        raise DimensionError(f"{t} trace rows vs {y.shape[0]} target rows")
    if not 0 <= washout < t:
        raise ValueError(f"washout {washout} must be in [0, {t})")
    feats = build_features(trace, inputs, spec)
    w = ridge_solve(feats[washout:], y[washout:], lam)
    return Readout(w, spec, lam)


def predict_sequence(readout: Readout, trace: StateTrace, inputs=None) -> np.ndarray:
    return readout.predict(trace, inputs)


def nrmse(predicted, target) -> float:
    """Root of squared error over the target's squared deviation from its mean."""
    p = np.ravel(np.asarray(predicted, dtype=float))
    y = np.ravel(np.asarray(target, dtype=float))
    if p.shape != y.shape or y.size < 2:
        raise DimensionError("predicted and target need equal length >= 2")
    spread = y - y.mean()
    denom = float(spread @ spread)
    if denom == 0.0:
        raise DegenerateInputError("target is constant; NRMSE is undefined")
    err = y - p
    return float(np.sqrt((err @ err) / denom))
