"""Reservoir-quality probes: node-state distribution, per-sub-reservoir
spectra under MSO12 drive, and linear memory capacity."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError
from .numerics import SeededRng, fft_magnitude, ridge_solve, squared_correlation
from .readout import DEFAULT_LAMBDA
from .reservoir import ReservoirNetwork
from .tasks import MSO_FREQUENCIES, gen_mso12

SPECTRUM_WASHOUT = 100
PEAK_WINDOW = 2


@dataclass
class StateDistribution:
    """Per sub-reservoir, an (n_nodes, 2) array of (mean, std) sorted by mean."""

    subs: list

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sub_reservoir", "node_rank", "mean", "std"])
            for l, stats in enumerate(self.subs, 1):
                for rank, (m, s) in enumerate(stats):
                    w.writerow([l, rank, repr(float(m)), repr(float(s))])


def node_state_distribution(net: ReservoirNetwork, inputs, washout: int = 100
                            ) -> StateDistribution:
    """Run ``inputs`` from a zero state and summarise each node after ``washout``."""
    trace = net.run(inputs, reset=True)
    if trace.steps - washout < 1:
        raise ValueError("no steps left after washout")
    states = trace.states[washout:]
    subs = []
    for a, b in trace.boundaries:
        block = states[:, a:b]
        stats = np.column_stack([block.mean(axis=0), block.std(axis=0)])
        subs.append(stats[np.argsort(stats[:, 0], kind="stable")])
    return StateDistribution(subs)


@dataclass
class SpectrumProfile:
    spectra: list          # averaged magnitude spectrum per sub-reservoir
    peaks: np.ndarray      # (n_subs, 12) raw peak magnitudes
    normalized: np.ndarray  # (n_subs, 12), each row divided by its minimum
    bins: list             # expected FFT bin of each MSO component
    fft_len: int

    def to_csv(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "spectrum.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sub_reservoir", "bin", "magnitude"])
            for l, spec in enumerate(self.spectra, 1):
                for k, v in enumerate(spec):
                    w.writerow([l, k, repr(float(v))])
        with open(os.path.join(out_dir, "peaks.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sub_reservoir", "component_index", "phi", "normalized_peak"])
            for l, row in enumerate(self.normalized, 1):
                for i, v in enumerate(row):
                    w.writerow([l, i + 1, MSO_FREQUENCIES[i], repr(float(v))])


def expected_bin(phi: float, fft_len: int) -> int:
    return int(round(fft_len * phi / (2 * np.pi)))


def find_peaks(spectrum, fft_len: int, phases=MSO_FREQUENCIES, window: int = PEAK_WINDOW):
    """Max magnitude within +-window bins of each component's expected bin."""
    spectrum = np.asarray(spectrum)
    out = []
    for phi in phases:
        c = expected_bin(phi, fft_len)
        lo, hi = max(0, c - window), min(spectrum.size, c + window + 1)
        out.append(spectrum[lo:hi].max())
    return np.array(out)


def spectrum_of_states(states, boundaries, fft_len: int, window: str = "rect") -> list:
    """Average per-node magnitude spectra within each sub-reservoir.

    ``window`` is ``"rect"`` (no taper) or ``"hann"``.
    """
    if window == "hann":
        states = states * np.hanning(states.shape[0])[:, None]
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}")
    out = []
    for a, b in boundaries:
        mags = [fft_magnitude(states[:, j], fft_len) for j in range(a, b)]
        out.append(np.mean(mags, axis=0))
    return out


def sub_reservoir_spectrum(net: ReservoirNetwork, mso_length: int = 4196, fft_len: int = 4096,
                           washout: int = SPECTRUM_WASHOUT, mso_start: int = 0,
                           window: str = "rect") -> SpectrumProfile:
    """Drive ``net`` with MSO12 and measure which components each sub-reservoir keeps.

    Peak ratios from the default rectangular window shift by a few percent
    with the drive's phase because of leakage between neighbouring
    components; ``window="hann"`` suppresses that.
    """
    if fft_len < 1 or fft_len & (fft_len - 1):
        raise ValueError(f"fft_len must be a power of two, got {fft_len}")
    if mso_length < fft_len + washout:
        raise ValueError("mso_length must cover fft_len plus the washout")
    if net.topology.input_dim != 1:
        raise DimensionError("MSO12 drive is scalar; network input_dim must be 1")
    drive = gen_mso12(mso_length, start=mso_start).values
    trace = net.run(drive, reset=True)
    states = trace.states[washout:washout + fft_len]
    spectra = spectrum_of_states(states, trace.boundaries, fft_len, window)
    peaks = np.array([find_peaks(s, fft_len) for s in spectra])
    floor = peaks.min(axis=1, keepdims=True)
    if np.any(floor <= 0):
        raise DegenerateInputError("a sub-reservoir has a zero spectral peak; cannot normalise")
    return SpectrumProfile(spectra, peaks, peaks / floor,
                           [expected_bin(p, fft_len) for p in MSO_FREQUENCIES], fft_len)


@dataclass
class MemoryCapacityResult:
    r2: np.ndarray
    total: float
    max_delay: int

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "r2"])
            for k, v in enumerate(self.r2, 1):
                w.writerow([k, repr(float(v))])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump({"max_delay": self.max_delay, "memory_capacity": self.total,
                       "r2": [float(v) for v in self.r2]}, fh, indent=2)


def memory_capacity(net: ReservoirNetwork, lam: float = DEFAULT_LAMBDA, max_delay: int = 100,
                    mc_seed: int = 0, washout: int = 200, train: int = 1000,
                    evaluate: int = 1000) -> MemoryCapacityResult:
    """Sum over delays k = 1..K of the held-out squared correlation between
    u(t-k) and its linear reconstruction from the state x(t) (plus bias).

    Input is i.i.d. uniform on [-0.5, 0.5]. One ridge fit per delay; they
    share the same design matrix, so all K are solved together.
    """
    if max_delay < 1:
        raise ValueError("max_delay must be >= 1")
    if washout < max_delay:
        raise ValueError("washout must be at least max_delay so every delayed input exists")
    if net.topology.input_dim != 1:
        raise DimensionError("memory capacity uses a scalar input")
    n = washout + train + evaluate
    u = SeededRng(mc_seed).uniform(-0.5, 0.5, n)
    trace = net.run(u, reset=True)
    feats = np.hstack([trace.readout_states, np.ones((n, 1))])
    t = np.arange(n)
    delayed = np.column_stack([u[t - k] for k in range(1, max_delay + 1)])
    fit = slice(washout, washout + train)
    held = slice(washout + train, n)
    w = ridge_solve(feats[fit], delayed[fit], lam)
    recon = feats[held] @ w.T
    r2 = np.zeros(max_delay)
    for k in range(max_delay):
        try:
            r2[k] = squared_correlation(recon[:, k], delayed[held, k])
        except DegenerateInputError:
            r2[k] = 0.0
    return MemoryCapacityResult(r2, float(r2.sum()), max_delay)
