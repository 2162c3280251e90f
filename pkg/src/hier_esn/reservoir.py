"""Shallow, Wide and Deep leaky-integrator reservoirs.

All three architectures share one update rule per sub-reservoir::

    x(t) = (1 - a) * x(t-1) + a * tanh(W_in s(t) + W_res x(t-1))

where the drive ``s(t)`` is the external input for a shallow reservoir, for
every wide sub-reservoir, and for the first deep layer; deeper layers are
driven by the *current* state of the layer below.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import BuildError, ConvergenceError, DimensionError
from .numerics import SeededRng, derive_seed, spectral_radius_estimate

KINDS = ("shallow", "wide", "deep")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    input_scaling: float
    spectral_radius: float
    leaky_rate: float

    def __post_init__(self):
        for name in ("input_scaling", "spectral_radius", "leaky_rate"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {v!r}")

    @classmethod
    def from_genes(cls, genes: Sequence[float]) -> list["HyperParams"]:
        """Unpack a flat (IS, SR, alpha, IS, SR, alpha, ...) gene vector."""
        genes = [float(g) for g in genes]
        if len(genes) % 3:
            raise ValueError(f"gene count {len(genes)} is not a multiple of 3")
        return [cls(*genes[i:i + 3]) for i in range(0, len(genes), 3)]

    def as_tuple(self):
        return (self.input_scaling, self.spectral_radius, self.leaky_rate)


def split_sizes(total: int, n_subs: int) -> list[int]:
    """Equal split of ``total`` nodes; the remainder goes to earlier layers."""
    if n_subs < 1 or total < n_subs:
        raise ValueError(f"cannot split {total} nodes into {n_subs} sub-reservoirs")
    base, rem = divmod(total, n_subs)
    return [base + (1 if i < rem else 0) for i in range(n_subs)]


@dataclass(frozen=True)
class Topology:
    kind: str
    sub_sizes: tuple
    input_dim: int
    params: tuple
    # Read all N_L layers into the readout; False keeps only the first N_L - 1.
    include_last_layer: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sub_sizes", tuple(int(s) for s in self.sub_sizes))
        object.__setattr__(self, "params", tuple(self.params))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.sub_sizes or min(self.sub_sizes) < 1:
            raise ValueError("need at least one sub-reservoir, each with >= 1 node")
        if self.kind == "shallow" and len(self.sub_sizes) != 1:
            raise ValueError("a shallow reservoir has exactly one sub-reservoir")
        if len(self.params) != len(self.sub_sizes):
            raise ValueError(
                f"{len(self.params)} hyperparameter sets for {len(self.sub_sizes)} sub-reservoirs"
            )
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")

    @classmethod
    def make(cls, kind: str, total_nodes: int, n_subs: int, params, input_dim: int = 1,
             include_last_layer: bool = True) -> "Topology":
        if kind == "shallow":
            n_subs = 1
        if isinstance(params, HyperParams):
            params = [params] * n_subs
        return cls(kind, tuple(split_sizes(total_nodes, n_subs)), input_dim, tuple(params),
                   include_last_layer)

    @property
    def n_subs(self) -> int:
        return len(self.sub_sizes)

    @property
    def total_nodes(self) -> int:
        return sum(self.sub_sizes)

    @property
    def boundaries(self) -> list[tuple[int, int]]:
        edges = np.concatenate([[0], np.cumsum(self.sub_sizes)])
        return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]

    @property
    def readout_width(self) -> int:
        if self.include_last_layer or self.n_subs == 1:
            return self.total_nodes
        return self.total_nodes - self.sub_sizes[-1]

    def with_params(self, params) -> "Topology":
        return Topology(self.kind, self.sub_sizes, self.input_dim, tuple(params),
                        self.include_last_layer)

    def source_dim(self, layer: int) -> int:
        if self.kind == "deep" and layer > 0:
            return self.sub_sizes[layer - 1]
        return self.input_dim


@dataclass
class StateTrace:
    """States of every step, sub-reservoir 1 first in the column order."""

    states: np.ndarray
    boundaries: list
    readout_width: int = field(default=-1)

    def __post_init__(self):
        if self.readout_width < 0:
            self.readout_width = self.states.shape[1]

    @property
    def steps(self) -> int:
        return self.states.shape[0]

    def sub(self, layer: int) -> np.ndarray:
        a, b = self.boundaries[layer]
        return self.states[:, a:b]

    @property
    def readout_states(self) -> np.ndarray:
        return self.states[:, : self.readout_width]

    def rows(self, start: int, stop: int | None = None) -> "StateTrace":
        return StateTrace(self.states[start:stop], self.boundaries, self.readout_width)


class ReservoirNetwork:
    """Fixed weights plus mutable per-sub-reservoir state.

    Instances are single-owner while stepping. ``w_in[l]`` has shape
    (size_l, source_dim_l) and ``w_res[l]`` is (size_l, size_l).
    """

    def __init__(self, topology: Topology, w_in, w_res, build_seed: int | None = None):
        self.topology = topology
        self.w_in = [np.asarray(w, dtype=float) for w in w_in]
        self.w_res = [np.asarray(w, dtype=float) for w in w_res]
        self.build_seed = build_seed
        for l, size in enumerate(topology.sub_sizes):
            if self.w_in[l].shape != (size, topology.source_dim(l)):
                raise DimensionError(
                    f"layer {l}: W_in shape {self.w_in[l].shape}, "
                    f"expected {(size, topology.source_dim(l))}"
                )
            if self.w_res[l].shape != (size, size):
                raise DimensionError(f"layer {l}: W_res shape {self.w_res[l].shape}")
        self._leak = [p.leaky_rate for p in topology.params]
        self.reset()

    def reset(self):
        self.states = [np.zeros(s) for s in self.topology.sub_sizes]

    def set_state(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.topology.total_nodes,):
            raise DimensionError(f"state must have length {self.topology.total_nodes}")
        self.states = [x[a:b].copy() for a, b in self.topology.boundaries]

    @property
    def state(self) -> np.ndarray:
        return np.concatenate(self.states)

    def _check_input(self, u, rows: bool) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        n_u = self.topology.input_dim
        if rows:
            if u.ndim == 1 and n_u == 1:
                u = u[:, None]
            if u.ndim != 2 or u.shape[1] != n_u or u.shape[0] < 1:
                raise DimensionError(f"inputs must have shape (T>=1, {n_u}), got {u.shape}")
        else:
            u = np.atleast_1d(u)
            if u.shape != (n_u,):
                raise DimensionError(f"input must have length {n_u}, got shape {u.shape}")
        return u

    def step(self, u) -> np.ndarray:
        """Advance one time step and return the concatenated state."""
        u = self._check_input(u, rows=False)
        deep = self.topology.kind == "deep"
        src = u
        for l in range(self.topology.n_subs):
            a = self._leak[l]
            x = self.states[l]
            pre = self.w_in[l] @ src + self.w_res[l] @ x
            self.states[l] = (1.0 - a) * x + a * np.tanh(pre)
            if deep:
                src = self.states[l]
        return self.state

    def _run_layer(self, l: int, drive: np.ndarray) -> np.ndarray:
        a = self._leak[l]
        w = self.w_res[l]
        x = self.states[l]
        out = np.empty_like(drive)
        for t in range(drive.shape[0]):
            x = (1.0 - a) * x + a * np.tanh(drive[t] + w @ x)
            out[t] = x
        self.states[l] = x.copy()
        return out

    def run(self, inputs, reset: bool = True) -> StateTrace:
        """Drive the network over a (T, N_U) input sequence.

        Layers are processed one at a time over the whole sequence; this is
        the same recursion as repeated :meth:`step` calls because a deep layer
        only needs the finished trace of the layer below.
        """
        u = self._check_input(inputs, rows=True)
        if reset:
            self.reset()
        topo = self.topology
        blocks = []
        src = u
        for l in range(topo.n_subs):
            trace = self._run_layer(l, src @ self.w_in[l].T)
            blocks.append(trace)
            if topo.kind == "deep":
                src = trace
        return StateTrace(np.hstack(blocks), topo.boundaries, topo.readout_width)

    def spectral_radii(self) -> list[float]:
        return [float(np.abs(np.linalg.eigvals(w)).max()) for w in self.w_res]

    def to_dict(self) -> dict:
        return network_to_dict(self.topology, self.build_seed)


def build_network(topology: Topology, seed: int) -> ReservoirNetwork:
    """Draw weights for every sub-reservoir and rescale W_res to its SR.

    Layer ``l`` draws from its own child stream of ``seed``, so sub-reservoir
    weights do not depend on how many layers follow it.
    """
    w_in, w_res = [], []
    for l, (size, hp) in enumerate(zip(topology.sub_sizes, topology.params)):
        rng = SeededRng(derive_seed(seed, "layer", l))
        w_in.append(rng.uniform(-hp.input_scaling, hp.input_scaling,
                                (size, topology.source_dim(l))))
        raw = rng.uniform(-1.0, 1.0, (size, size))
        try:
            rho = spectral_radius_estimate(raw, seed=derive_seed(seed, "radius", l))
        except ConvergenceError as exc:
            raise BuildError(f"layer {l}: spectral radius estimate failed: {exc}") from exc
        if rho == 0.0:
            raise BuildError(f"layer {l}: random recurrent matrix has zero spectral radius")
        w_res.append(raw * (hp.spectral_radius / rho))
    return ReservoirNetwork(topology, w_in, w_res, build_seed=seed)


def step(net: ReservoirNetwork, u) -> np.ndarray:
    return net.step(u)


def run_sequence(net: ReservoirNetwork, inputs, reset: bool = True) -> StateTrace:
    return net.run(inputs, reset=reset)


def network_to_dict(topology: Topology, seed) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": topology.kind,
        "sub_sizes": list(topology.sub_sizes),
        "input_dim": topology.input_dim,
        "include_last_layer": topology.include_last_layer,
        "params": [asdict(p) for p in topology.params],
        "seed": seed,
    }


def network_from_dict(doc: dict) -> ReservoirNetwork:
    """Rebuild a network from its JSON document; weights are regenerated from the seed."""
    topo = Topology(
        kind=doc["kind"],
        sub_sizes=tuple(doc["sub_sizes"]),
        input_dim=int(doc.get("input_dim", 1)),
        params=tuple(HyperParams(**p) for p in doc["params"]),
        include_last_layer=bool(doc.get("include_last_layer", True)),
    )
    return build_network(topo, int(doc["seed"]))


def save_network(net: ReservoirNetwork, path):
    with open(path, "w") as fh:
        json.dump(net.to_dict(), fh, indent=2)


def load_network(path) -> ReservoirNetwork:
    with open(path) as fh:
        return network_from_dict(json.load(fh))
