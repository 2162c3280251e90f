"""Experiment runner for the architecture comparisons.

One experiment = one (task, architecture, size) cell: generate data, run the
GA on validation NRMSE, then re-score the winning genome on
``n_final_seeds`` fresh reservoirs and report test-NRMSE box statistics.
Every seed is derived from ``root_seed``, so a config file fully determines
the numbers in ``result.json``.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .numerics import derive_seed
from .optimizer import GaConfig, GaResult, optimize, score_segments
from .readout import DEFAULT_LAMBDA
from .reservoir import HyperParams, Topology, network_to_dict
from .tasks import TASK_DEFAULTS, make_task

log = logging.getLogger(__name__)

RESULT_SCHEMA = 1
DESK_GENERATIONS = 300
ARCHITECTURES = ("shallow", "wide", "deep")


@dataclass
class ExperimentConfig:
    task: str
    architecture: str
    total_nodes: int = 300
    n_subs: int = 3
    ga: dict = field(default_factory=dict)
    n_final_seeds: int = 10
    lam: float = DEFAULT_LAMBDA
    root_seed: int = 0
    data_path: str | None = None
    out_dir: str | None = None
    # Skip the GA and score this genome directly (e.g. reuse across sizes).
    genome: list | None = None

    def __post_init__(self):
        if self.task not in TASK_DEFAULTS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.architecture == "shallow":
            self.n_subs = 1
        if self.n_final_seeds < 1:
            raise ValueError("n_final_seeds must be >= 1")
        unknown = set(self.ga) - {"generations", "population_size", "crossover_rate",
                                  "mutation_rate", "duels_per_generation"}
        if unknown:
            raise ValueError(f"unknown ga keys: {sorted(unknown)}")
        self.ga_config()  # validate early

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def ga_config(self) -> GaConfig:
        opts = {"generations": DESK_GENERATIONS, **self.ga}
        return GaConfig(ga_seed=derive_seed(self.root_seed, "ga"),
                        fitness_seed=derive_seed(self.root_seed, "fitness"),
                        lam=self.lam, **opts)

    def template(self) -> Topology:
        placeholder = HyperParams(1.0, 1.0, 1.0)
        return Topology.make(self.architecture, self.total_nodes, self.n_subs, placeholder)

    def final_seeds(self) -> list[int]:
        return [derive_seed(self.root_seed, "final", i) for i in range(self.n_final_seeds)]

    @property
    def label(self) -> str:
        return f"{self.task}-{self.architecture}-{self.total_nodes}x{self.n_subs}"


def summary_stats(values) -> dict:
    """Box-chart statistics; percentiles interpolate linearly between order statistics."""
    v = np.asarray(values, dtype=float)
    p25, p50, p75 = np.percentile(v, [25, 50, 75], method="linear")
    return {"min": float(v.min()), "p25": float(p25), "median": float(p50),
            "p75": float(p75), "max": float(v.max()), "mean": float(v.mean())}


@dataclass
class ExperimentResult:
    config: dict
    seeds: list
    nrmse: list
    stats: dict
    genome: list
    validation_nrmse: float | None
    ga_evaluations: int
    ga_history: list
    artifact_version: str = __version__
    schema_version: int = RESULT_SCHEMA
    error: str | None = None
    wall_clock_s: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        # Timing is kept out of result.json so replays are byte-identical.
        d.pop("wall_clock_s")
        # Where the output lands is not part of the experiment.
        d["config"] = {k: v for k, v in d["config"].items() if k != "out_dir"}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "result.json"), "w") as fh:
            fh.write(self.to_json())
        with open(os.path.join(out_dir, "seeds.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["seed", "nrmse"])
            for s, v in zip(self.seeds, self.nrmse):
                w.writerow([s, repr(float(v))])
        with open(os.path.join(out_dir, "timing.json"), "w") as fh:
            json.dump({"wall_clock_s": self.wall_clock_s}, fh)


def max_workers() -> int:
    env = os.environ.get("HIER_ESN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pool_map(fn, items, workers=None):
    """Order-preserving map; runs in-process when only one worker is allowed."""
    items = list(items)
    workers = min(workers or max_workers(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _score_test(args):
    topo, seed, split, lam = args
    return score_segments(topo, seed, split, ("test",), lam)["test"]


def evaluate_genome(config: ExperimentConfig, genome, split=None, workers=None) -> list[float]:
    """Test NRMSE of ``genome`` on each of the config's final build seeds."""
    if split is None:
        split = make_task(config.task, derive_seed(config.root_seed, "task"), config.data_path)
    topo = config.template().with_params(HyperParams.from_genes(genome))
    jobs = [(topo, s, split, config.lam) for s in config.final_seeds()]
    return _pool_map(_score_test, jobs, workers)


def run_experiment(config: ExperimentConfig, workers=None) -> ExperimentResult:
    t0 = time.perf_counter()
    split = make_task(config.task, derive_seed(config.root_seed, "task"), config.data_path)
    if config.genome is None:
        ga = optimize(config.ga_config(), config.template(), split)
        genome, val, evals, history = ga.best_genome, ga.best_nrmse, ga.evaluations, ga.history
    else:
        genome, val, evals, history = list(map(float, config.genome)), None, 0, []
    scores = evaluate_genome(config, genome, split, workers)
    result = ExperimentResult(
        config=config.to_dict(), seeds=config.final_seeds(), nrmse=scores,
        stats=summary_stats(scores), genome=genome, validation_nrmse=val,
        ga_evaluations=evals, ga_history=history,
    )
    result.wall_clock_s = time.perf_counter() - t0
    if config.out_dir:
        result.write(config.out_dir)
        with open(os.path.join(config.out_dir, "network.json"), "w") as fh:
            topo = config.template().with_params(HyperParams.from_genes(genome))
            json.dump(network_to_dict(topo, config.final_seeds()[0]), fh, indent=2)
    log.info("%s: median test NRMSE %.4f", config.label, result.stats["median"])
    return result


def _run_cell(config):
    try:
        # cells already run in parallel; keep each one single-process
        return run_experiment(config, workers=1)
    except Exception as exc:  # recorded per cell, the matrix carries on
        log.error("cell %s failed: %s", config.label, exc)
        return ExperimentResult(config=config.to_dict(), seeds=[], nrmse=[], stats={},
                                genome=[], validation_nrmse=None, ga_evaluations=0,
                                ga_history=[], error=f"{type(exc).__name__}: {exc}")


def run_matrix(configs, out_path=None, workers=None) -> list[ExperimentResult]:
    """Run every cell (in parallel) and optionally write the combined CSV."""
    configs = list(configs)
    if not configs:
        raise ValueError("run_matrix needs at least one config")
    results = _pool_map(_run_cell, configs, workers)
    if out_path:
        write_matrix_csv(results, out_path)
    return results


def write_matrix_csv(results, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["architecture", "total_nodes", "n_subs", "task", "seed", "nrmse"])
        for r in results:
            c = r.config
            for s, v in zip(r.seeds, r.nrmse):
                w.writerow([c["architecture"], c["total_nodes"], c["n_subs"], c["task"], s,
                            repr(float(v))])


def size_sweep(tasks=("narma10", "santa_fe", "mackey_glass"), sizes=(200, 300, 400, 500),
               sub_size: int = 100, **common) -> list[ExperimentConfig]:
    """Total-size sweep: sub-reservoirs of ``sub_size`` nodes are added as size grows."""
    out = []
    for task in tasks:
        for arch in ARCHITECTURES:
            for total in sizes:
                n_subs = 1 if arch == "shallow" else max(1, total // sub_size)
                out.append(ExperimentConfig(task=task, architecture=arch, total_nodes=total,
                                            n_subs=n_subs, **common))
    return out


def depth_sweep(tasks=("narma10", "santa_fe", "mackey_glass"), n_subs=(2, 3, 4, 5),
                total_nodes: int = 300, **common) -> list[ExperimentConfig]:
    """Fixed total size, varying sub-reservoir count, plus a shallow baseline per task."""
    out = []
    for task in tasks:
        out.append(ExperimentConfig(task=task, architecture="shallow",
                                    total_nodes=total_nodes, n_subs=1, **common))
        for arch in ("wide", "deep"):
            for n in n_subs:
                out.append(ExperimentConfig(task=task, architecture=arch,
                                            total_nodes=total_nodes, n_subs=n, **common))
    return out


def load_matrix(path) -> list[ExperimentConfig]:
    """A matrix file is a JSON list of config objects, or ``{"configs": [...]}``."""
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        doc = doc.get("configs", [])
    return [ExperimentConfig.from_dict(d) for d in doc]


def ga_result_for(config: ExperimentConfig) -> tuple[GaResult, object]:
    split = make_task(config.task, derive_seed(config.root_seed, "task"), config.data_path)
    return optimize(config.ga_config(), config.template(), split), split
