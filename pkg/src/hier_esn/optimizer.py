"""Microbial genetic algorithm over per-sub-reservoir hyperparameters.

A genome is a flat float array ``(IS_1, SR_1, a_1, IS_2, ...)`` with every
gene in (0, 1]. Each generation runs one duel (configurable): two distinct
members are evaluated, and the loser is overwritten by gene-wise crossover
from the winner followed by gene-wise mutation.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import HierEsnError
from .numerics import SeededRng
from .readout import DEFAULT_LAMBDA, FeatureSpec, nrmse, train_readout
from .reservoir import HyperParams, Topology, build_network
from .tasks import DatasetSplit

log = logging.getLogger(__name__)

FAILED = math.inf


@dataclass
class GaConfig:
    generations: int = 1000
    population_size: int = 15
    crossover_rate: float = 0.33
    mutation_rate: float = 0.33
    ga_seed: int = 0
    fitness_seed: int = 1
    duels_per_generation: int = 1
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.duels_per_generation < 1:
            raise ValueError("duels_per_generation must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            r = getattr(self, name)
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {r}")


@dataclass
class GaResult:
    best_genome: list
    best_nrmse: float
    history: list
    evaluations: int
    population: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def save_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, allow_nan=True)

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["generation", "best_nrmse"])
            for g, v in enumerate(self.history, 1):
                w.writerow([g, repr(float(v))])


def random_population(n: int, genome_len: int, rng: SeededRng) -> list[np.ndarray]:
    if n < 2:
        raise ValueError("population needs at least two genomes")
    return [rng.unit_interval_open_left(genome_len) for _ in range(n)]


def crossover_into_loser(winner, loser, rate: float, rng: SeededRng) -> np.ndarray:
    """Copy each winner gene over the loser's with probability ``rate``."""
    winner = np.asarray(winner, dtype=float)
    loser = np.asarray(loser, dtype=float)
    if winner.shape != loser.shape:
        raise ValueError("genomes differ in length")
    take = rng.random(loser.size) < rate
    return np.where(take, winner, loser)


def mutate(genome, rate: float, rng: SeededRng) -> np.ndarray:
    """Resample each gene uniformly on (0, 1] with probability ``rate``."""
    genome = np.asarray(genome, dtype=float)
    hit = rng.random(genome.size) < rate
    fresh = rng.unit_interval_open_left(genome.size)
    return np.where(hit, fresh, genome)


class DuelOutcome(NamedTuple):
    population: list
    winner: int
    loser: int
    winner_fitness: float
    loser_fitness: float


def duel(population: list, rng: SeededRng, evaluate: Callable, crossover_rate: float = 0.33,
         mutation_rate: float = 0.33) -> DuelOutcome:
    """One tournament; the population list is updated in place."""
    if len(population) < 2:
        raise ValueError("population needs at least two genomes")
    a, b = (int(i) for i in rng.choice(len(population), 2, replace=False))
    fa = evaluate(population[a])
    fb = evaluate(population[b])
    winner, loser = (b, a) if fb < fa else (a, b)
    child = crossover_into_loser(population[winner], population[loser], crossover_rate, rng)
    population[loser] = mutate(child, mutation_rate, rng)
    fw, fl = (fb, fa) if winner == b else (fa, fb)
    return DuelOutcome(population, winner, loser, fw, fl)


def score_segments(topology: Topology, build_seed: int, split: DatasetSplit,
                   segments=("validation",), lam: float = DEFAULT_LAMBDA,
                   spec: FeatureSpec | None = None) -> dict:
    """Build, train on the training segment, and return NRMSE per scored segment."""
    if spec is None:
        spec = FeatureSpec(append_raw_input=split.append_raw_input)
    net = build_network(topology, build_seed)
    _, train_end = split.train_range
    trace = net.run(split.inputs[:train_end], reset=True)
    readout = train_readout(trace, split.inputs[:train_end], split.targets[:train_end],
                            split.washout, spec, lam)
    scores = {}
    for name in segments:
        start, stop = split.segment(name)
        first = start - split.transient
        trace = net.run(split.inputs[first:stop], reset=True)
        pred = readout.predict(trace.rows(split.transient), split.inputs[start:stop])
        scores[name] = nrmse(pred, split.targets[start:stop])
    return scores


def evaluate_fitness(genome, template: Topology, task: DatasetSplit, fitness_seed: int,
                     lam: float = DEFAULT_LAMBDA) -> float:
    """Validation NRMSE of ``genome`` on a network built with ``fitness_seed``.

    Any build or training failure yields ``inf`` so the genome loses its duel.
    """
    genome = np.asarray(genome, dtype=float)
    if genome.size != 3 * template.n_subs:
        raise ValueError(f"genome has {genome.size} genes, topology needs {3 * template.n_subs}")
    try:
        topo = template.with_params(HyperParams.from_genes(genome))
        value = score_segments(topo, fitness_seed, task, ("validation",), lam)["validation"]
    except (HierEsnError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.warning("fitness evaluation failed for genome %s: %s", genome.tolist(), exc)
        return FAILED
    return value if math.isfinite(value) else FAILED


def optimize(config: GaConfig, template: Topology, task: DatasetSplit,
             fitness: Callable | None = None,
             on_generation: Callable | None = None) -> GaResult:
    """Steady-state microbial GA; returns the best genome ever evaluated.

    ``fitness`` overrides the default validation-NRMSE objective (useful for
    tests). Fitness values are cached by genome bytes. ``on_generation`` is
    called as ``on_generation(gen, population, best_nrmse)`` after each
    generation; it must not mutate the population.
    """
    if fitness is None:
        def fitness(g):
            return evaluate_fitness(g, template, task, config.fitness_seed, config.lam)

    cache: dict[bytes, float] = {}
    best = [FAILED, None]

    def evaluate(genome):
        key = np.asarray(genome, dtype=float).tobytes()
        if key not in cache:
            value = float(fitness(genome))
            cache[key] = value
            if value < best[0] or best[1] is None:
                best[0], best[1] = value, np.array(genome, dtype=float)
        return cache[key]

    rng = SeededRng(config.ga_seed)
    population = random_population(config.population_size, 3 * template.n_subs,
                                   rng.child("population"))
    duel_rng = rng.child("duels")
    history = []
    for gen in range(config.generations):
        for _ in range(config.duels_per_generation):
            duel(population, duel_rng, evaluate, config.crossover_rate, config.mutation_rate)
        history.append(best[0])
        if on_generation is not None:
            on_generation(gen, population, best[0])
    return GaResult(
        best_genome=best[1].tolist(),
        best_nrmse=best[0],
        history=history,
        evaluations=len(cache),
        population=[g.tolist() for g in population],
    )
