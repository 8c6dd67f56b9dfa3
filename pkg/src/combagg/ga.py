"""Genetic search for the worst-case deviation at a given perturbation size.

Individuals are perturbed matrices (upper triangles) inside the +-delta box
around the consistent matrix of the model weights. Fitness is the maximum
relative deviation of the aggregated priorities from the model weights.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .aggregation import METHODS, ORDINARY, WEIGHTED
from .errors import BadConfig, BadGrid, InvariantViolation
from .pcm import Kind, PairwiseComparisonMatrix
from .robustness import DEFAULT_SEED, DeviationObjective, ModelWeights, vertex_oracle, MAX_ORACLE_N

MAX_CORNER_PAIRS = 12


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 64
    elite_fraction: float = 0.25
    mutation_rate: float = 0.1
    stagnation_limit: int = 30
    max_generations: int = 1000
    seed: int = DEFAULT_SEED
    debug: bool = False

    def __post_init__(self):
        if self.population_size < 4:
            raise BadConfig("population_size must be >= 4")
        if not 0 < self.elite_fraction <= 1:
            raise BadConfig("elite_fraction must lie in (0, 1]")
        if not 0 <= self.mutation_rate <= 1:
            raise BadConfig("mutation_rate must lie in [0, 1]")
        if self.stagnation_limit < 1 or self.max_generations < 1:
            raise BadConfig("stagnation_limit and max_generations must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise BadConfig("seed must be a 64-bit unsigned integer")

    @property
    def elite_count(self) -> int:
        return max(1, round(self.elite_fraction * self.population_size))

    @classmethod
    def from_dict(cls, d: dict) -> "GaConfig":
        aliases = {
            "populationSize": "population_size",
            "eliteFraction": "elite_fraction",
            "mutationRate": "mutation_rate",
            "stagnationLimit": "stagnation_limit",
            "maxGenerations": "max_generations",
        }
        kwargs = {}
        for key, value in d.items():
            name = aliases.get(key, key)
            if name not in cls.__dataclass_fields__:
                raise BadConfig(f"unknown GA setting {key!r}")
            kwargs[name] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class GaResult:
    delta_max: float
    argmax_matrix: PairwiseComparisonMatrix
    history: tuple[float, ...]
    generations: int
    evaluations: int


def _ranked(fitness: np.ndarray) -> np.ndarray:
    # best first, ties by position
    return np.argsort(-fitness, kind="stable")


def run_ga(truth: ModelWeights, delta: float, method: str,
           config: GaConfig = GaConfig()) -> GaResult:
    if not 0 < delta < 100:
        raise BadConfig(f"delta must lie in (0, 100), got {delta}")
    rng = np.random.default_rng(config.seed)
    objective = DeviationObjective(truth, delta, method)
    low, high = objective.low, objective.high
    P = objective.center.size
    d = delta / 100.0

    pop = objective.center * (1.0 + rng.uniform(-d, d, size=(config.population_size, P)))
    pop = np.clip(pop, low, high)
    if P <= MAX_CORNER_PAIRS:
        pop = np.vstack([pop, objective.vertices()])
    fit = objective(pop)
    order = _ranked(fit)
    best = float(fit[order[0]])
    history = [best]
    stagnation = 0
    generations = 0
    E = config.elite_count
    n_children = config.population_size - E

    while generations < config.max_generations and stagnation < config.stagnation_limit:
        generations += 1
        elites, elite_fit = pop[order[:E]], fit[order[:E]]
        a = rng.integers(E, size=n_children)
        b = rng.integers(E, size=n_children)
        lam = rng.random(n_children)[:, None]
        children = lam * elites[a] + (1.0 - lam) * elites[b]
        mutate = rng.random((n_children, P)) < config.mutation_rate
        resampled = low + rng.random((n_children, P)) * (high - low)
        children = np.clip(np.where(mutate, resampled, children), low, high)

        pop = np.vstack([elites, children])
        fit = np.concatenate([elite_fit, objective(children)])
        order = _ranked(fit)
        if config.debug and (np.any(pop < low) or np.any(pop > high)):
            raise InvariantViolation("individual left the perturbation box")
        if fit[order[0]] > best:
            best = float(fit[order[0]])
            stagnation = 0
        else:
            stagnation += 1
        history.append(best)

    return GaResult(best, objective.as_pcm(pop[order[0]]), tuple(history),
                    generations, objective.evaluations)


def model_vector_presets(n: int, kind: Kind | str = Kind.MULTIPLICATIVE) -> dict[str, ModelWeights]:
    if n < 2:
        raise BadConfig("presets need n >= 2")
    kind = Kind.parse(kind)
    raw = {
        "equal": [1] * n,
        "equal-in-pairs": [i // 2 + 1 for i in range(n)],
        "arithmetic": list(range(1, n + 1)),
        "geometric": [2 ** i for i in range(n)],
        "extreme": [1] * (n - 1) + [9],
    }
    return {name: ModelWeights(tuple(w), kind) for name, w in raw.items()}


@dataclass(frozen=True)
class SweepPoint:
    delta: float
    method: str
    Delta: float
    argmax_matrix: PairwiseComparisonMatrix
    generations: int
    evaluations: int


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    truth_label: str
    truth: ModelWeights | None = field(default=None, compare=False)

    def series(self, method: str) -> list[SweepPoint]:
        return [p for p in self.points if p.method == method]


def point_seed(master: int, delta: float, method: str) -> int:
    ss = np.random.SeedSequence([master, METHODS.index(method), int(round(delta * 1e6))])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def sweep(truth: ModelWeights, delta_grid: Sequence[float], methods: Sequence[str],
          config: GaConfig = GaConfig(), exact: bool = False, label: str = "custom",
          threads: int = 1) -> SweepResult:
    """One worst-case search per (delta, method); vertex oracle when ``exact`` and n <= 5."""
    grid = [float(x) for x in delta_grid]
    if not grid:
        raise BadGrid("empty delta grid")
    if any(not 0 < x < 100 for x in grid):
        raise BadGrid("grid values must lie in (0, 100)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise BadGrid("grid must be strictly increasing")
    for m in methods:
        if m not in METHODS:
            raise BadConfig(f"unknown method {m!r}")
    use_oracle = exact and truth.n <= MAX_ORACLE_N
    jobs = [(m, x) for m in methods for x in grid]

    def run(job):
        method, delta = job
        if use_oracle:
            r = vertex_oracle(truth, delta, method)
            return SweepPoint(delta, method, r.delta_max, r.argmax_matrix, 0, r.evaluations)
        cfg = replace(config, seed=point_seed(config.seed, delta, method))
        r = run_ga(truth, delta, method, cfg)
        return SweepPoint(delta, method, r.delta_max, r.argmax_matrix, r.generations, r.evaluations)

    if threads == 1:
        points = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as pool:
            points = list(pool.map(run, jobs))
    return SweepResult(tuple(points), label, truth)


def compare_methods(result: SweepResult) -> list[dict]:
    """Per grid point: ordinary and weighted worst case and their difference."""
    ordinary = {p.delta: p.Delta for p in result.series(ORDINARY)}
    weighted = {p.delta: p.Delta for p in result.series(WEIGHTED)}
    rows = []
    for delta in sorted(set(ordinary) & set(weighted)):
        o, w = ordinary[delta], weighted[delta]
        rows.append({
            "preset": result.truth_label,
            "delta": delta,
            "ordinary": o,
            "weighted": w,
            "weighted_minus_ordinary": w - o,
            "weighted_more_stable": w < o,
        })
    return rows
