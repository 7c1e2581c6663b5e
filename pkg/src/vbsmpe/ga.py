"""Genetic search for the k best explanations.

Individuals are integer vectors, one value ordinal per variable. Every
operator keeps each locus inside its allowed value set, so evidence holds
for the whole population at all times. The k-best loop blocks each answer
(its fitness becomes 0) before searching for the next one.

All random draws come from one ``numpy.random.Generator`` seeded from
``GaParams.seed``; identical inputs give identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import NoSolutionError
from .model import Configuration, Evidence, Model
from .scoring import batch_log_scores, log_score

SELECTIONS = ("tournament", "roulette")


@dataclass(frozen=True)
class GaParams:
    population_size: int = 50
    p_m: float = 0.1
    p_c: float = 0.7
    max_generations: int = 200
    stagnation_window: int = 50  # 0 disables early stopping
    elitism: int = 1
    selection: str = "tournament"
    tournament_size: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be in [0, population_size)")
        if not 0.0 <= self.p_m <= 1.0 or not 0.0 <= self.p_c <= 1.0:
            raise ValueError("p_m and p_c must be probabilities")
        if self.max_generations < 0 or self.stagnation_window < 0:
            raise ValueError("generation counts must be non-negative")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def as_dict(self) -> dict:
        return asdict(self)


class BlockedSet:
    """Configurations already returned by earlier k-best rounds."""

    def __init__(self, configs: Iterable[Sequence[int]] = ()):
        self._order: list[Configuration] = []
        self._seen: set[Configuration] = set()
        for c in configs:
            self.add(c)

    def add(self, config: Sequence[int]) -> None:
        config = tuple(int(x) for x in config)
        if config not in self._seen:
            self._seen.add(config)
            self._order.append(config)

    def __contains__(self, config) -> bool:
        return tuple(config) in self._seen

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._order)


@dataclass(frozen=True)
class RankedExplanation:
    rank: int
    config: Configuration
    score: float
    log_score: float
    generations_used: int


def _exp(lv: float) -> float:
    return 0.0 if lv == -math.inf else math.exp(lv)


def fitness(config: Sequence[int], model: Model, blocked: Optional[BlockedSet] = None) -> float:
    """Objective value of ``config``, or 0 if it has been blocked."""
    if blocked is not None and config in blocked:
        return 0.0
    return _exp(log_score(config, model))


def _log_fitness(pop: np.ndarray, model: Model, blocked: BlockedSet) -> np.ndarray:
    out = batch_log_scores(pop, model)
    if len(blocked):
        for i, row in enumerate(pop):
            if tuple(int(x) for x in row) in blocked:
                out[i] = -np.inf
    return out


def init_population(allowed: Sequence[Sequence[int]], size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` individuals, each locus uniform over its allowed values.

    ``allowed`` is the per-variable list from :meth:`Evidence.allowed_values`.
    """
    pop = np.empty((size, len(allowed)), dtype=np.int64)
    for col, vals in enumerate(allowed):
        pop[:, col] = np.asarray(vals, dtype=np.int64)[rng.integers(0, len(vals), size=size)]
    return pop


def mutate(ind: Sequence[int], allowed: Sequence[Sequence[int]], p_m: float, rng: np.random.Generator) -> np.ndarray:
    """Replace each locus, with probability ``p_m``, by a different allowed value.

    Loci with a single allowed value never change.
    """
    out = np.array(ind, dtype=np.int64)
    hits = np.flatnonzero(rng.random(len(out)) < p_m)
    for locus in hits:
        vals = allowed[locus]
        if len(vals) < 2:
            continue
        pos = vals.index(int(out[locus]))
        j = int(rng.integers(0, len(vals) - 1))
        out[locus] = vals[j if j < pos else j + 1]
    return out


def crossover(a: Sequence[int], b: Sequence[int], rng: np.random.Generator, cut: Optional[int] = None):
    """Single-point crossover with the cut drawn from ``1..n-1``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = len(a)
    if n < 2:
        return a.copy(), b.copy()
    if cut is None:
        cut = int(rng.integers(1, n))
    return np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]])


def _select(fit: np.ndarray, count: int, params: GaParams, rng: np.random.Generator) -> np.ndarray:
    size = len(fit)
    if params.selection == "tournament":
        draws = rng.integers(0, size, size=(count, params.tournament_size))
        return draws[np.arange(count), np.argmax(fit[draws], axis=1)]
    top = fit.max()
    if top == -np.inf:
        return rng.integers(0, size, size=count)
    weights = np.exp(fit - top)
    return rng.choice(size, size=count, p=weights / weights.sum())


def _next_generation(pop, fit, allowed, params: GaParams, rng) -> np.ndarray:
    size = len(pop)
    elites = pop[np.argsort(-fit, kind="stable")[: params.elitism]]
    n_off = size - params.elitism
    parents = pop[_select(fit, n_off + (n_off % 2), params, rng)]
    children = []
    for i in range(0, len(parents), 2):
        a, b = parents[i], parents[i + 1]
        if rng.random() < params.p_c:
            a, b = crossover(a, b, rng)
        children.append(mutate(a, allowed, params.p_m, rng))
        children.append(mutate(b, allowed, params.p_m, rng))
    return np.vstack([elites, *children[:n_off]]) if n_off else elites.copy()


def run_ga(
    model: Model,
    ev: Evidence,
    params: GaParams = GaParams(),
    blocked: Optional[BlockedSet] = None,
    rng: Optional[np.random.Generator] = None,
) -> tuple[RankedExplanation, list[float]]:
    """One genetic search. Returns the best individual seen in any
    generation (rank 1) and the population-best score of each generation,
    starting with the initial population.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    blocked = blocked if blocked is not None else BlockedSet()
    allowed = ev.allowed_values(model)
    single_point = all(len(vals) == 1 for vals in allowed)

    pop = init_population(allowed, params.population_size, rng)
    fit = _log_fitness(pop, model, blocked)
    i = int(np.argmax(fit))
    best, best_log = pop[i].copy(), float(fit[i])
    trace = [_exp(best_log)]

    t = stale = 0
    while t < params.max_generations and not (single_point and t >= 1):
        t += 1
        pop = _next_generation(pop, fit, allowed, params, rng)
        fit = _log_fitness(pop, model, blocked)
        i = int(np.argmax(fit))
        trace.append(_exp(float(fit[i])))
        if fit[i] > best_log:
            best, best_log = pop[i].copy(), float(fit[i])
            stale = 0
        elif best_log > -np.inf:
            stale += 1
        if params.stagnation_window and stale >= params.stagnation_window:
            break

    if best_log == -np.inf:
        raise NoSolutionError(f"no configuration with positive score found in {t} generations")
    config = tuple(int(x) for x in best)
    return RankedExplanation(1, config, _exp(best_log), best_log, t), trace


def k_mpe(model: Model, ev: Evidence, params: GaParams = GaParams(), k: int = 1) -> list[RankedExplanation]:
    """``k`` explanations in discovery order, each found with all earlier
    ones blocked. Ranks are not re-sorted by score; see :func:`score_inversions`.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng(params.seed)
    blocked = BlockedSet()
    out = []
    for rank in range(1, k + 1):
        try:
            best, _ = run_ga(model, ev, params, blocked, rng)
        except NoSolutionError as exc:
            raise NoSolutionError(f"rank {rank}: {exc}") from exc
        out.append(replace(best, rank=rank))
        blocked.add(best.config)
    return out


def score_inversions(results: Sequence[RankedExplanation]) -> list[str]:
    """Human-readable notes for every rank that outscores an earlier one."""
    notes = []
    for i, later in enumerate(results):
        for earlier in results[:i]:
            if later.log_score > earlier.log_score:
                notes.append(
                    f"score inversion: rank {later.rank} ({later.score:.10g}) beats rank {earlier.rank} ({earlier.score:.10g})"
                )
                break
    return notes
