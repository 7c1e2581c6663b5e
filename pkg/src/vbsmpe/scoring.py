"""One evaluation path for both calculi.

Each local valuation (a CPT or a singleton-commonality table) is compiled
to flat value and log-value arrays plus mixed-radix strides. Scalar and
batch scoring sum the same log entries in the same universe order, so the
two paths agree bit-for-bit.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import BAYESIAN, Model
from .prob import flat_index, strides


@dataclass(frozen=True)
class LocalTable:
    variables: tuple[int, ...]
    strides: np.ndarray
    values: np.ndarray
    logs: np.ndarray


_cache: "weakref.WeakKeyDictionary[Model, list[LocalTable]]" = weakref.WeakKeyDictionary()


def local_tables(model: Model) -> list[LocalTable]:
    tables = _cache.get(model)
    if tables is None:
        tables = [_compile(u, model) for u in model.universes]
        _cache[model] = tables
    return tables


def _compile(u, model: Model) -> LocalTable:
    if model.kind == BAYESIAN:
        values = np.asarray(u.valuations, dtype=float)
    else:
        from .dst import singleton_commonality

        values = np.asarray(singleton_commonality(u).q, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(values)
    logs[values == 0.0] = -np.inf
    step = np.asarray(strides(u.variables, model.frame_sizes), dtype=np.int64)
    return LocalTable(u.variables, step, values, logs)


def log_score(config: Sequence[int], model: Model) -> float:
    """Natural log of the objective; ``-inf`` iff some factor is exactly 0."""
    sizes = model.frame_sizes
    total = 0.0
    for t in local_tables(model):
        lv = t.logs[flat_index(config, t.variables, sizes)]
        if lv == -np.inf:
            return -math.inf
        total += float(lv)
    return total


def score(config: Sequence[int], model: Model) -> float:
    lv = log_score(config, model)
    return 0.0 if lv == -math.inf else math.exp(lv)


def batch_log_scores(configs: np.ndarray, model: Model) -> np.ndarray:
    """Log objective for each row of an ``(N, n)`` integer array."""
    configs = np.asarray(configs, dtype=np.int64)
    total = np.zeros(len(configs))
    for t in local_tables(model):
        idx = configs[:, list(t.variables)] @ t.strides
        total += t.logs[idx]
    return total
