"""Exact brute-force reference for small models.

Everything here enumerates. It exists to check the genetic search and the
two engines, and refuses inputs above its guards instead of hanging.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from functools import reduce
from math import prod
from typing import Sequence

import numpy as np

from .dst import COMBINE_GUARD, CommonalityTable, MassUniverse, combine, singleton_commonality
from .errors import CapacityError
from .ga import RankedExplanation
from .model import BAYESIAN, DST, Evidence, Model
from .scoring import batch_log_scores, log_score

ENUMERATION_GUARD = 2**24
JOINT_GUARD = 2**20
CHUNK = 2**16


@dataclass(frozen=True)
class OracleResult:
    top: list[RankedExplanation]
    total_enumerated: int


def _decode(start: int, stop: int, allowed: Sequence[Sequence[int]]) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic product of ``allowed``."""
    radices = [len(a) for a in allowed]
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), len(allowed)), dtype=np.int64)
    for col in range(len(allowed) - 1, -1, -1):
        out[:, col] = np.asarray(allowed[col], dtype=np.int64)[idx % radices[col]]
        idx //= radices[col]
    return out


def _best_k(configs: np.ndarray, logs: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    # lexsort: last key is primary -> descending score, then lexicographic config
    keys = [configs[:, c] for c in range(configs.shape[1] - 1, -1, -1)] + [-logs]
    order = np.lexsort(keys)[:k]
    return configs[order], logs[order]


def enumerate_top_k(model: Model, ev: Evidence, k: int, guard: int = ENUMERATION_GUARD) -> OracleResult:
    """Exact top-``k`` configurations satisfying ``ev``.

    Ties are broken by the lexicographic order of the ordinal vectors.
    ``k`` is capped at the size of the evidence-compatible space.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    allowed = ev.allowed_values(model)
    space = prod(len(a) for a in allowed)
    if space > guard:
        raise CapacityError(
            f"{space} evidence-compatible configurations exceed the oracle guard of {guard}; use the genetic solver"
        )
    best_c = np.empty((0, model.n), dtype=np.int64)
    best_l = np.empty(0)
    for start in range(0, space, CHUNK):
        chunk = _decode(start, min(space, start + CHUNK), allowed)
        cand_c = np.concatenate([best_c, chunk])
        cand_l = np.concatenate([best_l, batch_log_scores(chunk, model)])
        best_c, best_l = _best_k(cand_c, cand_l, k)

    top = []
    for rank, row in enumerate(best_c, start=1):
        config = tuple(int(x) for x in row)
        lv = log_score(config, model)
        top.append(RankedExplanation(rank, config, 0.0 if lv == -math.inf else math.exp(lv), lv, 0))
    return OracleResult(top, space)


_combined: "weakref.WeakKeyDictionary[Model, MassUniverse]" = weakref.WeakKeyDictionary()
_joint_q: "weakref.WeakKeyDictionary[Model, CommonalityTable]" = weakref.WeakKeyDictionary()


def combined_mass(model: Model, guard: int = COMBINE_GUARD) -> MassUniverse:
    """Dempster combination of every universe of a dst model."""
    if model.kind != DST:
        raise ValueError("combined_mass needs a dst model")
    m = _combined.get(model)
    if m is None:
        m = reduce(lambda acc, u: combine(acc, u, guard)[0], model.universes)
        _combined[model] = m
    return m


def exact_joint_commonality(model: Model, config: Sequence[int], guard: int = COMBINE_GUARD) -> float:
    """Q({config}) of the fully combined belief function."""
    model.check_config(config)
    q = _joint_q.get(model)
    if q is None:
        q = singleton_commonality(combined_mass(model, guard))
        _joint_q[model] = q
    return q.at(tuple(config[v] for v in q.variables))


def joint_table(model: Model, guard: int = JOINT_GUARD) -> np.ndarray:
    """Full joint distribution of a bayesian model, flat in lexicographic
    configuration order. Built by broadcasting each CPT over the product
    frame, independently of the scoring path.
    """
    if model.kind != BAYESIAN:
        raise ValueError("joint_table needs a bayesian model")
    sizes = model.frame_sizes
    if prod(sizes) > guard:
        raise CapacityError(f"joint table would have {prod(sizes)} entries, guard is {guard}")
    joint = np.ones(sizes)
    for u in model.universes:
        local = np.asarray(u.valuations).reshape([sizes[v] for v in u.variables])
        # move the CPT axes to model order, then broadcast
        order = sorted(range(u.card), key=lambda i: u.variables[i])
        local = local.transpose(order)
        shape = [1] * model.n
        for v in u.variables:
            shape[v] = sizes[v]
        joint = joint * local.reshape(shape)
    return joint.reshape(-1)
