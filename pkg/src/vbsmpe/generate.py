"""Seeded random models for test corpora."""

from __future__ import annotations

from itertools import product

import numpy as np

from .dst import MassUniverse
from .model import BAYESIAN, DST, Evidence, Model, Variable
from .prob import CptUniverse


def _variables(n_vars: int, max_frame: int, rng: np.random.Generator) -> tuple[Variable, ...]:
    if n_vars < 1:
        raise ValueError("n_vars must be at least 1")
    if max_frame < 1:
        raise ValueError("max_frame must be at least 1")
    low = min(2, max_frame)
    out = []
    for i in range(n_vars):
        size = int(rng.integers(low, max_frame + 1))
        name = f"X{i}"
        out.append(Variable(i, name, tuple(f"x{i}_{k}" for k in range(size))))
    return tuple(out)


def random_bayesian(n_vars: int, max_frame: int = 2, max_parents: int = 2, seed: int = 0, alpha: float = 1.0) -> Model:
    """Random DAG (parents drawn among lower-numbered variables) with
    Dirichlet(``alpha``) CPT columns."""
    rng = np.random.default_rng(seed)
    variables = _variables(n_vars, max_frame, rng)
    cpts = []
    for v in variables:
        n_par = int(rng.integers(0, min(max_parents, v.id) + 1))
        parents = sorted(rng.choice(v.id, size=n_par, replace=False).tolist()) if n_par else []
        columns = int(np.prod([variables[p].size for p in parents], dtype=np.int64))
        # one distribution per parent assignment; child is the slowest axis
        table = rng.dirichlet(np.full(v.size, alpha), size=columns).T.reshape(-1)
        cpts.append(CptUniverse((v.id, *parents), tuple(float(x) for x in table)))
    return Model(variables, BAYESIAN, tuple(cpts))


def random_dst(
    n_vars: int,
    max_frame: int = 2,
    n_universes: int | None = None,
    universe_size: int = 2,
    focal_count: int = 3,
    include_frame: bool = True,
    seed: int = 0,
) -> Model:
    """Random hypergraph of mass functions covering every variable.

    With ``include_frame`` each universe puts some mass on its whole frame,
    which keeps every singleton commonality positive.
    """
    rng = np.random.default_rng(seed)
    variables = _variables(n_vars, max_frame, rng)
    if n_universes is None:
        n_universes = n_vars
    universes = []
    uncovered = list(range(n_vars))
    for i in range(max(n_universes, 1)):
        width = int(rng.integers(1, min(universe_size, n_vars) + 1))
        members = set(rng.choice(n_vars, size=width, replace=False).tolist())
        if uncovered:
            members.add(uncovered.pop(0))
        vids = tuple(sorted(members))
        sizes = tuple(variables[v].size for v in vids)
        frame = list(product(*(range(s) for s in sizes)))
        sets = set()
        if include_frame:
            sets.add(frozenset(frame))
        # bounded attempts; tiny frames may not have focal_count distinct subsets
        for _ in range(8 * focal_count):
            if len(sets) >= focal_count:
                break
            k = int(rng.integers(1, len(frame) + 1))
            picks = rng.choice(len(frame), size=k, replace=False)
            sets.add(frozenset(frame[j] for j in picks))
        ordered = sorted(sets, key=sorted)
        masses = rng.dirichlet(np.ones(len(ordered)))
        universes.append(MassUniverse(vids, sizes, tuple((s, float(m)) for s, m in zip(ordered, masses))))
    while uncovered:
        v = uncovered.pop(0)
        universes.append(MassUniverse((v,), (variables[v].size,), ((frozenset((x,) for x in range(variables[v].size)), 1.0),)))
    return Model(variables, DST, tuple(universes))


def random_evidence(model: Model, n_constrained: int, seed: int = 0) -> Evidence:
    """Non-empty random value subsets on ``n_constrained`` variables."""
    rng = np.random.default_rng(seed)
    n_constrained = min(n_constrained, model.n)
    chosen = sorted(rng.choice(model.n, size=n_constrained, replace=False).tolist())
    allowed = {}
    for v in chosen:
        size = model.variables[v].size
        k = int(rng.integers(1, size + 1))
        allowed[v] = frozenset(int(x) for x in rng.choice(size, size=k, replace=False))
    return Evidence(allowed)
