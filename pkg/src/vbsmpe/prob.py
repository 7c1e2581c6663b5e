"""Conditional probability tables and the probabilistic objective."""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from math import fsum, prod
from typing import Sequence

from .model import BAYESIAN, Model, Violation

CPT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CptUniverse:
    """p(child | parents) over ``variables = (child, *parents)``.

    ``valuations`` is flat in mixed-radix order: the last listed variable
    varies fastest, the child (listed first) slowest.
    """

    variables: tuple[int, ...]
    valuations: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "valuations", tuple(float(p) for p in self.valuations))

    @property
    def card(self) -> int:
        return len(self.variables)

    @property
    def child(self) -> int:
        return self.variables[0]

    @property
    def parents(self) -> tuple[int, ...]:
        return self.variables[1:]


def flat_index(config: Sequence[int], variables: Sequence[int], sizes: Sequence[int]) -> int:
    """Position of ``config`` restricted to ``variables`` in a flat table.

    ``sizes`` are the frame sizes of the whole model, indexed by variable id.
    Raises IndexError on an out-of-range ordinal.
    """
    last = variables[-1]
    idx = config[last]
    if not 0 <= idx < sizes[last]:
        raise IndexError(f"value {idx} out of range for variable {last}")
    size = sizes[last]
    for j in range(len(variables) - 2, -1, -1):
        var = variables[j]
        val = config[var]
        if not 0 <= val < sizes[var]:
            raise IndexError(f"value {val} out of range for variable {var}")
        idx += size * val
        size *= sizes[var]
    return idx


def strides(variables: Sequence[int], sizes: Sequence[int]) -> tuple[int, ...]:
    """Per-variable multipliers such that ``flat_index == sum(config[v] * s)``."""
    out = [0] * len(variables)
    step = 1
    for j in range(len(variables) - 1, -1, -1):
        out[j] = step
        step *= sizes[variables[j]]
    return tuple(out)


def find_valuation(config: Sequence[int], u: CptUniverse, sizes: Sequence[int]) -> float:
    return u.valuations[flat_index(config, u.variables, sizes)]


def prob_score(config: Sequence[int], model: Model) -> float:
    """Joint probability of ``config``: the product of its CPT entries."""
    if model.kind != BAYESIAN:
        raise ValueError("prob_score needs a bayesian model")
    from .scoring import score

    return score(config, model)


def cpt_violations(u: CptUniverse, model: Model, where: str) -> list[Violation]:
    sizes = model.frame_sizes
    expected = prod(sizes[v] for v in u.variables)
    if len(u.valuations) != expected:
        return [Violation(where, f"table has {len(u.valuations)} entries, expected {expected}")]
    out = []
    bad = [p for p in u.valuations if not 0.0 <= p <= 1.0]
    if bad:
        out.append(Violation(where, f"{len(bad)} entries outside [0, 1]"))
    # child is the slowest axis: column c collects entries c, c + stride, ...
    stride = expected // sizes[u.child]
    broken = []
    for col in range(stride):
        total = fsum(u.valuations[col::stride])
        if abs(total - 1.0) > CPT_TOLERANCE:
            broken.append((col, total))
    if broken:
        shown = ", ".join(f"#{c}={t:.6g}" for c, t in broken[:5])
        more = f" (+{len(broken) - 5} more)" if len(broken) > 5 else ""
        out.append(Violation(where, f"child distribution not normalized in columns {shown}{more}"))
    return out


def bayesian_structure_violations(model: Model) -> list[Violation]:
    """Every variable needs exactly one CPT and the parent graph must be acyclic."""
    out = []
    owners: dict[int, list[int]] = {}
    for i, u in enumerate(model.universes):
        owners.setdefault(u.child, []).append(i)
    for var in model.variables:
        got = owners.get(var.id, [])
        if not got:
            out.append(Violation(f"variable {var.name!r}", "no CPT"))
        elif len(got) > 1:
            out.append(Violation(f"variable {var.name!r}", f"several CPTs: universes {got}"))
    if out:
        return out

    graph = {u.child: u.parents for u in model.universes}
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        names = [model.variables[v].name for v in exc.args[1]]
        out.append(Violation("model", f"parent graph has a cycle: {' -> '.join(names)}"))
    return out
