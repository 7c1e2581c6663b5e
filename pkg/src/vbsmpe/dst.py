"""Dempster-Shafer mass functions on multi-variable frames.

Focal sets are frozensets of value-ordinal tuples, each tuple listing one
value per universe variable in ``MassUniverse.variables`` order. All set
operations work on focal elements directly; power sets are never built.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from math import fsum, prod
from typing import Iterable, Sequence

from .errors import CapacityError, TotalConflictError
from .model import DST, Model, Violation

MASS_TOLERANCE = 1e-9
COMBINE_GUARD = 2**24

FocalSet = frozenset  # frozenset[tuple[int, ...]]


@dataclass(frozen=True)
class MassUniverse:
    """A basic probability assignment over the variables in ``variables``.

    ``sizes`` are the frame sizes of those variables, so the universe is
    self-contained. Zero-mass focal sets are dropped on construction.
    """

    variables: tuple[int, ...]
    sizes: tuple[int, ...]
    focal: tuple[tuple[FocalSet, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        focal = tuple(
            (frozenset(tuple(int(x) for x in t) for t in tuples), float(mass))
            for tuples, mass in self.focal
            if mass != 0
        )
        object.__setattr__(self, "focal", focal)

    @property
    def frame_size(self) -> int:
        return prod(self.sizes)

    def frame(self) -> list[tuple[int, ...]]:
        """Every tuple of the product frame, in flat-table order."""
        return list(product(*(range(s) for s in self.sizes)))

    def as_dict(self) -> dict[FocalSet, float]:
        return {a: m for a, m in self.focal}


def vacuous(variables: Sequence[int], sizes: Sequence[int]) -> MassUniverse:
    """Total ignorance: all mass on the whole product frame."""
    whole = frozenset(product(*(range(s) for s in sizes)))
    return MassUniverse(tuple(variables), tuple(sizes), ((whole, 1.0),))


@dataclass(frozen=True)
class CommonalityTable:
    """Singleton commonalities of one universe, flat in the CPT layout."""

    variables: tuple[int, ...]
    sizes: tuple[int, ...]
    q: tuple[float, ...]

    def at(self, t: Sequence[int]) -> float:
        idx = 0
        for val, size in zip(t, self.sizes):
            idx = idx * size + val
        return self.q[idx]


def singleton_commonality(m: MassUniverse) -> CommonalityTable:
    """Q({t}) for every tuple t: the mass of focal sets containing t."""
    contributions: dict[tuple[int, ...], list[float]] = defaultdict(list)
    for tuples, mass in m.focal:
        for t in tuples:
            contributions[t].append(mass)
    q = tuple(fsum(contributions.get(t, ())) for t in m.frame())
    return CommonalityTable(m.variables, m.sizes, q)


def commonality(m: MassUniverse, a: Iterable[Sequence[int]]) -> float:
    """Q(A): total mass of focal sets that contain ``a``."""
    a = frozenset(map(tuple, a))
    return fsum(mass for tuples, mass in m.focal if a <= tuples)


def belief(m: MassUniverse, a: Iterable[Sequence[int]]) -> float:
    a = frozenset(map(tuple, a))
    return fsum(mass for tuples, mass in m.focal if tuples <= a)


def plausibility(m: MassUniverse, a: Iterable[Sequence[int]]) -> float:
    # Summed directly rather than as 1 - Bel(complement) so that singletons
    # agree bit-for-bit with singleton_commonality.
    a = frozenset(map(tuple, a))
    return fsum(mass for tuples, mass in m.focal if not tuples.isdisjoint(a))


def complement(m: MassUniverse, a: Iterable[Sequence[int]]) -> frozenset:
    return frozenset(m.frame()) - frozenset(map(tuple, a))


def _join(a: FocalSet, b: FocalSet, a_key: Sequence[int], b_key: Sequence[int], b_rest: Sequence[int]) -> FocalSet:
    """Intersection of the cylindrical extensions of ``a`` and ``b``."""
    grouped: dict[tuple[int, ...], list[tuple[int, ...]]] = defaultdict(list)
    for t in b:
        grouped[tuple(t[i] for i in b_key)].append(tuple(t[i] for i in b_rest))
    out = set()
    for t in a:
        for tail in grouped.get(tuple(t[i] for i in a_key), ()):
            out.add(t + tail)
    return frozenset(out)


def combine(m1: MassUniverse, m2: MassUniverse, guard: int = COMBINE_GUARD) -> tuple[MassUniverse, float]:
    """Dempster's rule. Returns the combined mass over the union of both
    universes (``m1`` variables first, then the new ones of ``m2``) and the
    conflict, i.e. the mass that fell on empty intersections.
    """
    size_of = dict(zip(m1.variables, m1.sizes))
    for v, s in zip(m2.variables, m2.sizes):
        if size_of.setdefault(v, s) != s:
            raise ValueError(f"variable {v} has frame size {size_of[v]} in one universe and {s} in the other")
    extra = [v for v in m2.variables if v not in m1.variables]
    variables = m1.variables + tuple(extra)
    sizes = tuple(size_of[v] for v in variables)
    if prod(sizes) > guard:
        raise CapacityError(f"combined frame has {prod(sizes)} tuples, guard is {guard}")

    common = [v for v in m1.variables if v in m2.variables]
    a_key = [m1.variables.index(v) for v in common]
    b_key = [m2.variables.index(v) for v in common]
    b_rest = [m2.variables.index(v) for v in extra]

    pooled: dict[FocalSet, list[float]] = defaultdict(list)
    conflicting = []
    for a, ma in m1.focal:
        for b, mb in m2.focal:
            c = _join(a, b, a_key, b_key, b_rest)
            if c:
                pooled[c].append(ma * mb)
            else:
                conflicting.append(ma * mb)
    if not pooled:
        raise TotalConflictError("the two mass functions are fully contradictory")
    conflict = fsum(conflicting)
    sums = {c: fsum(ms) for c, ms in pooled.items()}
    # normalizing by the surviving mass equals 1 / (1 - conflict) for exact inputs
    norm = fsum(sums.values())
    focal = tuple((c, s / norm) for c, s in sorted(sums.items(), key=lambda kv: sorted(kv[0])))
    return MassUniverse(variables, sizes, focal), conflict


def marginalize_mass(m: MassUniverse, onto: Sequence[int]) -> MassUniverse:
    """Project every focal set onto ``onto`` and merge equal projections."""
    onto = tuple(onto)
    if not onto:
        raise ValueError("cannot marginalize onto an empty set of variables")
    missing = [v for v in onto if v not in m.variables]
    if missing:
        raise ValueError(f"variables {missing} are not in the universe {m.variables}")
    pos = [m.variables.index(v) for v in onto]
    pooled: dict[FocalSet, list[float]] = defaultdict(list)
    for tuples, mass in m.focal:
        pooled[frozenset(tuple(t[i] for i in pos) for t in tuples)].append(mass)
    focal = tuple((c, fsum(ms)) for c, ms in sorted(pooled.items(), key=lambda kv: sorted(kv[0])))
    return MassUniverse(onto, tuple(m.sizes[i] for i in pos), focal)


def dst_score(config: Sequence[int], model: Model) -> float:
    """Product over universes of the singleton commonality at ``config``.

    Proportional to, not equal to, the joint plausibility of ``config``.
    """
    if model.kind != DST:
        raise ValueError("dst_score needs a dst model")
    from .scoring import score

    return score(config, model)


def mass_violations(u: MassUniverse, model: Model, where: str) -> list[Violation]:
    out = []
    sizes = tuple(model.frame_sizes[v] for v in u.variables)
    if u.sizes != sizes:
        return [Violation(where, f"frame sizes {u.sizes} disagree with the model's {sizes}")]
    if not u.focal:
        return [Violation(where, "no focal sets")]
    for k, (tuples, mass) in enumerate(u.focal):
        if not tuples:
            out.append(Violation(f"{where} focal {k}", "empty focal set"))
        for t in tuples:
            if len(t) != len(u.variables) or any(not 0 <= x < s for x, s in zip(t, sizes)):
                out.append(Violation(f"{where} focal {k}", f"tuple {t} outside the frame"))
                break
        if mass < 0:
            out.append(Violation(f"{where} focal {k}", f"negative mass {mass}"))
    total = fsum(mass for _, mass in u.focal)
    if abs(total - 1.0) > MASS_TOLERANCE:
        out.append(Violation(where, f"masses sum to {total:.12g}, not 1"))
    if len({tuples for tuples, _ in u.focal}) != len(u.focal):
        out.append(Violation(where, "duplicate focal sets"))
    return out
