"""Variables, configurations, evidence and the model container.

A configuration is a plain ``tuple[int, ...]`` of value ordinals, one per
variable, in variable-id order. All ordinals are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Mapping, Sequence, Union

BAYESIAN = "bayesian"
DST = "dst"
KINDS = (BAYESIAN, DST)

# Largest frame the artifact accepts for a single variable.
MAX_FRAME_SIZE = 2**16

Configuration = tuple[int, ...]


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    frame: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.frame)

    def ordinal(self, label: str) -> int:
        try:
            return self.frame.index(label)
        except ValueError:
            raise KeyError(f"variable {self.name!r} has no value {label!r}") from None


@dataclass(frozen=True)
class Evidence:
    """Allowed value subsets for constrained variables.

    Variables missing from ``allowed`` are unconstrained. A singleton subset
    is an ordinary probabilistic clamp.
    """

    allowed: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        frozen = {int(v): frozenset(vals) for v, vals in dict(self.allowed).items()}
        for var, vals in frozen.items():
            if not vals:
                raise ValueError(f"empty allowed set for variable {var}")
        object.__setattr__(self, "allowed", dict(sorted(frozen.items())))

    def __hash__(self):
        return hash(tuple(self.allowed.items()))

    def allowed_values(self, model: "Model") -> list[tuple[int, ...]]:
        """Sorted allowed ordinals for every variable of ``model``."""
        out = []
        for var in model.variables:
            if var.id in self.allowed:
                vals = self.allowed[var.id]
                bad = [v for v in vals if not 0 <= v < var.size]
                if bad:
                    raise ValueError(f"evidence on {var.name!r} out of frame: {sorted(bad)}")
                out.append(tuple(sorted(vals)))
            else:
                out.append(tuple(range(var.size)))
        return out

    def space_size(self, model: "Model") -> int:
        return prod(len(vals) for vals in self.allowed_values(model))


def satisfies(config: Sequence[int], ev: Evidence) -> bool:
    return all(config[var] in vals for var, vals in ev.allowed.items())


@dataclass(frozen=True, eq=False)
class Model:
    """A valuation-based system: variables plus local valuations.

    ``universes`` holds :class:`~vbsmpe.prob.CptUniverse` objects for the
    bayesian kind and :class:`~vbsmpe.dst.MassUniverse` objects for dst.
    Construction does no checking; run :func:`validate_model` for that.
    Models hash by identity so that derived tables can be cached per model.
    """

    variables: tuple[Variable, ...]
    kind: str
    universes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "universes", tuple(self.universes))

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def frame_sizes(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.variables)

    def var(self, name_or_id: Union[str, int]) -> Variable:
        if isinstance(name_or_id, int):
            return self.variables[name_or_id]
        for v in self.variables:
            if v.name == name_or_id:
                return v
        raise KeyError(f"unknown variable {name_or_id!r}")

    def config(self, labels: Union[Mapping[str, str], Sequence[str]]) -> Configuration:
        """Build a configuration from labels, by name or positionally."""
        if isinstance(labels, Mapping):
            missing = [v.name for v in self.variables if v.name not in labels]
            if missing:
                raise KeyError(f"no value given for {missing}")
            return tuple(v.ordinal(labels[v.name]) for v in self.variables)
        if len(labels) != self.n:
            raise ValueError(f"expected {self.n} labels, got {len(labels)}")
        return tuple(v.ordinal(lab) for v, lab in zip(self.variables, labels))

    def labels(self, config: Sequence[int]) -> dict[str, str]:
        return {v.name: v.frame[config[v.id]] for v in self.variables}

    def check_config(self, config: Sequence[int]) -> None:
        if len(config) != self.n:
            raise ValueError(f"configuration has {len(config)} values, model has {self.n} variables")
        for v, val in zip(self.variables, config):
            if not 0 <= val < v.size:
                raise IndexError(f"value {val} out of range for {v.name!r} (frame size {v.size})")

    def evidence(self, allowed: Mapping[str, Iterable[str]]) -> Evidence:
        """Build evidence from variable names to allowed labels."""
        out = {}
        for name, labels in allowed.items():
            var = self.var(name)
            out[var.id] = frozenset(var.ordinal(lab) for lab in labels)
        return Evidence(out)


def make_variables(spec: Mapping[str, Sequence[str]] | Sequence[tuple[str, Sequence[str]]]) -> tuple[Variable, ...]:
    """``{"A": ["a1", "a2"], ...}`` -> dense tuple of :class:`Variable`."""
    items = spec.items() if isinstance(spec, Mapping) else spec
    return tuple(Variable(i, name, tuple(frame)) for i, (name, frame) in enumerate(items))


@dataclass(frozen=True)
class Violation:
    where: str
    message: str

    def __str__(self):
        return f"{self.where}: {self.message}"


def validate_model(model: Model) -> list[Violation]:
    """Collect every invariant violation in ``model``; empty means valid."""
    # local imports: the engines import this module
    from .dst import MassUniverse, mass_violations
    from .prob import CptUniverse, bayesian_structure_violations, cpt_violations

    report: list[Violation] = []
    if model.kind not in KINDS:
        report.append(Violation("model", f"unknown kind {model.kind!r}"))
    if not model.variables:
        report.append(Violation("model", "no variables"))
    seen_names = set()
    for pos, var in enumerate(model.variables):
        where = f"variable {var.name!r}"
        if var.id != pos:
            report.append(Violation(where, f"id {var.id} at position {pos}; ids must be 0..n-1"))
        if var.name in seen_names:
            report.append(Violation(where, "duplicate variable name"))
        seen_names.add(var.name)
        if not var.frame:
            report.append(Violation(where, "empty frame"))
        if len(set(var.frame)) != len(var.frame):
            report.append(Violation(where, "duplicate value labels"))
        if len(var.frame) > MAX_FRAME_SIZE:
            report.append(Violation(where, f"frame larger than {MAX_FRAME_SIZE}"))

    expected = CptUniverse if model.kind == BAYESIAN else MassUniverse
    for i, u in enumerate(model.universes):
        where = f"universe {i}"
        if not isinstance(u, expected):
            report.append(Violation(where, f"expected {expected.__name__}, got {type(u).__name__}"))
            continue
        bad_ids = [v for v in u.variables if not 0 <= v < model.n]
        if bad_ids:
            report.append(Violation(where, f"references undeclared variable ids {bad_ids}"))
            continue
        if len(set(u.variables)) != len(u.variables):
            report.append(Violation(where, "repeated variable"))
            continue
        if model.kind == BAYESIAN:
            report.extend(cpt_violations(u, model, where))
        else:
            report.extend(mass_violations(u, model, where))

    if model.kind == BAYESIAN and not report:
        report.extend(bayesian_structure_violations(model))
    return report
