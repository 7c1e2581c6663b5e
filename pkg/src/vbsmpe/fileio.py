"""JSON model and evidence files.

Model document::

    {"kind": "bayesian" | "dst",
     "variables": [{"name": "A", "values": ["a1", "a2"]}, ...],
     "cpts":   [{"child": "A", "parents": ["B"], "table": [...]}, ...],        # bayesian
     "masses": [{"vars": ["B", "A"],
                 "focal": [{"tuples": [["b1", "a1"]], "mass": 0.2}, ...]}]}  # dst

CPT tables are flat with the child slowest-varying and the last parent
fastest. Evidence document: ``{"A": ["a1", "a3"], "H": ["h1"]}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

from .dst import MassUniverse
from .errors import ModelParseError
from .model import BAYESIAN, KINDS, Evidence, Model, Variable
from .prob import CptUniverse


def _need(doc: Mapping, key: str, where: str, kind=None):
    if not isinstance(doc, Mapping):
        raise ModelParseError(f"{where}: expected an object")
    if key not in doc:
        raise ModelParseError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ModelParseError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ModelParseError(f"{where}: expected a number, got {x!r}")
    return float(x)


def parse_model(doc: Mapping[str, Any]) -> Model:
    kind = _need(doc, "kind", "model", str)
    if kind not in KINDS:
        raise ModelParseError(f"model.kind: expected one of {KINDS}, got {kind!r}")
    variables = []
    for i, entry in enumerate(_need(doc, "variables", "model", list)):
        where = f"variables[{i}]"
        name = _need(entry, "name", where, str)
        values = _need(entry, "values", where, list)
        if not all(isinstance(v, str) for v in values):
            raise ModelParseError(f"{where}.values: labels must be strings")
        variables.append(Variable(i, name, tuple(values)))

    ids = {}
    labels = {}
    for v in variables:
        ids.setdefault(v.name, v.id)
        labels.setdefault(v.name, {lab: k for k, lab in enumerate(v.frame)})

    def resolve(name, where):
        if name not in ids:
            raise ModelParseError(f"{where}: unknown variable {name!r}")
        return ids[name]

    universes = []
    if kind == BAYESIAN:
        for i, entry in enumerate(_need(doc, "cpts", "model", list)):
            where = f"cpts[{i}]"
            child = resolve(_need(entry, "child", where, str), f"{where}.child")
            parents = [resolve(p, f"{where}.parents[{j}]") for j, p in enumerate(entry.get("parents", []))]
            table = [_number(x, f"{where}.table[{j}]") for j, x in enumerate(_need(entry, "table", where, list))]
            universes.append(CptUniverse((child, *parents), tuple(table)))
    else:
        sizes = [v.size for v in variables]
        for i, entry in enumerate(_need(doc, "masses", "model", list)):
            where = f"masses[{i}]"
            names = _need(entry, "vars", where, list)
            vids = [resolve(n, f"{where}.vars[{j}]") for j, n in enumerate(names)]
            focal = []
            for k, fe in enumerate(_need(entry, "focal", where, list)):
                fwhere = f"{where}.focal[{k}]"
                tuples = []
                for j, t in enumerate(_need(fe, "tuples", fwhere, list)):
                    if not isinstance(t, list) or len(t) != len(vids):
                        raise ModelParseError(f"{fwhere}.tuples[{j}]: expected {len(vids)} labels")
                    row = []
                    for name, lab in zip(names, t):
                        if lab not in labels[name]:
                            raise ModelParseError(f"{fwhere}.tuples[{j}]: {lab!r} is not a value of {name!r}")
                        row.append(labels[name][lab])
                    tuples.append(tuple(row))
                focal.append((tuples, _number(_need(fe, "mass", fwhere), f"{fwhere}.mass")))
            universes.append(MassUniverse(tuple(vids), tuple(sizes[v] for v in vids), tuple(focal)))
    return Model(tuple(variables), kind, tuple(universes))


def dump_model(model: Model) -> dict[str, Any]:
    names = [v.name for v in model.variables]
    doc: dict[str, Any] = {
        "kind": model.kind,
        "variables": [{"name": v.name, "values": list(v.frame)} for v in model.variables],
    }
    if model.kind == BAYESIAN:
        doc["cpts"] = [
            {"child": names[u.child], "parents": [names[p] for p in u.parents], "table": list(u.valuations)}
            for u in model.universes
        ]
    else:
        doc["masses"] = []
        for u in model.universes:
            frames = [model.variables[v].frame for v in u.variables]
            focal = [
                {"tuples": [[f[x] for f, x in zip(frames, t)] for t in sorted(tuples)], "mass": mass}
                for tuples, mass in u.focal
            ]
            doc["masses"].append({"vars": [names[v] for v in u.variables], "focal": focal})
    return doc


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_model(path) -> Model:
    try:
        return parse_model(_read_json(path))
    except ModelParseError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise ModelParseError(f"{path}: {exc}") from exc


def model_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_evidence(doc: Mapping[str, Any], model: Model) -> Evidence:
    if not isinstance(doc, Mapping):
        raise ModelParseError("evidence: expected an object mapping variable names to value lists")
    allowed = {}
    for name, labels in doc.items():
        try:
            var = model.var(name)
        except KeyError:
            raise ModelParseError(f"evidence.{name}: unknown variable") from None
        if not isinstance(labels, list) or not labels:
            raise ModelParseError(f"evidence.{name}: expected a non-empty list of labels")
        ords = set()
        for lab in labels:
            if lab not in var.frame:
                raise ModelParseError(f"evidence.{name}: {lab!r} is not a value of {name!r}")
            ords.add(var.frame.index(lab))
        allowed[var.id] = frozenset(ords)
    return Evidence(allowed)


def load_evidence(path, model: Model) -> Evidence:
    try:
        return parse_evidence(_read_json(path), model)
    except ModelParseError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise ModelParseError(f"{path}: {exc}") from exc


def dump_evidence(ev: Evidence, model: Model) -> dict[str, list[str]]:
    return {
        model.variables[v].name: [model.variables[v].frame[x] for x in sorted(vals)]
        for v, vals in ev.allowed.items()
    }


def fixture_path(name: str) -> Path:
    """Path of a model or evidence file bundled with the package."""
    return Path(__file__).parent / "data" / name
