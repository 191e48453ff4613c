"""JSON reading and writing for algebras, quivers, representations and
reports.  Scalars are written as ``"p/q"`` strings (Gaussian rationals as
``{"re", "im"}``) and every report carries ``schema_version``."""

import json
from pathlib import Path

from . import fixtures
from .dga import DgAlgebra
from .fields import field_from_spec, format_scalar
from .quiver import PathSeries, Quiver, QuiverError, Representation, word_from_json

SCHEMA_VERSION = 1


class FixtureError(ValueError):
    """Malformed or inconsistent input; ``location`` says where."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FixtureError(str(exc), str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dump_json(obj, path):
    Path(path).write_text(dumps(obj))


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise FixtureError(f"missing key {key!r}", where)
    return obj[key]


BUILTIN_DGAS = {
    "cy3": lambda F, o: fixtures.cy3_exterior(F),
    "massey": lambda F, o: fixtures.massey_dga(F),
    "matrix_exterior": lambda F, o: fixtures.matrix_exterior(int(o.get("k", 2)), F),
    "random_lie": lambda F, o: fixtures.random_lie_dga(int(o.get("seed", 0)), F),
}


def dga_from_json(obj, field, where="dga"):
    """Either ``{"builtin": name, ...}`` or explicit tables keyed by basis
    names: ``differential {x: {y: c}}``, ``product [[a, b, {c: coeff}]]``,
    ``pairing [[a, b, c]]``, optional ``blocks`` and ``unit``."""
    if not isinstance(obj, dict):
        raise FixtureError("expected an object", where)
    if "builtin" in obj:
        name = obj["builtin"]
        if name not in BUILTIN_DGAS:
            raise FixtureError(f"unknown builtin {name!r}", f"{where}.builtin")
        return BUILTIN_DGAS[name](field, obj)
    names = _require(obj, "names", where)
    degrees = _require(obj, "degrees", where)
    if not isinstance(names, list) or not isinstance(degrees, list):
        raise FixtureError("names and degrees must be lists", where)
    idx = {n: k for k, n in enumerate(names)}

    def look(n, loc):
        if n not in idx:
            raise FixtureError(f"unknown basis element {n!r}", loc)
        return idx[n]

    try:
        diff = {}
        for src, vec in obj.get("differential", {}).items():
            diff[look(src, f"{where}.differential")] = {look(t, f"{where}.differential.{src}"): field.parse(c)
                                                        for t, c in vec.items()}
        prod = {}
        for k, entry in enumerate(obj.get("product", [])):
            loc = f"{where}.product[{k}]"
            if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], dict)):
                raise FixtureError("expected [a, b, {c: coeff}]", loc)
            a, b, vec = entry
            prod[(look(a, loc), look(b, loc))] = {look(t, loc): field.parse(c) for t, c in vec.items()}
        pairing = {}
        for k, entry in enumerate(obj.get("pairing", [])):
            loc = f"{where}.pairing[{k}]"
            if not (isinstance(entry, list) and len(entry) == 3):
                raise FixtureError("expected [a, b, coeff]", loc)
            pairing[(look(entry[0], loc), look(entry[1], loc))] = field.parse(entry[2])
        unit = obj.get("unit")
        unit = look(unit, f"{where}.unit") if unit is not None else None
        return DgAlgebra(names, degrees, diff, prod, field, obj.get("blocks"), unit, pairing)
    except FixtureError:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FixtureError(str(exc), where) from None


def dga_to_json(A):
    names = A.names
    out = {"names": list(names), "degrees": list(A.degrees)}
    out["differential"] = {names[k]: {names[j]: format_scalar(c) for j, c in sorted(v.items())}
                           for k, v in sorted(A.d.items())}
    out["product"] = [[names[a], names[b], {names[j]: format_scalar(c) for j, c in sorted(v.items())}]
                      for a, row in sorted(A.mul.items()) for b, v in sorted(row.items())]
    if A.pairing:
        out["pairing"] = [[names[a], names[b], format_scalar(c)] for (a, b), c in sorted(A.pairing.items())]
    if A.blocks is not None:
        out["blocks"] = [list(b) for b in A.blocks]
    if A.unit is not None:
        out["unit"] = names[A.unit]
    return out


def ainf_to_json(ainf, max_arity=None):
    N = max_arity or ainf.max_arity
    names = ainf.names
    out = {}
    for n in range(2, N + 1):
        out[str(n)] = [[[names[k] for k in key], names[j], format_scalar(c)]
                       for key, j, c in ainf.structure_constants(n)]
    return out


def quiver_from_json(obj, where="quiver"):
    try:
        return Quiver.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(str(exc), where) from None


def series_from_json(quiver, obj, field, where="relation"):
    try:
        if isinstance(obj, dict):
            return PathSeries.from_json(quiver, obj, field)
        # shorthand: list of [edge list, coeff]
        order = max((len(w) for w, _ in obj), default=0)
        return PathSeries.from_terms(quiver, order,
                                     [(word_from_json(quiver, w).edges or word_from_json(quiver, w), field.parse(c))
                                      for w, c in obj], None, field)
    except (KeyError, TypeError, ValueError, QuiverError) as exc:
        raise FixtureError(str(exc), where) from None


def relations_from_json(quiver, objs, field, where="relations"):
    return [series_from_json(quiver, o, field, f"{where}[{k}]") for k, o in enumerate(objs or [])]


def representation_from_json(quiver, obj, field, where="representation"):
    try:
        return Representation.from_json(quiver, obj, field)
    except (KeyError, TypeError, ValueError, QuiverError) as exc:
        raise FixtureError(str(exc), where) from None


def field_from_json(spec, where="field"):
    try:
        return field_from_spec(spec)
    except ValueError as exc:
        raise FixtureError(str(exc), where) from None


def report(command, verdicts, **payload):
    out = {"schema_version": SCHEMA_VERSION, "command": command,
           "verdicts": [v.to_json() for v in verdicts]}
    out.update(payload)
    return out
