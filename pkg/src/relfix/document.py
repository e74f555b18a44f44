"""Instance documents: YAML text <-> ContractionInstance, with positioned diagnostics.

Numbers are read from the raw scalar text (``0.5``, ``1/2``, ``-3``, ``1e-12``)
and converted once to exact fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema
import yaml

from .comparison import Linear, OrderedTable, Rational
from .contraction import DEFAULT_BUDGET, Condition, CondKind, ContractionInstance
from .relation import Relation, RelKind
from .selfmap import Piece, SelfMap
from .solver import DEFAULT_MAX_ITERS, DEFAULT_TOL
from .space import Component, FiniteSet, IntervalUnion, MetricSpace, exact, fmt

_NUMERIC_TAGS = ("tag:yaml.org,2002:int", "tag:yaml.org,2002:float")


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, key: str | None = None):
        self.message, self.line, self.column, self.key = message, line, column, key
        super().__init__(self.render())

    def render(self) -> str:
        where = f"line {self.line}, column {self.column}" if self.line is not None else "document"
        at = f" (at '{self.key}')" if self.key else ""
        return f"{where}{at}: {self.message}"


@dataclass(frozen=True)
class SolverSettings:
    x0: Fraction | None = None
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL


@dataclass(frozen=True)
class InstanceDocument:
    instance: ContractionInstance
    theorems: tuple = ()
    solver: SolverSettings = SolverSettings()
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    name: str = ""
    marks: dict = field(default_factory=dict, compare=False, repr=False)


def _schema() -> dict:
    text = resources.files("relfix").joinpath("data/instance.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _plain(node, path: tuple, marks: dict):
    """Composed YAML node -> plain data; numeric scalars become exact Fractions."""
    marks[path] = node.start_mark
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = k.value if isinstance(k, yaml.ScalarNode) else str(k.value)
            marks[path + (key,)] = k.start_mark
            if key in out:
                raise DocumentError(f"duplicate key '{key}'", k.start_mark.line + 1, k.start_mark.column + 1, key)
            out[key] = _plain(v, path + (key,), marks)
            marks[path + (key,)] = v.start_mark
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_plain(v, path + (i,), marks) for i, v in enumerate(node.value)]
    if node.tag in _NUMERIC_TAGS:
        try:
            return Fraction(node.value.replace("_", ""))
        except ValueError:
            return node.value
    if node.tag == "tag:yaml.org,2002:bool":
        return node.value.lower() in ("true", "yes", "on")
    if node.tag == "tag:yaml.org,2002:null":
        return None
    return node.value


def _error_at(marks: dict, path, message: str) -> DocumentError:
    path = tuple(path)
    while path and path not in marks:
        path = path[:-1]
    mark = marks.get(path)
    key = ".".join(str(p) for p in path) or None
    if mark is None:
        return DocumentError(message, key=key)
    return DocumentError(message, mark.line + 1, mark.column + 1, key)


def _num(value) -> Fraction:
    v = exact(value)
    if isinstance(v, float):
        raise ValueError(f"expected a finite number, got {value}")
    return v


def _pointset(spec: dict):
    if "points" in spec:
        return FiniteSet(tuple(_num(p) for p in spec["points"]))
    return IntervalUnion(tuple(Component.parse(s) for s in spec["intervals"]))


class _Builder:
    def __init__(self, data: dict, marks: dict):
        self.data, self.marks = data, marks

    def section(self, key: str, fn):
        try:
            return fn(self.data[key])
        except DocumentError:
            raise
        except KeyError as exc:
            raise _error_at(self.marks, (key,), f"missing key {exc}") from None
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise _error_at(self.marks, (key,), str(exc)) from None

    def build(self) -> InstanceDocument:
        d = self.data
        metric = d.get("metric", "usual")
        carrier = self.section("space", _pointset)

        def make_space(_):
            if metric == "usual":
                return MetricSpace(carrier)
            return MetricSpace(carrier, tuple(tuple(_num(v) for v in row) for row in metric["matrix"]))

        space = self.section("space", make_space) if "metric" not in d else self.section("metric", make_space)
        y = self.section("subspace_y", lambda s: space.with_carrier(_pointset(s))) if "subspace_y" in d else space
        relation = self.section("relation", lambda r: _relation(space, r))
        f = self.section("map", _map)
        self.section("map", lambda _: f.check_partition(space))
        phi = self.section("phi", _phi) if "phi" in d else None
        condition = self.section("condition", _condition)
        name = d.get("name", "")

        def make_instance(_):
            return ContractionInstance(space, relation, f, condition, phi, y, name)

        if condition.needs_phi and phi is None:
            raise _error_at(self.marks, ("condition", "kind"), f"{condition.kind.value} needs a 'phi' section")
        if phi is not None and not condition.needs_phi:
            raise _error_at(self.marks, ("phi",), f"{condition.kind.value} takes no comparison function")
        inst = self.section("subspace_y" if "subspace_y" in d else "map", make_instance)
        solver = self.section("solver", _solver) if "solver" in d else SolverSettings()
        if solver.x0 is not None and not space.contains(solver.x0):
            raise _error_at(self.marks, ("solver", "x0"), f"x0 = {fmt(solver.x0)} is outside the carrier")
        return InstanceDocument(
            inst, tuple(d.get("theorems", ())), solver, int(d.get("budget", DEFAULT_BUDGET)), int(d.get("seed", 0)), name, self.marks,
        )


def _relation(space: MetricSpace, spec: dict) -> Relation:
    kind = RelKind(spec["kind"])
    if kind is RelKind.PAIRS:
        if "pairs" not in spec:
            raise ValueError("a pairs relation needs a 'pairs' list")
        return Relation.of_pairs(space, [(_num(x), _num(y)) for x, y in spec["pairs"]])
    if "pairs" in spec:
        raise ValueError(f"a {kind.value} relation takes no 'pairs' list")
    return Relation(kind, space)


def _map(spec: dict) -> SelfMap:
    if "table" in spec:
        return SelfMap(table=tuple((_num(x), _num(y)) for x, y in spec["table"]))
    return SelfMap(pieces=tuple(Piece(Component.parse(p["domain"]), _num(p["slope"]), _num(p["intercept"])) for p in spec["pieces"]))


def _phi(spec: dict):
    family = spec["family"]
    extra = set(spec) - {"family", {"linear": "k", "rational": "c", "table": "points"}[family]} - ({"a"} if family == "rational" else set())
    if extra:
        raise ValueError(f"{family} comparison function takes no {', '.join(sorted(extra))}")
    if family == "linear":
        return Linear(_num(spec["k"]))
    if family == "rational":
        return Rational(_num(spec["c"]), _num(spec["a"]) if "a" in spec else None)
    return OrderedTable(tuple((_num(t), _num(v)) for t, v in spec["points"]))


_PARAMS = {
    CondKind.ABC: ("a", "b", "c"),
    CondKind.PHI_M: (),
    CondKind.PHI_N: (),
    CondKind.LAMBDA_N: (),
}


def _condition(spec: dict) -> Condition:
    kind = CondKind(spec["kind"])
    names = _PARAMS.get(kind, ("k",))
    extra = set(spec) - {"kind"} - set(names)
    missing = [n for n in names if n not in spec]
    if extra:
        raise ValueError(f"{kind.value} takes no {', '.join(sorted(extra))}")
    if missing:
        raise ValueError(f"{kind.value} needs {', '.join(missing)}")
    return Condition(kind, tuple(_num(spec[n]) for n in names))


def _solver(spec: dict) -> SolverSettings:
    x0 = _num(spec["x0"]) if "x0" in spec else None
    tol = float(_num(spec.get("tol", Fraction(DEFAULT_TOL))))
    if tol <= 0:
        raise ValueError("tol must be positive")
    return SolverSettings(x0, int(spec.get("max_iters", DEFAULT_MAX_ITERS)), tol)


def parse_instance(text: str) -> InstanceDocument:
    """Parse and validate a document; every rejection is a DocumentError carrying a position."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise DocumentError(f"malformed document: {exc.problem or exc}", line, col) from None
    except yaml.reader.ReaderError as exc:
        before = text[: exc.position]
        line, col = before.count("\n") + 1, exc.position - (before.rfind("\n") + 1) + 1
        raise DocumentError(f"malformed document: unacceptable character {exc.character!r}", line, col) from None
    except yaml.YAMLError as exc:
        raise DocumentError(f"malformed document: {exc}", 1, 1) from None
    if node is None:
        raise DocumentError("empty document", 1, 1)
    marks: dict = {}
    data = _plain(node, (), marks)
    if not isinstance(data, dict):
        raise _error_at(marks, (), "the document must be a mapping")
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        path = tuple(err.absolute_path)
        msg = err.message
        if err.validator == "additionalProperties":
            unknown = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            if unknown:
                path, msg = path + (unknown[0],), f"unknown key '{unknown[0]}'"
        raise _error_at(marks, path, msg)
    return _Builder(data, marks).build()


def _text(x) -> str | int:
    x = exact(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return fmt(x)


def to_data(doc: InstanceDocument) -> dict:
    inst = doc.instance
    space = inst.space

    def pointset(s):
        if isinstance(s, FiniteSet):
            return {"points": [_text(p) for p in s.points()]}
        return {"intervals": [str(c) if not c.is_degenerate else f"[{fmt(c.lo)}, {fmt(c.lo)}]" for c in s.components]}

    out: dict = {}
    if doc.name:
        out["name"] = doc.name
    out["space"] = pointset(space.carrier)
    if space.matrix is not None:
        out["metric"] = {"matrix": [[_text(v) for v in row] for row in space.matrix]}
    if inst.y != space:
        out["subspace_y"] = pointset(inst.y.carrier)
    rel = inst.relation
    out["relation"] = {"kind": rel.kind.value}
    if rel.kind is RelKind.PAIRS:
        out["relation"]["pairs"] = [[_text(x), _text(y)] for x, y in rel.sorted_pairs()]
    f = inst.f
    if f.table:
        out["map"] = {"table": [[_text(x), _text(y)] for x, y in f.table]}
    else:
        out["map"] = {"pieces": [{"domain": str(p.domain) if not p.domain.is_degenerate else f"[{fmt(p.domain.lo)}, {fmt(p.domain.lo)}]",
                                  "slope": _text(p.slope), "intercept": _text(p.intercept)} for p in f.pieces]}
    phi = inst.phi
    if isinstance(phi, Linear):
        out["phi"] = {"family": "linear", "k": _text(phi.k)}
    elif isinstance(phi, Rational):
        out["phi"] = {"family": "rational", "c": _text(phi.c), "a": _text(phi.a)}
    elif isinstance(phi, OrderedTable):
        out["phi"] = {"family": "table", "points": [[_text(t), _text(v)] for t, v in phi.points]}
    cond = inst.condition
    out["condition"] = {"kind": cond.kind.value}
    for name, value in zip(_PARAMS.get(cond.kind, ("k",)), cond.params):
        out["condition"][name] = _text(value)
    if doc.theorems:
        out["theorems"] = list(doc.theorems)
    s = doc.solver
    solver: dict = {}
    if s.x0 is not None:
        solver["x0"] = _text(s.x0)
    if s.max_iters != DEFAULT_MAX_ITERS:
        solver["max_iters"] = s.max_iters
    if s.tol != DEFAULT_TOL:
        solver["tol"] = repr(s.tol)
    if solver:
        out["solver"] = solver
    if doc.budget != DEFAULT_BUDGET:
        out["budget"] = doc.budget
    if doc.seed:
        out["seed"] = doc.seed
    return out


def serialize(doc: InstanceDocument) -> str:
    return yaml.safe_dump(to_data(doc), sort_keys=False, allow_unicode=True, default_flow_style=None)


BUILTIN = {"example4.1": "example4.1.yaml", "example4.2": "example4.2.yaml", "example4.3": "example4.3.yaml"}


def builtin_text(name: str) -> str:
    key = name if name.startswith("example") else f"example{name}"
    if key not in BUILTIN:
        raise KeyError(name)
    return resources.files("relfix").joinpath(f"data/{BUILTIN[key]}").read_text(encoding="utf-8")


def load(source: str) -> InstanceDocument:
    """A built-in example name (``example4.1``) or a path to a document."""
    if source in BUILTIN:
        return parse_instance(builtin_text(source))
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {source}: {exc.strerror}") from None
    return parse_instance(text)
