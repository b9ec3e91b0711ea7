"""Construction documents: strict JSON parsing, canonical serialization and replay.

A document names a field, a base matroid and an ordered list of operations::

    {"version": 1,
     "field": {"p": 2, "e": 1, "modulus": [0, 1]},
     "base": {"pg": {"n": 4}},
     "ops": [{"extend": {"flat": [0, 1, 2]}}, {"contract": {"set": [15]}}]}

A matrix base is ``{"matrix": {"rows": r, "cols": c, "entries": [...]}}`` with
``r * c`` row-major entries, each a coefficient list of length e, so files
never depend on an element numbering of the field. Column j is element j.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ParseError, PgkitError, ReplayError
from .field import FieldSpec
from .geometry import MAX_PG_ORDER, MAX_PG_RANK, pg, principal_extension, truncate
from .matroid import LinearMatroid, Matroid

VERSION = 1
OP_KINDS = ("extend", "truncate", "delete", "contract")


@dataclass(frozen=True)
class ConstructionDocument:
    field: FieldSpec
    base: tuple  # ("pg", n) or ("matrix", rows, cols, entries as index tuples)
    ops: tuple = field(default=())
    version: int = VERSION

    def with_ops(self, *ops) -> "ConstructionDocument":
        return ConstructionDocument(self.field, self.base, self.ops + tuple(ops), self.version)

    def to_json(self) -> dict:
        if self.base[0] == "pg":
            base = {"pg": {"n": self.base[1]}}
        else:
            _, rows, cols, entries = self.base
            base = {"matrix": {"rows": rows, "cols": cols, "entries": [list(self.field.coeffs(x)) for x in entries]}}
        ops = []
        for kind, arg in self.ops:
            if kind == "extend":
                ops.append({"extend": {"flat": sorted(arg)}})
            elif kind == "truncate":
                ops.append({"truncate": {}})
            else:
                ops.append({kind: {"set": sorted(arg)}})
        return {"version": self.version, "field": self.field.to_json(), "base": base, "ops": ops}


def pg_document(spec: FieldSpec, n: int, ops=()) -> ConstructionDocument:
    return ConstructionDocument(spec, ("pg", n), tuple(ops))


def matrix_document(M: LinearMatroid, ops=()) -> ConstructionDocument:
    """Document for a linear matroid whose ground set is 0..|E|-1."""
    if M.ground != tuple(range(len(M))):
        raise ValueError("matrix documents need identifiers 0..n-1")
    cols = len(M)
    entries = tuple(M.columns[j][i] for i in range(M.rows) for j in range(cols))
    return ConstructionDocument(M.spec, ("matrix", M.rows, cols, entries), tuple(ops))


def canonical_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n").encode()


def serialize(doc: ConstructionDocument) -> bytes:
    return canonical_bytes(doc.to_json())


# -- parsing -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text

    def fail(self, path: str, message: str, key: str | None = None):
        line = None
        if key is not None:
            m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
            if m:
                line = self.text.count("\n", 0, m.start()) + 1
        raise ParseError(message, line=line, path=path)

    def obj(self, v, path: str, required: tuple, optional: tuple = ()) -> dict:
        if not isinstance(v, dict):
            self.fail(path, "expected an object")
        for key in v:
            if key not in required and key not in optional:
                self.fail(f"{path}.{key}", "unknown field", key)
        for key in required:
            if key not in v:
                self.fail(path, f"missing field {key!r}")
        return v

    def int_(self, v, path: str, lo: int | None = None) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(path, "expected an integer")
        if lo is not None and v < lo:
            self.fail(path, f"expected an integer >= {lo}")
        return v

    def int_list(self, v, path: str, lo: int | None = None) -> list[int]:
        if not isinstance(v, list):
            self.fail(path, "expected a list")
        return [self.int_(x, f"{path}[{i}]", lo) for i, x in enumerate(v)]

    def element_set(self, v, path: str) -> tuple[int, ...]:
        items = self.int_list(v, path, 0)
        if len(set(items)) != len(items):
            self.fail(path, "duplicate elements")
        return tuple(sorted(items))

    def document(self, data) -> ConstructionDocument:
        d = self.obj(data, "$", ("version", "field", "base", "ops"))
        version = self.int_(d["version"], "$.version")
        if version != VERSION:
            self.fail("$.version", f"unsupported version {version}")
        f = self.obj(d["field"], "$.field", ("p", "e", "modulus"))
        p = self.int_(f["p"], "$.field.p", 2)
        e = self.int_(f["e"], "$.field.e", 1)
        modulus = self.int_list(f["modulus"], "$.field.modulus", 0)
        try:
            spec = FieldSpec(p, e, tuple(modulus))
        except (PgkitError, ValueError) as exc:
            self.fail("$.field", str(exc))
        base = self.base(d["base"], spec)
        if not isinstance(d["ops"], list):
            self.fail("$.ops", "expected a list")
        ops = tuple(self.op(o, f"$.ops[{i}]") for i, o in enumerate(d["ops"]))
        return ConstructionDocument(spec, base, ops, version)

    def base(self, v, spec: FieldSpec) -> tuple:
        b = self.obj(v, "$.base", (), ("pg", "matrix"))
        if len(b) != 1:
            self.fail("$.base", "expected exactly one of 'pg' or 'matrix'")
        if "pg" in b:
            g = self.obj(b["pg"], "$.base.pg", ("n",))
            return ("pg", self.int_(g["n"], "$.base.pg.n", 1))
        m = self.obj(b["matrix"], "$.base.matrix", ("rows", "cols", "entries"))
        rows = self.int_(m["rows"], "$.base.matrix.rows", 0)
        cols = self.int_(m["cols"], "$.base.matrix.cols", 0)
        entries = m["entries"]
        if not isinstance(entries, list) or len(entries) != rows * cols:
            self.fail("$.base.matrix.entries", f"expected a list of {rows * cols} coefficient lists")
        out = []
        for i, c in enumerate(entries):
            path = f"$.base.matrix.entries[{i}]"
            coeffs = self.int_list(c, path, 0)
            if len(coeffs) != spec.e or any(x >= spec.p for x in coeffs):
                self.fail(path, f"expected {spec.e} coefficients in 0..{spec.p - 1}")
            out.append(spec.index(coeffs))
        return ("matrix", rows, cols, tuple(out))

    def op(self, v, path: str) -> tuple:
        o = self.obj(v, path, (), OP_KINDS)
        if len(o) != 1:
            self.fail(path, f"expected exactly one of {', '.join(OP_KINDS)}")
        (kind, arg), = o.items()
        if kind == "extend":
            a = self.obj(arg, f"{path}.extend", ("flat",))
            return ("extend", self.element_set(a["flat"], f"{path}.extend.flat"))
        if kind == "truncate":
            self.obj(arg, f"{path}.truncate", ())
            return ("truncate", None)
        a = self.obj(arg, f"{path}.{kind}", ("set",))
        return (kind, self.element_set(a["set"], f"{path}.{kind}.set"))


def parse(data: bytes | str) -> ConstructionDocument:
    """Strictly parse a construction document; unknown fields are rejected."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc}") from None
    try:
        obj = json.loads(data, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    except _FloatFound as exc:
        raise ParseError(f"non-integer number {exc.args[0]}") from None
    return _Parser(data).document(obj)


class _FloatFound(Exception):
    pass


def _reject_float(s):
    raise _FloatFound(s)


# -- replay ----------------------------------------------------------------------


def build_base(doc: ConstructionDocument, *, max_rank: int = MAX_PG_RANK, max_order: int = MAX_PG_ORDER) -> Matroid:
    if doc.base[0] == "pg":
        return pg(doc.base[1], doc.field, max_rank=max_rank, max_order=max_order).handle
    _, rows, cols, entries = doc.base
    columns = {j: tuple(entries[i * cols + j] for i in range(rows)) for j in range(cols)}
    return LinearMatroid(doc.field, rows, columns)


def replay(doc: ConstructionDocument, *, max_rank: int = MAX_PG_RANK, max_order: int = MAX_PG_ORDER) -> Matroid:
    """Rebuild the matroid; a failing operation raises ReplayError naming its index."""
    try:
        M = build_base(doc, max_rank=max_rank, max_order=max_order)
    except PgkitError as exc:
        raise ReplayError("base", exc) from exc
    for i, (kind, arg) in enumerate(doc.ops):
        try:
            if kind == "extend":
                M, _e = principal_extension(M, arg)
            elif kind == "truncate":
                M = truncate(M, 1)
            elif kind == "delete":
                M = M.delete(arg)
            else:
                M = M.contract(arg)
        except PgkitError as exc:
            raise ReplayError(i, exc) from exc
    return M


def load(path_or_bytes, **kw) -> Matroid:
    return replay(parse(path_or_bytes), **kw)
