"""Input documents: JSON schemas and loaders for algebras, modules and tensors."""
from __future__ import annotations

import json
import os
from fractions import Fraction

import jsonschema

from .algpres import FinAlgebra, FinModule, PolyAlgebra, QuotPres
from .exactcore import GF, QQ, ExactError, parse_expr


class DocError(ExactError):
    """Malformed input document; ``path`` locates the offending entry."""

    def __init__(self, msg, path=""):
        super().__init__(msg)
        self.path = path


_NUM = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_VEC = {"type": "array", "items": _NUM}
_MAT = {"type": "array", "items": _VEC}
_TABLE = {"type": "array", "items": {"type": "array", "items": _VEC}}

_FIELD = {"oneOf": [{"const": "Q"},
                    {"type": "object", "properties": {"Fp": {"type": "integer", "minimum": 2}},
                     "required": ["Fp"], "additionalProperties": False}]}

ALGEBRA_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "field": _FIELD,
        "kind": {"enum": ["structure_constants", "polynomial", "quotient"]},
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "table": _TABLE,
        "unit": _VEC,
        "labels": {"type": "array", "items": {"type": "string"}},
        "vars": {"type": "array", "items": {"type": "string", "pattern": r"^[A-Za-z_][A-Za-z_0-9]*$"},
                 "minItems": 1},
        "truncation": {"type": "integer", "minimum": 1},
        "relations": {"type": "array", "items": {"type": "string"}},
        "basis": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "module": {"type": "object", "properties": {"act": {"type": "array", "items": _MAT},
                                                    "name": {"type": "string"}},
                   "required": ["act"], "additionalProperties": False},
        "grading": {"type": "object", "properties": {
            "group": {"enum": ["Z", "Z2", "ZxZ2"]},
            "degrees": {"type": "array"},
            "beta": {"enum": ["parity", "trivial"]}},
            "required": ["group", "degrees"], "additionalProperties": False},
        "algebroid": {"type": "object", "properties": {
            "tautological": {"type": "boolean"},
            "bracket": {"type": "array", "items": _MAT},
            "anchor": {"type": "array", "items": _MAT}}, "additionalProperties": False},
        "diole_bracket": {"type": "object", "properties": {
            "degree": {"type": "integer", "minimum": -2, "maximum": 1},
            "table": _TABLE}, "required": ["degree", "table"], "additionalProperties": False},
        "connection": {"type": "object", "properties": {
            "trivial": {"type": "boolean"},
            "kappa": _MAT,
            "right": {"type": "boolean"}}, "additionalProperties": False},
    },
    "required": ["field", "kind"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"const": "structure_constants"}}},
         "then": {"required": ["dim", "table", "unit"]}},
        {"if": {"properties": {"kind": {"const": "polynomial"}}},
         "then": {"required": ["vars", "truncation"]}},
        {"if": {"properties": {"kind": {"const": "quotient"}}},
         "then": {"required": ["vars", "relations"]}},
    ],
}

TENSOR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "coords": {"type": "array", "items": {"type": "string", "pattern": r"^[A-Za-z_][A-Za-z_0-9]*$"}},
        "tau": {"type": "array", "items": {"type": "array", "items": {"type": ["string", "integer"]}}},
    },
    "required": ["n", "coords", "tau"],
    "additionalProperties": False,
}


def read_document(source: str) -> dict:
    """Inline JSON (starting with '{') or a file path."""
    text = source
    if not source.lstrip().startswith("{"):
        if not os.path.exists(source):
            raise DocError(f"no such document: {source}", "")
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocError(f"invalid JSON: {e.msg} at line {e.lineno}", "") from None


def validate(doc: dict, schema: dict) -> None:
    errs = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errs:
        e = errs[0]
        path = "/" + "/".join(str(p) for p in e.absolute_path)
        raise DocError(f"schema violation at {path}: {e.message}", path)


def field_of(doc: dict):
    f = doc["field"]
    if f == "Q":
        return QQ
    try:
        return GF(f["Fp"])
    except ExactError as e:
        raise DocError(str(e), "/field/Fp") from None


def _num(x):
    return Fraction(x) if isinstance(x, int) else Fraction(x.replace(" ", ""))


def _conv(obj):
    if isinstance(obj, list):
        return [_conv(x) for x in obj]
    return _num(obj)


class Loaded:
    """Parsed algebra document with lazily built derived objects."""

    def __init__(self, doc: dict):
        validate(doc, ALGEBRA_SCHEMA)
        self.doc = doc
        self.F = field_of(doc)
        kind = doc["kind"]
        try:
            if kind == "structure_constants":
                n = doc["dim"]
                if len(doc["table"]) != n or len(doc["unit"]) != n:
                    raise DocError(f"table and unit must have dim = {n} entries", "/table")
                self.algebra = FinAlgebra(self.F, _conv(doc["table"]), _conv(doc["unit"]),
                                          doc.get("labels"), doc.get("name"))
            elif kind == "polynomial":
                self.algebra = PolyAlgebra(self.F, doc["vars"], doc["truncation"])
            else:
                base = PolyAlgebra(self.F, doc["vars"], doc.get("truncation", 8))
                rels = [parse_expr(r, doc["vars"], self.F) for r in doc["relations"]]
                if any(not r.den.is_const() for r in rels):
                    raise DocError("relations must be polynomials", "/relations")
                self.algebra = QuotPres(base, [r.num for r in rels], doc.get("basis"))
        except DocError:
            raise
        except ExactError as e:
            raise DocError(str(e), "/table" if kind == "structure_constants" else "/relations") from None

    @property
    def truncation(self):
        A = self.algebra
        if isinstance(A, PolyAlgebra):
            return A.D
        if isinstance(A, QuotPres):
            return A.base.D
        return None

    def fin(self) -> FinAlgebra:
        """Finite-dimensional model: the algebra itself, the quotient basis, or the truncated carrier."""
        A = self.algebra
        if isinstance(A, FinAlgebra):
            return A
        if isinstance(A, QuotPres):
            if A.basis is None:
                raise DocError("quotient needs a monomial basis for this operation", "/basis")
            return A.to_fin_algebra()
        return A.truncated_carrier()

    def module(self) -> FinModule:
        A = self.fin()
        m = self.doc.get("module")
        if m is None:
            return A.regular_module()
        try:
            return FinModule(A, _conv(m["act"]), m.get("name"))
        except ExactError as e:
            raise DocError(str(e), "/module/act") from None

    def graded(self):
        from .graded import GradedAlgebra
        A = self.fin()
        g = self.doc.get("grading")
        if g is None:
            return GradedAlgebra.trivially_graded(A)
        degs = g["degrees"]
        if len(degs) != A.dim:
            raise DocError("one degree per basis element", "/grading/degrees")
        degs = [tuple(d) if isinstance(d, list) else d for d in degs]
        try:
            return GradedAlgebra(A.F, A.table, A.unit, degs, g["group"], g.get("beta", "parity"),
                                 A.labels, A.name)
        except ExactError as e:
            raise DocError(str(e), "/grading") from None


def load_algebra(source: str) -> Loaded:
    return Loaded(read_document(source))


def load_tensor(source: str):
    from .riemann import CovariantTensor2
    doc = read_document(source)
    validate(doc, TENSOR_SCHEMA)
    try:
        return CovariantTensor2.from_json(doc)
    except ExactError as e:
        raise DocError(str(e), "/tau") from None
