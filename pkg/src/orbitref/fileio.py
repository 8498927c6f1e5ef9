"""Matrix file format and deterministic report serialisation.

One input format: a JSON object with a field code, optional field
parameters, and a square array of scalar strings.

    {"field": "q",   "rows": [["1", "0"], ["1", "1"]]}
    {"field": "qi",  "rows": [["3/5+4/5i"]]}
    {"field": "gf",  "p": 3, "k": 2, "rows": [["x+1", "0"], ["0", "2"]]}
    {"field": "c64", "tol": 1e-9, "rows": [["1.25-0.5i"]]}

Reports are JSON with sorted keys and no timestamps, so identical inputs
and parameters produce byte-identical output; report_hash is the sha256 of
the canonical report body (the hash field itself excluded).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from .errors import NotPrime, OrbitrefError, ParseError
from .fields import (
    KIND_COMPLEX,
    KIND_FINITE,
    KIND_GAUSSIAN,
    KIND_RATIONALS,
    QI,
    QQ,
    ComplexFloats,
    Field,
    FiniteField,
    parse_gf_modulus,
)
from .linalg import Matrix, embed_matrix

FIELD_CODES = (KIND_RATIONALS, KIND_GAUSSIAN, KIND_FINITE, KIND_COMPLEX)


@dataclass(frozen=True)
class MatrixFile:
    field: Field
    matrix: Matrix
    raw: dict

    @property
    def sha256(self) -> str:
        return hashlib.sha256(canonical_json(self.raw).encode()).hexdigest()


def _build_field(code: str, p: Optional[int], k: Optional[int],
                 tol: Optional[float], modulus: Optional[str]) -> Field:
    if code == KIND_RATIONALS:
        return QQ
    if code == KIND_GAUSSIAN:
        return QI
    if code == KIND_COMPLEX:
        return ComplexFloats(tol if tol is not None else 1e-9)
    if code == KIND_FINITE:
        if p is None:
            raise ParseError("finite-field input needs p")
        kk = k if k is not None else 1
        mod = parse_gf_modulus(p, modulus) if modulus else None
        try:
            return FiniteField(p, kk, mod)
        except (NotPrime, ValueError) as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown field code {code!r}; use one of {FIELD_CODES}")


def load_matrix_data(data: dict) -> MatrixFile:
    if not isinstance(data, dict):
        raise ParseError("matrix file must be a JSON object")
    code = data.get("field")
    if code not in FIELD_CODES:
        raise ParseError(f"missing or unknown field code {code!r}")
    rows = data.get("rows")
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix file needs a nonempty rows array")
    n = len(rows)
    for r in rows:
        if not isinstance(r, list) or len(r) != n:
            raise ParseError("rows must form a square array")
    tol = data.get("tol")
    if tol is not None:
        try:
            tol = float(tol)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad tol {tol!r}") from exc
        if tol <= 0:
            raise ParseError("tol must be positive")
    field = _build_field(code, data.get("p"), data.get("k"), tol,
                         data.get("modulus"))
    try:
        matrix = Matrix.from_values(field, rows)
    except OrbitrefError as exc:
        raise ParseError(f"bad matrix entries: {exc}") from exc
    except TypeError as exc:
        raise ParseError(f"bad matrix entries: {exc}") from exc
    echo = {"field": code, "rows": [[str(v) for v in r] for r in rows]}
    if code == KIND_FINITE:
        echo["p"] = field.p
        echo["k"] = field.k
        if field.k > 1:
            from .fields import format_gf_poly

            echo["modulus"] = format_gf_poly(field.modulus)
    if code == KIND_COMPLEX:
        echo["tol"] = field.tol
    return MatrixFile(field=field, matrix=matrix, raw=echo)


def load_matrix_file(path: str) -> MatrixFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return load_matrix_data(data)


_ESCALATION = {
    (KIND_RATIONALS, KIND_GAUSSIAN),
    (KIND_RATIONALS, KIND_COMPLEX),
    (KIND_GAUSSIAN, KIND_COMPLEX),
}


def escalate_field(mf: MatrixFile, target_code: str,
                   tol: Optional[float] = None) -> MatrixFile:
    """Reinterpret a loaded matrix over a wider field (q -> qi -> c64)."""
    if target_code == mf.field.kind:
        return mf
    if (mf.field.kind, target_code) not in _ESCALATION:
        raise ParseError(
            f"cannot reinterpret a {mf.field.kind} matrix as {target_code}")
    if target_code == KIND_GAUSSIAN:
        field: Field = QI
    else:
        field = ComplexFloats(tol if tol is not None else 1e-9)
    matrix = embed_matrix(mf.matrix, field)
    raw = dict(mf.raw)
    raw["field"] = target_code
    if target_code == KIND_COMPLEX:
        raw["tol"] = field.tol
    return MatrixFile(field=field, matrix=matrix, raw=raw)


def matrix_to_data(M: Matrix) -> dict:
    data = {"field": M.field.kind, "rows": M.to_strings()}
    data.update({k: v for k, v in M.field.describe().items() if k != "field"})
    return data


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True)


def render_report(report: dict) -> str:
    """Canonical pretty JSON with the self-excluding report hash filled in."""
    body = dict(report)
    body.pop("report_hash", None)
    body["report_hash"] = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
