"""Canonical JSON encoding for the CLI and for report artifacts.

Canonical form: keys sorted, floats rendered with 17 significant
digits, complex numbers as [re, im] pairs.  Identical inputs produce
identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .clark import ClarkSeed
from .errors import DomainError
from .nc_linalg import MatrixTuple
from .realization import FMRealization


def _fmt(x: float) -> str:
    x = float(x)
    if np.isnan(x):
        return "NaN"
    if np.isinf(x):
        # the tokens json.dumps/json.loads use for non-finite values
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def _render(o) -> str:
    if o is None:
        return "null"
    if isinstance(o, bool) or isinstance(o, np.bool_):
        return "true" if o else "false"
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return _fmt(o)
    if isinstance(o, (complex, np.complexfloating)):
        return "[" + _fmt(o.real) + "," + _fmt(o.imag) + "]"
    if isinstance(o, np.ndarray):
        return _render(o.tolist())
    if isinstance(o, dict):
        items = sorted(o.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(json.dumps(str(k)) + ":" + _render(v) for k, v in items) + "}"
    if isinstance(o, (list, tuple)):
        return "[" + ",".join(_render(v) for v in o) + "]"
    raise TypeError(f"cannot render {type(o).__name__} canonically")


def canonical_dumps(obj) -> str:
    return _render(obj)


def to_jsonable(o):
    """Plain-JSON view (complex -> [re, im]); used for pretty printing."""
    if isinstance(o, dict):
        return {str(k): to_jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [to_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return to_jsonable(o.tolist())
    if isinstance(o, (complex, np.complexfloating)):
        return [float(o.real), float(o.imag)]
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return o


def pretty_dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def _c(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(M: np.ndarray) -> list:
    return [[_c(M[i, j]) for j in range(M.shape[1])] for i in range(M.shape[0])]



def _vector_obj(v: np.ndarray) -> list:
    return [_c(z) for z in np.asarray(v).reshape(-1)]


def _as_complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if isinstance(pair, (list, tuple)) and len(pair) == 2:
        return complex(float(pair[0]), float(pair[1]))
    raise DomainError(f"expected [re, im] pair, got {pair!r}")


def _parse_matrix(rows) -> np.ndarray:
    try:
        return np.array([[_as_complex(e) for e in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix: {exc}") from None


def _parse_vector(entries) -> np.ndarray:
    try:
        return np.array([_as_complex(e) for e in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed vector: {exc}") from None


def _need(obj: dict, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise DomainError(f"{what} JSON needs key '{key}'")
    return obj[key]


def encode_tuple(A: MatrixTuple) -> dict:
    return {"d": A.d, "n": A.n, "matrices": [encode_matrix(a) for a in A]}


def decode_tuple(obj: dict) -> MatrixTuple:
    mats = [_parse_matrix(m) for m in _need(obj, "matrices", "MatrixTuple")]
    A = MatrixTuple(tuple(mats))
    for key, val in (("d", A.d), ("n", A.n)):
        if key in obj and int(obj[key]) != val:
            raise DomainError(f"MatrixTuple JSON: '{key}'={obj[key]} but matrices give {val}")
    return A


def encode_fm(fm: FMRealization) -> dict:
    return {
        "A": encode_tuple(fm.A),
        "B": [_vector_obj(b) for b in fm.B],
        "C": _vector_obj(fm.C),
        "D": _c(fm.D),
        "minimal": bool(fm.minimal),
    }


def decode_fm(obj: dict) -> FMRealization:
    A = decode_tuple(_need(obj, "A", "FMRealization"))
    B = tuple(_parse_vector(b) for b in _need(obj, "B", "FMRealization"))
    C = _parse_vector(_need(obj, "C", "FMRealization"))
    D = _as_complex(_need(obj, "D", "FMRealization"))
    return FMRealization(A=A, B=B, C=C, D=D, minimal=bool(obj.get("minimal", False)))


def encode_seed(seed: ClarkSeed) -> dict:
    return {"T": encode_tuple(seed.T), "x": _vector_obj(seed.x), "t": float(seed.t)}


def decode_seed(obj: dict) -> ClarkSeed:
    T = decode_tuple(_need(obj, "T", "ClarkSeed"))
    x = _parse_vector(_need(obj, "x", "ClarkSeed"))
    t = float(obj.get("t", 0.0))
    return ClarkSeed(T=T, x=x, t=t)


def encode_series(coeffs: dict, d: int, maxdeg: int) -> dict:
    table = {",".join(str(i) for i in w): _c(c) for w, c in coeffs.items()}
    return {"d": d, "maxdeg": maxdeg, "coefficients": table}


def decode_series(obj: dict) -> dict:
    table = _need(obj, "coefficients", "PowerSeries")
    out = {}
    for key, val in table.items():
        word = tuple(int(s) for s in key.split(",")) if key else ()
        out[word] = _as_complex(val)
    return out


def loads_checked(text: str, what: str = "input") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed {what} JSON: {exc}") from None
