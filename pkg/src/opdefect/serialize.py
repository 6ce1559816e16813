"""JSON documents: matrix input files and report output.

Reals are written with 17 significant digits (``format(x, '.17g')``), which
round-trips every double exactly. Complex scalars are ``[re, im]`` pairs and
matrices are row-major lists of such pairs.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import tolerances
from .errors import OpDefectError

__all__ = [
    "MatrixFormatError",
    "MatrixDocument",
    "ReportDocument",
    "parse_matrix",
    "parse_report",
    "dumps",
    "to_jsonable",
    "matrix_entries",
    "entries_matrix",
]

TOOL_VERSION = "0.1.0"
ROLES = ("operator", "metric")


class MatrixFormatError(OpDefectError, ValueError):
    """A matrix file failed to parse or validate; ``code`` names the reason."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- encoding


def _float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    s = format(x, ".17g")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k), ensure_ascii=False) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        # keep numeric leaves such as [re, im] on one line
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text of a :func:`to_jsonable` tree."""
    return _encode(to_jsonable(obj), indent, 0)


def matrix_entries(M) -> list[list[float]]:
    arr = np.asarray(M, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in arr.reshape(-1)]


def entries_matrix(entries, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


def _matrix(M) -> dict:
    arr = np.asarray(M)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return {"dim": int(arr.shape[0]), "entries": matrix_entries(arr)}
    rows, cols = (arr.shape + (1,))[:2] if arr.ndim == 1 else arr.shape
    return {"rows": int(rows), "cols": int(cols), "entries": matrix_entries(arr)}


def to_jsonable(obj: Any) -> Any:
    """Convert results, arrays and scalars to plain JSON-compatible values."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _matrix(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class MatrixDocument:
    name: str
    dim: int
    entries: tuple[tuple[float, float], ...]
    role: str | None = None

    @property
    def matrix(self) -> np.ndarray:
        return entries_matrix(self.entries, self.dim)

    def to_dict(self) -> dict:
        out = {"name": self.name, "dim": self.dim, "entries": [list(e) for e in self.entries]}
        if self.role is not None:
            out["role"] = self.role
        return out

    def reference(self) -> dict:
        return {"name": self.name, "dim": self.dim, "role": self.role}

    @classmethod
    def from_matrix(cls, name: str, M, role: str | None = None) -> "MatrixDocument":
        arr = np.asarray(M, dtype=complex)
        return cls(name, int(arr.shape[0]), tuple(tuple(e) for e in matrix_entries(arr)), role)


def _number(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MatrixFormatError("SCHEMA", f"entry component {x!r} is not a number")
    return float(x)


def parse_matrix(text: bytes | str) -> MatrixDocument:
    """Parse and validate a matrix document.

    Error codes: ``MALFORMED_JSON``, ``SCHEMA``, ``DIM_MISMATCH``,
    ``NON_FINITE``, ``METRIC_NOT_HERMITIAN``, ``METRIC_NOT_POSITIVE``.
    """
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        doc = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MatrixFormatError("MALFORMED_JSON", f"not valid UTF-8 JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MatrixFormatError("SCHEMA", "top level must be an object")
    for key in ("name", "dim", "entries"):
        if key not in doc:
            raise MatrixFormatError("SCHEMA", f"missing field {key!r}")
    name, dim, entries = doc["name"], doc["dim"], doc["entries"]
    role = doc.get("role")
    if not isinstance(name, str):
        raise MatrixFormatError("SCHEMA", "name must be a string")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MatrixFormatError("SCHEMA", "dim must be a positive integer")
    if role is not None and role not in ROLES:
        raise MatrixFormatError("SCHEMA", f"role must be one of {ROLES}")
    if not isinstance(entries, list):
        raise MatrixFormatError("SCHEMA", "entries must be a list")
    pairs = []
    for e in entries:
        if not isinstance(e, list) or len(e) != 2:
            raise MatrixFormatError("SCHEMA", f"entry {e!r} is not an [re, im] pair")
        pairs.append((_number(e[0]), _number(e[1])))
    if len(pairs) != dim * dim:
        raise MatrixFormatError("DIM_MISMATCH", f"dim {dim} needs {dim * dim} entries, got {len(pairs)}")
    if not all(math.isfinite(a) and math.isfinite(b) for a, b in pairs):
        raise MatrixFormatError("NON_FINITE", "entries must be finite")
    out = MatrixDocument(name, dim, tuple(pairs), role)
    if role == "metric":
        _validate_metric(out.matrix)
    return out


def _validate_metric(P: np.ndarray) -> None:
    tol = tolerances.get()
    skew = np.linalg.norm(P - P.conj().T, "fro")
    if skew > tol.herm_tol * max(1.0, np.linalg.norm(P, "fro")):
        raise MatrixFormatError("METRIC_NOT_HERMITIAN", f"metric is not Hermitian (skew {skew:.3e})")
    w = np.linalg.eigvalsh(0.5 * (P + P.conj().T))
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < tol.psd_tol * scale:
        raise MatrixFormatError("METRIC_NOT_POSITIVE", f"metric is not positive invertible (min eig {w[0]:.3e})")


# ---------------------------------------------------------------- reports


def utc_timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass
class ReportDocument:
    command: str
    tolerances: dict[str, float]
    inputs: list[dict]
    result: Any
    tool_version: str = TOOL_VERSION
    timestamp: str = field(default_factory=utc_timestamp)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "tolerances": self.tolerances,
            "inputs": self.inputs,
            "result": self.result,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return dumps(self) + "\n"


def parse_report(text: bytes | str) -> ReportDocument:
    doc = json.loads(text)
    return ReportDocument(
        command=doc["command"],
        tolerances=doc["tolerances"],
        inputs=doc["inputs"],
        result=doc["result"],
        tool_version=doc["tool_version"],
        timestamp=doc["timestamp"],
    )
