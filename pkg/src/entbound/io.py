"""
JSON documents for matrices and measurement records.

Matrix document::

    {"local_dims": [2, 2],
     "matrix": [[re, im], [re, im], ...]}          # row-major, d*d pairs

Record document::

    {"local_dims": [3, 3],
     "observables": {"W": [[re, im], ...]},        # row-major, d*d pairs
     "means": {"W": -0.5667}}

Parse failures raise :class:`RecordFormatError` carrying the offending field
and, where it can be located, the 1-based line of the source text.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import EntboundError, RecordFormatError
from .qcore import MeasurementRecord, Observable, TensorStructure

__all__ = [
    "parse_matrix",
    "parse_record",
    "load_matrix",
    "load_record",
    "dump_matrix",
    "dump_record",
]


def _line_of(text: str, key: str, after: str | None = None) -> int | None:
    """Line of the first ``"key":`` (optionally past the first ``"after":``)."""
    start = 0
    if after is not None:
        m = re.search(r'"' + re.escape(after) + r'"\s*:', text)
        start = m.end() if m else 0
    m = re.compile(r'"' + re.escape(key) + r'"\s*:').search(text, start)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def _load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordFormatError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise RecordFormatError("top level must be an object", line=1)
    return doc


def _structure(doc: dict, text: str) -> TensorStructure:
    if "local_dims" not in doc:
        raise RecordFormatError("missing", field="local_dims")
    dims = doc["local_dims"]
    line = _line_of(text, "local_dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise RecordFormatError("must be a list of integers", field="local_dims", line=line)
    try:
        return TensorStructure(tuple(dims))
    except EntboundError as exc:
        raise RecordFormatError(str(exc), field="local_dims", line=line) from exc


def _complex_matrix(entries, d: int, field: str, line: int | None) -> np.ndarray:
    if not isinstance(entries, list):
        raise RecordFormatError("must be a list of [re, im] pairs", field=field, line=line)
    if len(entries) != d * d:
        raise RecordFormatError(f"expected {d * d} entries, got {len(entries)}", field=field, line=line)
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise RecordFormatError("entries must be numeric [re, im] pairs", field=field, line=line) from exc
    if arr.shape != (d * d, 2):
        raise RecordFormatError("entries must be [re, im] pairs", field=field, line=line)
    if not np.all(np.isfinite(arr)):
        raise RecordFormatError("entries must be finite", field=field, line=line)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(d, d)


def parse_matrix(text: str) -> tuple[np.ndarray, TensorStructure]:
    """Matrix and structure from a matrix document."""
    doc = _load_json(text)
    structure = _structure(doc, text)
    if "matrix" not in doc:
        raise RecordFormatError("missing", field="matrix")
    m = _complex_matrix(doc["matrix"], structure.total_dim, "matrix", _line_of(text, "matrix"))
    return m, structure


def parse_record(text: str) -> MeasurementRecord:
    """Measurement record from a record document; entries follow the ``observables`` order."""
    doc = _load_json(text)
    structure = _structure(doc, text)
    for key in ("observables", "means"):
        if key not in doc:
            raise RecordFormatError("missing", field=key)
        if not isinstance(doc[key], dict) or not doc[key]:
            raise RecordFormatError("must be a non-empty object", field=key, line=_line_of(text, key))
    obs, means = doc["observables"], doc["means"]
    extra = set(means) - set(obs)
    if extra:
        name = sorted(extra)[0]
        raise RecordFormatError(
            "mean given for an unknown observable", field=f"means.{name}", line=_line_of(text, name, "means")
        )
    entries = []
    for name, raw in obs.items():
        field = f"observables.{name}"
        line = _line_of(text, name, "observables")
        m = _complex_matrix(raw, structure.total_dim, field, line)
        try:
            o = Observable(m, structure)
        except EntboundError as exc:
            raise RecordFormatError(str(exc), field=field, line=line) from exc
        if name not in means:
            raise RecordFormatError("missing mean value", field=f"means.{name}")
        w = means[name]
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not np.isfinite(w):
            raise RecordFormatError("must be a finite number", field=f"means.{name}", line=_line_of(text, name, "means"))
        entries.append((o, float(w)))
    try:
        return MeasurementRecord(tuple(entries))
    except EntboundError as exc:
        raise RecordFormatError(str(exc), field="means") from exc


def load_matrix(path) -> tuple[np.ndarray, TensorStructure]:
    return parse_matrix(Path(path).read_text())


def load_record(path) -> MeasurementRecord:
    return parse_record(Path(path).read_text())


def _pairs(m: np.ndarray, indent: str) -> str:
    """Row-major ``[re, im]`` pairs, one per line."""
    flat = np.asarray(m, dtype=complex).reshape(-1)
    items = [f"{indent}  [{json.dumps(float(z.real))}, {json.dumps(float(z.imag))}]" for z in flat]
    return "[\n" + ",\n".join(items) + f"\n{indent}]"


def dump_matrix(matrix: np.ndarray, structure: TensorStructure) -> str:
    return (
        "{\n"
        f' "local_dims": {json.dumps(list(structure.local_dims))},\n'
        f' "matrix": {_pairs(matrix, " ")}\n'
        "}\n"
    )


def dump_record(record: MeasurementRecord, names=None) -> str:
    names = list(names) if names is not None else [f"W{k}" for k in range(len(record))]
    if len(names) != len(record):
        raise ValueError("one name per record entry is required")
    obs = ",\n".join(f"  {json.dumps(n)}: {_pairs(o.matrix, '  ')}" for n, (o, _) in zip(names, record.entries))
    means = ", ".join(f"{json.dumps(n)}: {json.dumps(w)}" for n, (_, w) in zip(names, record.entries))
    return (
        "{\n"
        f' "local_dims": {json.dumps(list(record.structure.local_dims))},\n'
        f' "observables": {{\n{obs}\n }},\n'
        f' "means": {{{means}}}\n'
        "}\n"
    )
