"""Ingestion and serialization for the command-line tools.

Matrices and vectors arrive as CSV (rows as lines) or JSON nested arrays,
auto-detected by file extension; '-' reads stdin and sniffs the format from
the first nonblank character.  Reports are JSON objects tagged with
"schema": 1 and serialized with sorted keys so identical inputs produce
byte-identical output.
"""

import json
import sys

import numpy as np

from .errors import ParseError, ShapeError
from .lindyn import LtvSystem
from .rfmr import RfmrParams

SCHEMA_VERSION = 1


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc)) from exc


def _looks_like_json(text, path):
    if path != "-":
        if path.endswith(".json"):
            return True
        if path.endswith(".csv"):
            return False
    stripped = text.lstrip()
    return stripped.startswith("[") or stripped.startswith("{")


def _parse_csv_rows(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",") if tok.strip() != ""])
        except ValueError as exc:
            raise ParseError("bad CSV line %r: %s" % (line, exc)) from exc
    return rows


def load_matrix(path):
    """Read a matrix from CSV or JSON nested arrays."""
    text = _read_text(path)
    if _looks_like_json(text, path):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("invalid JSON in %s: %s" % (path, exc)) from exc
    else:
        data = _parse_csv_rows(text)
    try:
        A = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError("matrix entries must be numbers: %s" % exc) from exc
    if A.ndim != 2 or A.size == 0:
        raise ShapeError("expected a nonempty matrix (rows of equal length)")
    return A


def load_vector(path):
    """Read a vector from a JSON array or a single CSV line."""
    text = _read_text(path)
    if _looks_like_json(text, path):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("invalid JSON in %s: %s" % (path, exc)) from exc
    else:
        rows = _parse_csv_rows(text)
        if len(rows) != 1:
            raise ShapeError("expected a single CSV line for a vector")
        data = rows[0]
    try:
        v = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError("vector entries must be numbers: %s" % exc) from exc
    if v.ndim != 1 or v.size == 0:
        raise ShapeError("expected a nonempty flat vector")
    return v


def load_system(path):
    """Read an LTV system spec: {"kind": ..., "matrix"/"matrices", "breakpoints"/"times", ...}."""
    text = _read_text(path)
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON system spec in %s: %s" % (path, exc)) from exc
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParseError("system spec must be a JSON object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return LtvSystem.constant(np.asarray(spec["matrix"], dtype=float))
        if kind == "piecewise_constant":
            return LtvSystem.piecewise_constant(
                spec.get("breakpoints", []),
                [np.asarray(M, dtype=float) for M in spec["matrices"]],
            )
        if kind == "sampled":
            return LtvSystem.sampled(
                spec["times"],
                [np.asarray(M, dtype=float) for M in spec["matrices"]],
                interpolation=spec.get("interpolation", "hold"),
            )
    except KeyError as exc:
        raise ParseError("system spec is missing field %s" % exc) from exc
    except (TypeError, ValueError) as exc:
        raise ParseError("bad system spec: %s" % exc) from exc
    raise ParseError("unknown system kind %r" % kind)


def load_rfmr_spec(path):
    """Read ring-model run parameters: n, lambda, x0, optional z0, horizon, step."""
    text = _read_text(path)
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON parameters in %s: %s" % (path, exc)) from exc
    if not isinstance(spec, dict):
        raise ParseError("ring-model parameters must be a JSON object")
    try:
        params = RfmrParams(n=int(spec["n"]), rates=np.asarray(spec["lambda"], dtype=float))
        x0 = np.asarray(spec["x0"], dtype=float)
        horizon = float(spec["horizon"])
    except KeyError as exc:
        raise ParseError("ring-model parameters are missing field %s" % exc) from exc
    except (TypeError, ValueError) as exc:
        raise ParseError("bad ring-model parameters: %s" % exc) from exc
    z0 = spec.get("z0")
    if z0 is not None:
        z0 = np.asarray(z0, dtype=float)
    step = float(spec["step"]) if "step" in spec else None
    return params, x0, z0, horizon, step


def dumps_report(payload):
    """Serialize a report deterministically (schema tag, sorted keys, newline)."""
    body = dict(payload)
    body.setdefault("schema", SCHEMA_VERSION)
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(x) for x in row) + "\n")


def _format_cell(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def matrix_csv_text(A):
    return "\n".join(",".join(repr(float(x)) for x in row) for row in np.asarray(A)) + "\n"
