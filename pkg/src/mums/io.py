"""Model-file parsing and result serialization.

Models live on disk as JSON documents with the structural fields
``n_controls``, ``control_names``, ``A0``, ``A1`` (row-major nested
arrays), ``B0``, ``B1``, ``C0``, ``D0`` (flat arrays) and the scalars
``rho``, ``e``, ``p``, all numbers being IEEE-754 doubles.  A document
may additionally carry ``shock``, ``horizon`` and ``beta`` defaults for
the command line.  Unknown fields are rejected.

Serialization is lossless: parse -> emit -> parse reproduces every
number bit for bit (floats are emitted in shortest round-trip form, CSV
numbers with 17 significant digits).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ModelValidationError
from .model import ModelSpec, validate_model

__all__ = [
    "ModelDocument",
    "parse_document",
    "parse_model",
    "load_document",
    "document_to_json",
    "format_number",
    "csv_lines",
]

REQUIRED_FIELDS = (
    "n_controls",
    "control_names",
    "A0",
    "A1",
    "B0",
    "B1",
    "C0",
    "D0",
    "rho",
    "e",
    "p",
)
OPTIONAL_FIELDS = ("shock", "horizon", "beta")


@dataclass(frozen=True)
class ModelDocument:
    """A parsed model file: the model plus optional run defaults."""

    spec: ModelSpec
    shock: float | None = None
    horizon: int | None = None
    beta: float | None = None


def _require_number(data: dict, key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"field {key!r} must be a number, got {type(value).__name__}")
    return float(value)


def _require_flat_numbers(data: dict, key: str) -> list[float]:
    value = data[key]
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise InputError(f"field {key!r} must be a flat array of numbers")
    return [float(v) for v in value]


def _require_matrix(data: dict, key: str) -> list[list[float]]:
    value = data[key]
    if not isinstance(value, list) or any(not isinstance(row, list) for row in value):
        raise InputError(f"field {key!r} must be a nested (row-major) array of numbers")
    rows = []
    for row in value:
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in row):
            raise InputError(f"field {key!r} must contain numbers only")
        rows.append([float(v) for v in row])
    return rows


def parse_document(text: str) -> ModelDocument:
    """Parse a model document, enforcing the schema strictly.

    Raises :class:`~mums.errors.InputError` for malformed JSON (with the
    position), missing or unknown fields and type mismatches, and
    :class:`~mums.errors.ModelValidationError` when the parsed model
    fails its invariants.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise InputError("model document must be a JSON object")

    missing = [key for key in REQUIRED_FIELDS if key not in data]
    if missing:
        raise InputError(f"missing required field(s): {', '.join(missing)}")
    unknown = sorted(set(data) - set(REQUIRED_FIELDS) - set(OPTIONAL_FIELDS))
    if unknown:
        raise InputError(f"unknown field(s): {', '.join(unknown)}")

    n_controls = data["n_controls"]
    if isinstance(n_controls, bool) or not isinstance(n_controls, int):
        raise InputError("field 'n_controls' must be an integer")
    names = data["control_names"]
    if not isinstance(names, list) or any(not isinstance(n, str) for n in names):
        raise InputError("field 'control_names' must be an array of strings")

    spec = ModelSpec(
        n_controls=n_controls,
        control_names=tuple(names),
        A0=_require_matrix(data, "A0"),
        A1=_require_matrix(data, "A1"),
        B0=_require_flat_numbers(data, "B0"),
        B1=_require_flat_numbers(data, "B1"),
        C0=_require_flat_numbers(data, "C0"),
        D0=_require_flat_numbers(data, "D0"),
        rho=_require_number(data, "rho"),
        e=_require_number(data, "e"),
        p=_require_number(data, "p"),
    )
    violations = validate_model(spec)
    if violations:
        raise ModelValidationError(violations)

    shock = None
    if "shock" in data:
        shock = _require_number(data, "shock")
        if not math.isfinite(shock) or shock == 0.0:
            raise InputError(f"field 'shock' must be finite and nonzero, got {shock}")
    horizon = None
    if "horizon" in data:
        horizon = data["horizon"]
        if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 1:
            raise InputError("field 'horizon' must be a positive integer")
    beta = None
    if "beta" in data:
        beta = _require_number(data, "beta")
        if not 0.0 < beta < 1.0:
            raise InputError(f"field 'beta' must lie in (0, 1), got {beta}")
    return ModelDocument(spec=spec, shock=shock, horizon=horizon, beta=beta)


def parse_model(text: str) -> ModelSpec:
    """Parse a model document and return just the validated model."""
    return parse_document(text).spec


def load_document(path: str | Path) -> ModelDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from None
    return parse_document(text)


def document_to_json(document: ModelDocument) -> str:
    """Serialize a document; floats keep their exact values on re-parse."""
    spec = document.spec
    data: dict = {
        "n_controls": spec.n_controls,
        "control_names": list(spec.control_names),
        "A0": spec.A0.tolist(),
        "A1": spec.A1.tolist(),
        "B0": spec.B0.tolist(),
        "B1": spec.B1.tolist(),
        "C0": spec.C0.tolist(),
        "D0": spec.D0.tolist(),
        "rho": spec.rho,
        "e": spec.e,
        "p": spec.p,
    }
    for key in OPTIONAL_FIELDS:
        value = getattr(document, key)
        if value is not None:
            data[key] = value
    return json.dumps(data, indent=2) + "\n"


def format_number(value) -> str:
    """CSV number formatting: 17 significant digits, round-trip safe."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def csv_lines(header: list[str], rows) -> str:
    """Render rows (mixed str/number cells) as a CSV string with one header."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(cell if isinstance(cell, str) else format_number(cell) for cell in row)
        )
    return "\n".join(lines) + "\n"
