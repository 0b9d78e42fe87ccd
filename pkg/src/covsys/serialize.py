"""JSON encoding of complex matrices and deterministic report dumps.

Complex scalars travel as [re, im] pairs, complex matrices as nested arrays of
such pairs, so every file the tool reads or writes is plain JSON.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import InputError


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[x.real, x.imag] for x in row] for row in m.tolist()]


def matrix_from_json(data):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed complex matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InputError("complex matrix must be nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def real_matrix_from_json(data, shape=None):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed real matrix: {exc}") from exc
    if shape is not None and arr.shape != shape:
        raise InputError(f"expected shape {shape}, got {arr.shape}")
    return arr


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def sha256_of(obj) -> str:
    return hashlib.sha256(dumps_canonical(obj).encode()).hexdigest()


def _complex_nested(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    return [_complex_nested(v) for v in value]


def jsonable(value):
    """Recursively convert numpy scalars/arrays into JSON-ready python values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return _complex_nested(value.tolist())
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return complex_to_json(value)
    return value
