"""JSON kernel files.

    {"dim": 2, "real": [[0.5, 0.1], [0.1, 0.5]], "imag": [[0, 0.2], [-0.2, 0]],
     "metadata": {"name": "example"}}

``imag`` and ``metadata`` are optional.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidMatrix, KernelFileError
from .operators import KernelMatrix, as_kernel


def _plane(data, name: str, d: int) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise KernelFileError(f"'{name}' must be a {d}x{d} array of numbers") from exc
    if arr.shape != (d, d):
        raise KernelFileError(f"'{name}' has shape {arr.shape}, expected ({d}, {d})")
    return arr


def parse_kernel(doc) -> tuple[KernelMatrix, dict]:
    if not isinstance(doc, dict):
        raise KernelFileError("kernel file must hold a JSON object")
    d = doc.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise KernelFileError("'dim' must be a positive integer")
    if "real" not in doc:
        raise KernelFileError("missing 'real'")
    real = _plane(doc["real"], "real", d)
    imag = _plane(doc["imag"], "imag", d) if doc.get("imag") is not None else np.zeros((d, d))
    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise KernelFileError("'metadata' must be an object")
    try:
        return KernelMatrix(real + 1j * imag), metadata
    except InvalidMatrix as exc:
        raise KernelFileError(str(exc)) from exc


def read_kernel(path) -> tuple[KernelMatrix, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise KernelFileError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KernelFileError(f"{path}: invalid JSON: {exc}") from exc
    return parse_kernel(doc)


def kernel_document(K, metadata: dict | None = None) -> dict:
    K = as_kernel(K)
    doc = {"dim": K.dim, "real": K.entries.real.tolist()}
    if np.any(K.entries.imag):
        doc["imag"] = K.entries.imag.tolist()
    if metadata:
        doc["metadata"] = metadata
    return doc


def write_kernel(path, K, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(kernel_document(K, metadata), indent=1) + "\n")
