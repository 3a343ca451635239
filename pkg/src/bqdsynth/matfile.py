"""Plain-text matrix files.

::

    # optional comments
    unitary 4
    1,0 0,0 0,0 0,0
    ...

Entries are ``re,im`` pairs written with 17 significant digits, which is
enough for an exact round trip of IEEE doubles.
"""

from __future__ import annotations

import math

import numpy as np

from . import lamat
from .errors import ParseError


def format_matrix(m: np.ndarray, comments: tuple[str, ...] = ()) -> str:
    m = np.asarray(m, dtype=complex)
    lines = [f"# {c}" for c in comments]
    lines.append(f"unitary {m.shape[0]}")
    for row in m:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, tol: float | None = None, check_unitary: bool = True) -> np.ndarray:
    body = [ln.strip() for ln in text.splitlines()]
    body = [ln for ln in body if ln and not ln.startswith("#")]
    if not body:
        raise ParseError("empty matrix file")
    head = body[0].split()
    if len(head) != 2 or head[0] != "unitary":
        raise ParseError(f"expected 'unitary <dim>' header, got {body[0]!r}")
    try:
        dim = int(head[1])
    except ValueError as exc:
        raise ParseError(f"bad dimension {head[1]!r}") from exc
    if dim < 1 or dim & (dim - 1):
        raise ParseError(f"dimension {dim} is not a power of two")
    rows = body[1:]
    if len(rows) != dim:
        raise ParseError(f"expected {dim} rows, found {len(rows)}")
    m = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        entries = row.split()
        if len(entries) != dim:
            raise ParseError(f"row {i + 1}: expected {dim} entries, found {len(entries)}")
        for j, e in enumerate(entries):
            parts = e.split(",")
            if len(parts) != 2:
                raise ParseError(f"row {i + 1}: entry {e!r} is not 're,im'")
            try:
                re_, im_ = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ParseError(f"row {i + 1}: entry {e!r} is not numeric") from exc
            if not (math.isfinite(re_) and math.isfinite(im_)):
                raise ParseError(f"row {i + 1}: non-finite entry {e!r}")
            m[i, j] = complex(re_, im_)
    if check_unitary:
        lamat.require_unitary(m, tol)
    return m


def read_matrix(path: str, tol: float | None = None) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), tol)
