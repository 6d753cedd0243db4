"""Plain-text formats: SYMTENSOR v1, label lines and small dense dumps.

Floats are written with ``repr`` so a parse/serialize round trip is exact.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .exceptions import FormatError
from .tensor import SymmetricTensor, _layout, from_dense, to_dense

__all__ = [
    "format_tensor",
    "parse_tensor",
    "read_tensor",
    "write_tensor",
    "format_labels",
    "parse_labels",
    "read_labels",
    "write_labels",
    "format_dense",
    "parse_dense",
    "DENSE_MAX_N",
]

_HEADER = re.compile(r"^SYMTENSOR v1 n=(\d+) m=(\d+)$")
_DENSE_HEADER = re.compile(r"^DENSETENSOR v1 n=(\d+) m=(\d+)$")
DENSE_MAX_N = 5


def _fmt(value: float) -> str:
    return repr(float(value))


def format_tensor(A: SymmetricTensor) -> str:
    lines = [f"SYMTENSOR v1 n={A.n} m={A.m}"]
    for k in np.flatnonzero(A.values):
        idx = " ".join(str(int(i)) for i in A.indices[k])
        lines.append(f"{idx} {_fmt(A.values[k])}")
    return "\n".join(lines) + "\n"


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"cannot parse value {token!r}", lineno) from None
    if not np.isfinite(value):
        raise FormatError(f"non-finite value {token!r}", lineno)
    return value


def _header(lines: list[str], pattern: re.Pattern, label: str) -> tuple[int, int]:
    if not lines:
        raise FormatError(f"empty file, expected a {label} header", 1)
    match = pattern.match(lines[0].strip())
    if not match:
        raise FormatError(f"expected header '{label} v1 n=<n> m=<m>', got {lines[0].strip()!r}", 1)
    n, m = int(match.group(1)), int(match.group(2))
    if n < 1 or m < 1:
        raise FormatError(f"n and m must be positive, got n={n}, m={m}", 1)
    return n, m


def parse_tensor(text: str) -> SymmetricTensor:
    """Parse SYMTENSOR v1 text.  Lines may come in any order; blank lines are skipped."""
    lines = text.splitlines()
    n, m = _header(lines, _HEADER, "SYMTENSOR")
    layout = _layout(n, m)
    values = np.zeros(layout.size)
    seen: set[tuple[int, ...]] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) != m + 1:
            raise FormatError(f"expected {m} indices and a value, got {len(tokens)} fields", lineno)
        try:
            index = tuple(int(t) for t in tokens[:m])
        except ValueError:
            raise FormatError(f"indices must be integers, got {tokens[:m]}", lineno) from None
        if any(i < 0 or i >= n for i in index):
            raise FormatError(f"index {index} out of range for n={n}", lineno)
        if list(index) != sorted(index):
            raise FormatError(f"indices {index} are not non-decreasing", lineno)
        if index in seen:
            raise FormatError(f"duplicate canonical index {index}", lineno)
        seen.add(index)
        values[layout.position[index]] = _parse_float(tokens[m], lineno)
    return SymmetricTensor(n, m, values)


def read_tensor(path: str | Path) -> SymmetricTensor:
    return parse_tensor(Path(path).read_text())


def write_tensor(A: SymmetricTensor, path: str | Path) -> None:
    Path(path).write_text(format_tensor(A))


def format_labels(y: Iterable[int]) -> str:
    return " ".join(str(int(v)) for v in y) + "\n"


def parse_labels(text: str) -> np.ndarray:
    rows = [line for line in text.splitlines() if line.strip()]
    if len(rows) != 1:
        raise FormatError(f"expected one line of labels, found {len(rows)}")
    try:
        labels = np.array([int(t) for t in rows[0].split()], dtype=np.int64)
    except ValueError:
        raise FormatError("labels must be the integers 1 and -1", 1) from None
    if labels.size == 0 or not np.all(np.abs(labels) == 1):
        raise FormatError("labels must be the integers 1 and -1", 1)
    return labels


def read_labels(path: str | Path) -> np.ndarray:
    return parse_labels(Path(path).read_text())


def write_labels(y: Iterable[int], path: str | Path) -> None:
    Path(path).write_text(format_labels(y))


def format_dense(A: SymmetricTensor) -> str:
    """Every dense entry, one per line, in row-major order of the full index."""
    if A.n > DENSE_MAX_N:
        raise ValueError(f"dense text is limited to n <= {DENSE_MAX_N}, got n={A.n}")
    dense = to_dense(A)
    lines = [f"DENSETENSOR v1 n={A.n} m={A.m}"]
    for index in np.ndindex(dense.shape):
        lines.append(" ".join(map(str, index)) + " " + _fmt(dense[index]))
    return "\n".join(lines) + "\n"


def parse_dense(text: str) -> SymmetricTensor:
    lines = text.splitlines()
    n, m = _header(lines, _DENSE_HEADER, "DENSETENSOR")
    if n > DENSE_MAX_N:
        raise FormatError(f"dense text is limited to n <= {DENSE_MAX_N}, got n={n}", 1)
    dense = np.zeros((n,) * m)
    filled = np.zeros((n,) * m, dtype=bool)
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) != m + 1:
            raise FormatError(f"expected {m} indices and a value, got {len(tokens)} fields", lineno)
        try:
            index = tuple(int(t) for t in tokens[:m])
        except ValueError:
            raise FormatError(f"indices must be integers, got {tokens[:m]}", lineno) from None
        if any(i < 0 or i >= n for i in index):
            raise FormatError(f"index {index} out of range for n={n}", lineno)
        if filled[index]:
            raise FormatError(f"duplicate index {index}", lineno)
        filled[index] = True
        dense[index] = _parse_float(tokens[m], lineno)
    if not filled.all():
        raise FormatError(f"dense text lists {int(filled.sum())} of {filled.size} entries")
    try:
        return from_dense(dense)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dump_json_ready(value: Any) -> Any:
    """Convert numpy scalars/arrays inside nested containers to plain Python."""
    if isinstance(value, dict):
        return {str(k): dump_json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [dump_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value
