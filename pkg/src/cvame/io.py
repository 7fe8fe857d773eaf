"""JSON matrix files and report serialization.

A matrix file looks like::

    {"kind": "adjacency", "n": 4, "entries": [["1", "1/2"], ...]}

``kind`` is one of adjacency, generator, stabilizer, rotor, zak. Generators
carry ``k``; Zak files carry a second grid ``entriesP``. Entry strings are
integers, ``p/q``, decimals or ``sqrt(m)`` with an optional sign. An
optional ``"backend": "float"`` marks decimals as floats rather than exact
rationals.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import __version__
from .matcore import EXACT, FLOAT, ExactMatrix, format_scalar, parse_scalar

KINDS = ("adjacency", "generator", "stabilizer", "rotor", "zak")


class MatrixFileError(ValueError):
    pass


@dataclass
class MatrixFile:
    kind: str
    matrix: ExactMatrix
    k: int | None = None
    matrix_p: ExactMatrix | None = None
    extra: dict[str, Any] | None = None

    @property
    def n(self) -> int:
        return self.matrix.ncols if self.kind == "generator" else self.matrix.nrows

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "n": self.n}
        if self.kind == "generator":
            d["k"] = self.matrix.nrows
        if not self.matrix.is_exact and _has_plain_floats(self.matrix):
            d["backend"] = FLOAT
        d["entries"] = grid_strings(self.matrix)
        if self.matrix_p is not None:
            d["entriesP"] = grid_strings(self.matrix_p)
        if self.extra:
            d.update(self.extra)
        return d


def _has_plain_floats(m: ExactMatrix) -> bool:
    return any(isinstance(x, float) for row in m.entries for x in row)


def grid_strings(m: ExactMatrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in m.entries]


# a list of scalars spread over several lines by json.dumps(indent=...)
_FLAT_LIST = re.compile(r'\[\s*\n\s*((?:"[^"\n]*"|[-+\w.]+)(?:,\s*\n\s*(?:"[^"\n]*"|[-+\w.]+))*)\s*\n\s*\]')


def dumps(doc: dict[str, Any]) -> str:
    """Indented JSON with each innermost list (a matrix row) kept on one line."""
    text = json.dumps(doc, indent=2, ensure_ascii=False)
    text = _FLAT_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",\n")) + "]", text)
    return text + "\n"


def write_json(doc: dict[str, Any], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


def _grid(raw, as_float: bool, name: str) -> list[list]:
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise MatrixFileError(f"{name} must be a nonempty list of rows")
    width = len(raw[0])
    if width == 0 or any(len(r) != width for r in raw):
        raise MatrixFileError(f"{name} must be rectangular")
    out = []
    for row in raw:
        parsed = []
        for x in row:
            if not isinstance(x, (str, int)) or isinstance(x, bool):
                raise MatrixFileError(f"entries must be strings, got {x!r}")
            try:
                parsed.append(parse_scalar(str(x), as_float=as_float))
            except ValueError as exc:
                raise MatrixFileError(str(exc)) from None
        out.append(parsed)
    return out


def _matrix(grid, backend: str | None, tol: float | None) -> ExactMatrix:
    try:
        m = ExactMatrix(grid)
        if backend == FLOAT:
            return m.as_float(tol)
        if backend == EXACT and not m.is_exact:
            raise MatrixFileError("exact backend requested but the matrix has sqrt/float entries")
        if tol is not None and not m.is_exact:
            return m.as_float(tol)
        return m
    except MatrixFileError:
        raise
    except ValueError as exc:
        raise MatrixFileError(str(exc)) from None


def parse_matrix_doc(doc: Any, backend: str | None = None, tol: float | None = None) -> MatrixFile:
    """Validate a decoded matrix document and build its matrices.

    ``backend`` overrides the file: ``"exact"`` reads decimals as rationals,
    ``"float"`` demotes everything to floats.
    """
    if not isinstance(doc, dict):
        raise MatrixFileError("matrix file must hold a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise MatrixFileError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFileError("'n' must be a positive integer")
    file_float = doc.get("backend") == FLOAT and backend != EXACT
    m = _matrix(_grid(doc.get("entries"), file_float, "entries"), backend, tol)
    rows, cols = m.shape
    k = doc.get("k")
    m_p = None
    if kind == "generator":
        if k is None:
            k = rows
        if not isinstance(k, int) or (rows, cols) != (k, n) or k > n:
            raise MatrixFileError(f"generator must be k x n = {k} x {n}, got {rows} x {cols}")
    elif kind == "stabilizer":
        if (rows, cols) != (n, 2 * n):
            raise MatrixFileError(f"stabilizer must be {n} x {2 * n}, got {rows} x {cols}")
    else:
        if (rows, cols) != (n, n):
            raise MatrixFileError(f"{kind} matrix must be {n} x {n}, got {rows} x {cols}")
        if not m.is_symmetric():
            raise MatrixFileError(f"{kind} matrix must be symmetric")
        if kind in ("rotor", "zak") and not m.is_integer():
            raise MatrixFileError(f"{kind} matrix must have integer entries")
        if kind == "zak":
            if "entriesP" not in doc:
                raise MatrixFileError("zak file needs 'entriesP'")
            m_p = _matrix(_grid(doc["entriesP"], file_float, "entriesP"), backend, tol)
            if m_p.shape != (n, n) or not m_p.is_symmetric() or not m_p.is_integer():
                raise MatrixFileError("entriesP must be a symmetric integer n x n grid")
    return MatrixFile(kind, m, k if kind == "generator" else None, m_p)


def load_matrix_file(path: str | Path, backend: str | None = None, tol: float | None = None) -> MatrixFile:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path} is not valid JSON: {exc}") from None
    return parse_matrix_doc(doc, backend, tol)


def report(command: str, body: dict[str, Any], backend: str | None = None,
           elapsed: float | None = None) -> dict[str, Any]:
    """Wrap a result in the report envelope with a fixed field order."""
    doc: dict[str, Any] = {"tool": "cvame", "version": __version__, "command": command}
    doc.update(body)
    if backend is not None:
        doc["backend"] = backend
    if elapsed is not None:
        doc["elapsed"] = elapsed
    return doc


def sweep_csv(rows) -> str:
    lines = ["db,fidelity"]
    lines += [f"{db!r},{f!r}" for db, f in rows]
    return "\n".join(lines) + "\n"
