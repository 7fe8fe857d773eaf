"""Dense linear algebra over exact rationals with a float64 fallback.

Every rank criterion in the package runs through :class:`ExactMatrix`.
Matrices whose entries are all integers or rationals live on the ``exact``
backend and are reduced with fraction-free (Bareiss) elimination; any float
or ``sqrt(m)`` entry demotes the matrix to the ``float`` backend, where rank
is numerical rank from the singular values.

Mode and row/column labels in the public API are 1-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Iterable, Sequence, Union

import numpy as np

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class Sqrt:
    """``coeff * sqrt(radicand)`` with a square-free radicand >= 2.

    Only integer coefficients arise from the file grammar (``sqrt(8)`` is
    stored as ``2*sqrt(2)`` and printed back as ``sqrt(8)``).
    """

    coeff: int
    radicand: int

    def __float__(self) -> float:
        return self.coeff * math.sqrt(self.radicand)

    def __neg__(self) -> "Sqrt":
        return Sqrt(-self.coeff, self.radicand)

    def __str__(self) -> str:
        sign = "-" if self.coeff < 0 else ""
        return f"{sign}sqrt({self.coeff * self.coeff * self.radicand})"


Scalar = Union[Fraction, Sqrt, float]


def sqrt_scalar(m: int) -> Scalar:
    """Normalized square root of a nonnegative integer: rational if ``m`` is a perfect square."""
    if m < 0:
        raise ValueError(f"sqrt of negative integer {m}")
    coeff, rest = 1, m
    f = 2
    while f * f <= rest:
        while rest % (f * f) == 0:
            coeff *= f
            rest //= f * f
        f += 1
    if rest == 1 or m == 0:
        return Fraction(math.isqrt(m))
    return Sqrt(coeff, rest)


_SCALAR_RE = re.compile(
    r"""^\s*(?P<sign>[+-]?)\s*(?:
        sqrt\(\s*(?P<rad>\d+)\s*\)
      | (?P<num>\d+)\s*/\s*(?P<den>\d+)
      | (?P<dec>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    )\s*$""",
    re.VERBOSE,
)


def parse_scalar(text: str, as_float: bool = False) -> Scalar:
    """Parse an entry string: integer, ``p/q``, decimal or ``sqrt(m)``, optionally signed.

    Decimals are read as exact rationals unless ``as_float`` is set.
    """
    m = _SCALAR_RE.match(text)
    if m is None:
        raise ValueError(f"malformed matrix entry {text!r}")
    neg = m.group("sign") == "-"
    if m.group("rad") is not None:
        value = sqrt_scalar(int(m.group("rad")))
    elif m.group("num") is not None:
        den = int(m.group("den"))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        value = Fraction(int(m.group("num")), den)
    elif as_float:
        value = float(m.group("dec"))
    else:
        value = Fraction(m.group("dec"))
    return -value if neg else value


def format_scalar(x: Scalar) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Sqrt):
        return str(x)
    return repr(float(x))


def to_scalar(x) -> Scalar:
    if isinstance(x, (Fraction, Sqrt)):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, (bool, np.bool_)):
        return Fraction(int(x))
    if isinstance(x, (Integral, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, (Real, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("matrix entries must be finite")
        return x
    raise TypeError(f"unsupported matrix entry {x!r}")


class ExactMatrix:
    """Immutable dense matrix tagged with the backend used for rank decisions.

    Parameters
    ----------
    entries : nested sequence or 2-D array
        Rows of scalars: ints, Fractions, floats, :class:`Sqrt` or entry
        strings.
    backend : {"exact", "float"}, optional
        Inferred when omitted. Requesting ``"exact"`` for a matrix holding
        float or sqrt entries raises ``ValueError``.
    tol : float, optional
        Float-backend rank tolerance overriding the default
        ``max(rows, cols) * eps * sigma_max``.
    """

    __slots__ = ("_scalars", "_ncols", "_array", "backend", "tol")

    def __init__(self, entries, backend: str | None = None, tol: float | None = None):
        if isinstance(entries, ExactMatrix):
            grid = entries._scalars
            ncols = entries._ncols
        else:
            ncols = entries.shape[1] if isinstance(entries, np.ndarray) and entries.ndim == 2 else 0
            if isinstance(entries, np.ndarray) and entries.ndim != 2:
                raise ValueError("matrix must be two-dimensional")
            grid = tuple(tuple(to_scalar(x) for x in row) for row in entries)
        if grid and len({len(row) for row in grid}) != 1:
            raise ValueError("matrix rows must have equal length")
        all_rational = all(isinstance(x, Fraction) for row in grid for x in row)
        if backend is None:
            backend = EXACT if all_rational else FLOAT
        if backend not in (EXACT, FLOAT):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == EXACT and not all_rational:
            raise ValueError("exact backend needs integer/rational entries only")
        if tol is not None and tol < 0:
            raise ValueError("tolerance must be nonnegative")
        self._scalars = grid
        self._ncols = len(grid[0]) if grid else ncols
        self._array = None
        self.backend = backend
        self.tol = tol if backend == FLOAT else None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(np.zeros((rows, cols), dtype=int))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._scalars), self._ncols)

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    @property
    def entries(self) -> tuple[tuple[Scalar, ...], ...]:
        return self._scalars

    @property
    def is_exact(self) -> bool:
        return self.backend == EXACT

    def entry(self, j: int, l: int) -> Scalar:
        """Entry at 1-based position ``(j, l)``."""
        if not (1 <= j <= self.nrows and 1 <= l <= self.ncols):
            raise IndexError(f"entry ({j}, {l}) outside {self.shape}")
        return self._scalars[j - 1][l - 1]

    @property
    def array(self) -> np.ndarray:
        """Read-only numpy view: object array of Fractions (exact) or float64."""
        if self._array is None:
            if self.is_exact:
                a = np.empty(self.shape, dtype=object)
                for i, row in enumerate(self._scalars):
                    for j, x in enumerate(row):
                        a[i, j] = x
            else:
                a = np.array([[float(x) for x in row] for row in self._scalars], dtype=float)
                a = a.reshape(self.shape)
            a.flags.writeable = False
            self._array = a
        return self._array

    def to_float(self) -> np.ndarray:
        return np.array(self.array, dtype=float).reshape(self.shape)

    def as_float(self, tol: float | None = None) -> "ExactMatrix":
        return ExactMatrix(self, backend=FLOAT, tol=tol if tol is not None else self.tol)

    @property
    def T(self) -> "ExactMatrix":
        if not self._scalars:
            return ExactMatrix(np.empty((self._ncols, 0)), backend=self.backend, tol=self.tol)
        return ExactMatrix(list(zip(*self._scalars)), backend=self.backend, tol=self.tol)

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        n, m = self.shape
        if n != m:
            return False
        if self.is_exact:
            return all(self._scalars[i][j] == self._scalars[j][i]
                       for i in range(n) for j in range(i + 1, n))
        a = self.to_float()
        return bool(np.all(np.abs(a - a.T) <= atol))

    def is_integer(self) -> bool:
        return self.is_exact and all(x.denominator == 1 for row in self._scalars for x in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._scalars == other._scalars

    def __hash__(self) -> int:
        return hash(self._scalars)

    def __repr__(self) -> str:
        rows = ", ".join("[" + ", ".join(format_scalar(x) for x in row) + "]"
                         for row in self._scalars)
        return f"ExactMatrix([{rows}], backend={self.backend!r})"


def from_array(a: np.ndarray, backend: str, tol: float | None = None) -> ExactMatrix:
    """Wrap the result of an internal array computation."""
    if backend == EXACT:
        return ExactMatrix(a, backend=EXACT)
    return ExactMatrix(np.asarray(a, dtype=float), backend=FLOAT, tol=tol)


def as_matrix(m) -> ExactMatrix:
    return m if isinstance(m, ExactMatrix) else ExactMatrix(m)


# -- exact kernels ---------------------------------------------------------


def _integer_rows(a: np.ndarray) -> list[list[int]]:
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for row in a:
        den = math.lcm(*(x.denominator for x in row)) if len(row) else 1
        out.append([int(x * den) for x in row])
    return out


def _bareiss(m: list[list[int]]) -> tuple[int, int, int]:
    """In-place fraction-free elimination; returns (rank, row-swap sign, last pivot).

    Surviving entries are minors of the input, so every division is exact.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r, prev, sign = 0, 1, 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
            sign = -sign
        p = m[r][c]
        for i in range(r + 1, rows):
            mic = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, cols):
                row_i[j] = (p * row_i[j] - mic * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
    return r, sign, prev


def rref(a: np.ndarray, exact: bool, tol: float = 1e-10):
    """Reduced row echelon form with leftmost pivots.

    Returns ``(R, pivots, T)`` where ``T @ a == R`` and ``T`` is invertible.
    Exact mode works on Fractions; float mode uses partial pivoting inside
    each column and treats entries below ``tol * max|a|`` as zero.
    """
    a = np.array(a, dtype=object if exact else float)
    rows, cols = a.shape
    if exact:
        t = np.empty((rows, rows), dtype=object)
        for i in range(rows):
            for j in range(rows):
                t[i, j] = Fraction(int(i == j))
        cut = 0
    else:
        t = np.eye(rows)
        cut = tol * (np.abs(a).max() if a.size else 0.0)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = a[r:, c]
        if exact:
            nz = [i for i, x in enumerate(col) if x != 0]
            if not nz:
                continue
            piv = r + nz[0]
        else:
            i = int(np.argmax(np.abs(col)))
            if abs(col[i]) <= cut:
                a[r:, c] = 0.0
                continue
            piv = r + i
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            t[[r, piv]] = t[[piv, r]]
        p = a[r, c]
        a[r] = a[r] / p
        t[r] = t[r] / p
        for i in range(rows):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                a[i] = a[i] - f * a[r]
                t[i] = t[i] - f * t[r]
        if not exact:
            a[np.abs(a) <= cut] = 0.0
        pivots.append(c)
        r += 1
    return a, pivots, t


def _float_tol(a: np.ndarray, s: np.ndarray, tol: float | None) -> float:
    if tol is not None:
        return tol
    return max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)


# -- public operations -----------------------------------------------------


def rank(m: ExactMatrix, tol: float | None = None) -> int:
    """Rank of ``m``: exact via Bareiss, or count of singular values above the tolerance."""
    m = as_matrix(m)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.is_exact:
        return _bareiss(_integer_rows(m.array))[0]
    a = m.to_float()
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > _float_tol(a, s, tol if tol is not None else m.tol)))


def determinant(m: ExactMatrix) -> Scalar:
    m = as_matrix(m)
    n, c = m.shape
    if n != c:
        raise ValueError(f"determinant of non-square {n}x{c} matrix")
    if n == 0:
        return Fraction(1) if m.is_exact else 1.0
    if not m.is_exact:
        return float(np.linalg.det(m.to_float()))
    a = m.array
    scale = 1
    for row in a:
        scale *= math.lcm(*(x.denominator for x in row))
    work = _integer_rows(a)
    r, sign, last = _bareiss(work)
    if r < n:
        return Fraction(0)
    return Fraction(sign * last, scale)


def _check_labels(labels: Iterable[int], bound: int, what: str) -> list[int]:
    out = [int(i) for i in labels]
    for i in out:
        if not 1 <= i <= bound:
            raise IndexError(f"{what} index {i} outside 1..{bound}")
    return out


def submatrix(m: ExactMatrix, rows: Iterable[int], cols: Iterable[int]) -> ExactMatrix:
    """Rows and columns selected by 1-based index lists, in the order given."""
    m = as_matrix(m)
    rs = _check_labels(rows, m.nrows, "row")
    cs = _check_labels(cols, m.ncols, "column")
    g = m.entries
    return ExactMatrix([[g[i - 1][j - 1] for j in cs] for i in rs], backend=m.backend, tol=m.tol)


def nullspace(m: ExactMatrix, tol: float | None = None) -> list[tuple[Scalar, ...]]:
    """Basis of the right kernel ``{v : m v = 0}``.

    Exact backend: the standard RREF basis (one vector per free column).
    Float backend: right singular vectors with singular value at or below the
    rank tolerance.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    if cols == 0:
        return []
    if rows == 0:
        if m.is_exact:
            return [tuple(Fraction(int(i == j)) for i in range(cols)) for j in range(cols)]
        return [tuple(float(i == j) for i in range(cols)) for j in range(cols)]
    if m.is_exact:
        r, pivots, _ = rref(m.array, exact=True)
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * cols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -r[i, f]
            basis.append(tuple(v))
        return basis
    a = m.to_float()
    _, s, vt = np.linalg.svd(a)
    k = int(np.sum(s > _float_tol(a, s, tol if tol is not None else m.tol)))
    return [tuple(float(x) for x in vt[i]) for i in range(k, cols)]


def left_nullspace(m: ExactMatrix, tol: float | None = None) -> list[tuple[Scalar, ...]]:
    return nullspace(as_matrix(m).T, tol=tol)


def sqrt_spd(m, rtol: float = 1e-12) -> np.ndarray:
    """Symmetric square root of a symmetric positive-definite matrix via ``eigh``."""
    a = np.asarray(m.to_float() if isinstance(m, ExactMatrix) else m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("sqrt_spd needs a square matrix")
    if not np.allclose(a, a.T, rtol=0, atol=1e-10 * max(1.0, np.abs(a).max())):
        raise ValueError("sqrt_spd needs a symmetric matrix")
    a = (a + a.T) / 2
    w, v = np.linalg.eigh(a)
    if w.size and w[0] <= rtol * max(abs(w[-1]), 1e-300):
        raise ValueError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(w)) @ v.T


def symplectic_form(n: int, exact: bool = False) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` in grouped (x..x p..p) ordering."""
    om = np.zeros((2 * n, 2 * n), dtype=int)
    om[:n, n:] = np.eye(n, dtype=int)
    om[n:, :n] = -np.eye(n, dtype=int)
    if exact:
        return np.vectorize(Fraction, otypes=[object])(om)
    return om.astype(float)


def same_row_space(a: ExactMatrix, b: ExactMatrix, tol: float | None = None) -> bool:
    """Whether two matrices with equal column counts span the same row space."""
    a, b = as_matrix(a), as_matrix(b)
    if a.ncols != b.ncols:
        return False
    backend = EXACT if (a.is_exact and b.is_exact) else FLOAT
    stacked = ExactMatrix(list(a.entries) + list(b.entries), backend=backend)
    ra = rank(a if backend == EXACT else a.as_float(), tol=tol)
    rb = rank(b if backend == EXACT else b.as_float(), tol=tol)
    return ra == rb == rank(stacked, tol=tol)


def exact_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a square Fraction object array; raises if singular."""
    n = a.shape[0]
    r, pivots, t = rref(a, exact=True)
    if len(pivots) != n:
        raise np.linalg.LinAlgError("matrix is singular")
    return t
