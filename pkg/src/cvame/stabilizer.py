"""Analog stabilizer states given by generator matrices ``H = (A | -B)``.

Rows of ``H`` are nullifier coefficient vectors over the quadratures
``(x_1..x_n, p_1..p_n)``. Stabilizer phases are fixed to one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Union

import numpy as np

from .matcore import (
    EXACT,
    ExactMatrix,
    as_matrix,
    format_scalar,
    from_array,
    left_nullspace,
    nullspace,
    rank,
    rref,
    same_row_space,
    symplectic_form,
)
from .uniformity import UniformityReport, max_uniformity

FLOAT_SYMPLECTIC_TOL = 1e-10


@dataclass(frozen=True)
class RowBasisChange:
    """Left multiplication by an invertible matrix; a re-presentation, not a physical operation."""

    matrix: ExactMatrix

    def to_dict(self) -> dict[str, Any]:
        return {"op": "row_basis",
                "matrix": [[format_scalar(x) for x in row] for row in self.matrix.entries]}


@dataclass(frozen=True)
class Fourier:
    """Single-mode Fourier transform on each listed mode: ``x -> p, p -> -x``."""

    modes: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"op": "fourier", "modes": list(self.modes)}


LocalOp = Union[RowBasisChange, Fourier]


def _modes(h: ExactMatrix) -> int:
    n, m = h.shape
    if m != 2 * n:
        raise ValueError(f"stabilizer matrix must be n x 2n, got {n}x{m}")
    return n


def symplectic_products(h) -> np.ndarray:
    """``H Omega H^T`` as an array (Fractions on the exact backend)."""
    h = as_matrix(h)
    n = _modes(h)
    a = h.array
    return a @ symplectic_form(n, exact=h.is_exact) @ a.T


def validate(h) -> bool:
    h = as_matrix(h)
    n = _modes(h)
    if rank(h) != n:
        return False
    g = symplectic_products(h)
    if h.is_exact:
        return all(x == 0 for x in g.flat)
    return bool(np.all(np.abs(g) < FLOAT_SYMPLECTIC_TOL))


def _require_valid(h) -> ExactMatrix:
    h = as_matrix(h)
    if not validate(h):
        raise ValueError("invalid stabilizer matrix: needs full rank and H Omega H^T = 0")
    return h


def _identity(n: int, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
    return np.eye(n)


def from_cluster(a) -> ExactMatrix:
    """``H = (A | -I)`` for a symmetric adjacency matrix."""
    a = as_matrix(a)
    n = a.nrows
    if not a.is_symmetric():
        raise ValueError("adjacency matrix must be symmetric")
    exact = a.is_exact
    return from_array(np.hstack([a.array, -_identity(n, exact)]), a.backend, a.tol)


def from_mds(g) -> ExactMatrix:
    """Stabilizer of the code state of a real block code with generator ``G``.

    ``B`` stacks ``G`` over zero rows and ``A`` stacks zero rows over a
    parity check ``h`` (``h G^T = 0``) taken from the nullspace of ``G``.
    """
    g = as_matrix(g)
    k, n = g.shape
    if k == 0 or rank(g) != k:
        raise ValueError("generator matrix must have full row rank")
    h = nullspace(g)
    zero = Fraction(0) if g.is_exact else 0.0
    dtype = object if g.is_exact else float
    a_blk = np.full((n, n), zero, dtype=dtype)
    b_blk = np.full((n, n), zero, dtype=dtype)
    b_blk[:k] = g.array
    for i, v in enumerate(h):
        a_blk[k + i] = v
    return from_array(np.hstack([a_blk, -b_blk]), g.backend, g.tol)


def fourier_columns(h: np.ndarray, modes) -> np.ndarray:
    """Apply the Fourier map to nullifier coefficients: ``(a_x, a_p) -> (-a_p, a_x)`` per mode."""
    n = h.shape[1] // 2
    out = h.copy()
    for m in modes:
        j = m - 1
        out[:, j] = -h[:, n + j]
        out[:, n + j] = h[:, j]
    return out


def _inverse(a: np.ndarray, exact: bool) -> np.ndarray:
    r, pivots, t = rref(a, exact=exact)
    if len(pivots) != a.shape[0]:
        raise np.linalg.LinAlgError("singular block")
    return t


@dataclass(frozen=True)
class ClusterForm:
    adjacency: ExactMatrix
    ops: tuple[LocalOp, ...]
    transformed: ExactMatrix

    @property
    def fourier_modes(self) -> tuple[int, ...]:
        return tuple(m for op in self.ops if isinstance(op, Fourier) for m in op.modes)

    def log(self) -> list[dict[str, Any]]:
        return [op.to_dict() for op in self.ops]


def cluster_form(h) -> ClusterForm:
    """Bring a stabilizer state to cluster form by row operations and local Fourier maps.

    If the momentum block is invertible the adjacency matrix is read off
    directly. Otherwise the momentum block is row-reduced to ``(P1; 0)``,
    a column set ``S`` where ``P1`` is invertible is taken from the pivots,
    and Fourier maps on the modes outside ``S`` make the momentum block
    invertible. The row space of the transformed generators is checked to
    equal that of ``(A' | -I)``.
    """
    h = _require_valid(h)
    n = h.nrows
    exact = h.is_exact
    work = np.array(h.array)
    ops: list[LocalOp] = []

    if rank(from_array(work[:, n:], h.backend, h.tol)) < n:
        red, pivots, t = rref(work[:, n:], exact=exact)
        ops.append(RowBasisChange(from_array(t, h.backend)))
        work = t @ work
        keep = tuple(p + 1 for p in pivots)
        flip = tuple(m for m in range(1, n + 1) if m not in keep)
        ops.append(Fourier(flip))
        work = fourier_columns(work, flip)

    mom = work[:, n:]
    # (X | P) ~ (-P^{-1} X | -I)
    change = -_inverse(mom, exact)
    if not _is_identity(change, exact):
        ops.append(RowBasisChange(from_array(change, h.backend)))
    transformed = change @ work
    adj = transformed[:, :n]
    if exact:
        adj_m = ExactMatrix(adj, backend=EXACT)
    else:
        adj = (adj + adj.T) / 2
        adj_m = from_array(adj, h.backend, h.tol)
    if not adj_m.is_symmetric(atol=1e-9):
        raise ArithmeticError("cluster form is not symmetric")
    current = from_array(fourier_columns(h.array, _flip_of(ops)), h.backend, h.tol)
    target = from_cluster(adj_m)
    if not same_row_space(current, target):
        raise ArithmeticError("cluster form row space check failed")
    return ClusterForm(adj_m, tuple(ops), current)


def _flip_of(ops) -> tuple[int, ...]:
    return tuple(m for op in ops if isinstance(op, Fourier) for m in op.modes)


def _is_identity(a: np.ndarray, exact: bool) -> bool:
    n = a.shape[0]
    if exact:
        return all(a[i, j] == int(i == j) for i in range(n) for j in range(n))
    return bool(np.allclose(a, np.eye(n), rtol=0, atol=1e-14))


def local_nullifier(h, subset) -> tuple | None:
    """Coefficients ``r`` with ``r H`` supported on the modes in ``subset``, or ``None``."""
    h = _require_valid(h)
    n = h.nrows
    inside = {int(i) for i in subset}
    if any(not 1 <= i <= n for i in inside):
        raise IndexError(f"mode subset {sorted(inside)} outside 1..{n}")
    outside = [m for m in range(1, n + 1) if m not in inside]
    cols = [m - 1 for m in outside] + [n + m - 1 for m in outside]
    if not cols:
        one, zero = (Fraction(1), Fraction(0)) if h.is_exact else (1.0, 0.0)
        return (one,) + (zero,) * (n - 1)
    basis = left_nullspace(from_array(h.array[:, cols], h.backend, h.tol))
    return basis[0] if basis else None


def nullifier_of(h, r) -> tuple:
    """The nullifier ``r H`` as a coefficient tuple over ``(x_1..x_n, p_1..p_n)``."""
    h = as_matrix(h)
    vec = np.array(list(r), dtype=object if h.is_exact else float)
    return tuple(vec @ h.array)


def pure_distance(h) -> int:
    h = _require_valid(h)
    n = h.nrows
    for size in range(1, n + 1):
        for s in combinations(range(1, n + 1), size):
            if local_nullifier(h, s) is not None:
                return size
    return n  # unreachable: the whole mode set always carries a nullifier


def stabilizer_uniformity(h) -> UniformityReport:
    """Uniformity of a stabilizer state via its cluster form."""
    start = time.perf_counter()
    form = cluster_form(h)
    report = max_uniformity(form.adjacency)
    report.ops = form.log()
    report.elapsed = time.perf_counter() - start
    return report
