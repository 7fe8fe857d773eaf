"""Constructors for the adjacency and generator matrix families.

Index conventions are 1-based (``j, l = 1..n``) except for :func:`pascal`,
whose entries are the zero-based binomials ``C(j + l, j)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import count
from typing import Sequence

import numpy as np

from .matcore import EXACT, FLOAT, ExactMatrix, Scalar, rank, sqrt_scalar, to_scalar

# numpy's PCG64 stream is stable across releases for a given seed
RANDOM_GENERATOR = "numpy.random.PCG64"


def _adjacency(rows, backend=None) -> ExactMatrix:
    m = ExactMatrix(rows, backend=backend)
    if not m.is_symmetric():
        raise ValueError("adjacency matrix must be symmetric")
    return m


def pascal(n: int) -> ExactMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _adjacency([[math.comb(j + l, j) for l in range(n)] for j in range(n)])


def hilbert(n: int) -> ExactMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _adjacency([[Fraction(1, j + l - 1) for l in range(1, n + 1)] for j in range(1, n + 1)])


def cauchy(v: Sequence, w: Sequence) -> ExactMatrix:
    """Matrix with entries ``1 / (v_j + w_l)``; exact when both vectors are rational."""
    vs = [to_scalar(x) for x in v]
    ws = [to_scalar(x) for x in w]
    if not vs or not ws:
        raise ValueError("cauchy needs nonempty node vectors")
    exact = all(isinstance(x, Fraction) for x in vs + ws)
    rows = []
    for a in vs:
        row = []
        for b in ws:
            s = a + b if exact else float(a) + float(b)
            if s == 0:
                raise ZeroDivisionError(f"v_j + w_l = 0 for v_j={a}, w_l={b}")
            row.append(1 / s)
        rows.append(row)
    return ExactMatrix(rows, backend=EXACT if exact else FLOAT)


def hankel(seq: Sequence, n: int) -> ExactMatrix:
    """Symmetric matrix with ``entry(j, l) = seq[j + l - 1]`` (1-based sequence)."""
    if len(seq) < 2 * n - 1:
        raise ValueError(f"hankel({n}) needs a sequence of length >= {2 * n - 1}")
    s = [to_scalar(x) for x in seq]
    return _adjacency([[s[j + l] for l in range(n)] for j in range(n)])


def vandermonde_sym(u, n: int | None = None) -> ExactMatrix:
    """Symmetric Vandermonde matrix.

    With a scalar ``u`` this is the geometric-node form
    ``entry(j, l) = u ** ((j - 1) * (l - 1))``. A node list ``v`` gives
    ``entry(j, l) = v_j ** (l - 1)``, which must come out symmetric.
    """
    if isinstance(u, (list, tuple, np.ndarray)):
        nodes = [to_scalar(x) for x in u]
        n = len(nodes) if n is None else n
        if len(nodes) != n:
            raise ValueError("node list length must equal n")
        return _adjacency([[_power(v, l) for l in range(n)] for v in nodes])
    if n is None or n < 1:
        raise ValueError("n must be >= 1")
    u = to_scalar(u)
    if u == 0 or float(u) == 0.0:
        raise ValueError("u must be nonzero")
    return _adjacency([[_power(u, j * l) for l in range(n)] for j in range(n)])


def _power(x: Scalar, e: int) -> Scalar:
    if isinstance(x, Fraction):
        return x**e
    return float(x) ** e


def exp_kernel(v: Sequence, w: Sequence) -> ExactMatrix:
    a = np.exp(np.outer(np.asarray(v, dtype=float), np.asarray(w, dtype=float)))
    return ExactMatrix(a, backend=FLOAT)


def gauss_kernel(u: float, n: int) -> ExactMatrix:
    """``entry(j, l) = u ** ((j - l) ** 2)`` for ``0 < u < 1`` (float backend)."""
    u = float(to_scalar(u))
    if not 0 < u < 1:
        raise ValueError("gauss_kernel needs 0 < u < 1")
    j = np.arange(n)
    return _adjacency(u ** ((j[:, None] - j[None, :]) ** 2).astype(float), backend=FLOAT)


def primes():
    found: list[int] = []
    for p in count(2):
        if all(p % q for q in found if q * q <= p):
            found.append(p)
            yield p


def sqrt_primes(n: int) -> ExactMatrix:
    """Symmetric matrix of square roots of distinct primes.

    The upper triangle (diagonal included) is filled row-major with
    consecutive primes 2, 3, 5, ...; the lower triangle mirrors it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = primes()
    grid = [[None] * n for _ in range(n)]
    for j in range(n):
        for l in range(j, n):
            grid[j][l] = grid[l][j] = sqrt_scalar(next(gen))
    return _adjacency(grid, backend=FLOAT)


def random_adjacency(n: int, seed: int) -> ExactMatrix:
    """Symmetric matrix with i.i.d. uniform(-1, 1) entries on and above the diagonal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    upper = rng.uniform(-1.0, 1.0, size=(n, n))
    a = np.triu(upper) + np.triu(upper, 1).T
    return ExactMatrix(a, backend=FLOAT)


def ghz_generator(n: int) -> ExactMatrix:
    """Generator of the length-``n`` repetition code, ``(1, 1, ..., 1)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return ExactMatrix([[1] * n])


def mds_vandermonde_generator(k: int, n: int, nodes: Sequence | None = None) -> ExactMatrix:
    """``k x n`` generator with ``entry(i, l) = nodes_l ** (i - 1)``; nodes default to ``1..n``."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    nodes = list(range(1, n + 1)) if nodes is None else [to_scalar(x) for x in nodes]
    if len(nodes) != n:
        raise ValueError(f"expected {n} nodes, got {len(nodes)}")
    nodes = [to_scalar(x) for x in nodes]
    if any(float(x) == 0 for x in nodes):
        raise ValueError("nodes must be nonzero")
    if len({float(x) for x in nodes}) != n:
        raise ValueError("nodes must be distinct")
    g = ExactMatrix([[_power(x, i) for x in nodes] for i in range(k)])
    if rank(g) != k:
        raise ValueError("generator is rank deficient")
    return g
