"""Rank criteria for k-uniformity and related properties.

A cluster state with symmetric adjacency matrix ``A`` is k-uniform iff for
every k-subset ``S`` of modes the off-diagonal block with rows outside
``S`` and columns in ``S`` has full column rank k. The same block test
decides MDS generators (every k columns independent), integer rotor and Zak
cluster states, and the unitary directions of the Gaussian operator a
cluster state defines.

Subsets are 1-based tuples, enumerated in lexicographic order so the
reported witness is always the first failing subset.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

from .matcore import ExactMatrix, as_matrix, determinant, rank, submatrix


@dataclass
class UniformityReport:
    n: int
    k_max: int
    is_ame: bool
    witnesses: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    backend: str = "exact"
    elapsed: float = 0.0
    side: str | None = None
    ops: list[dict[str, Any]] | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "n": self.n,
            "kMax": self.k_max,
            "isAME": self.is_ame,
            "witnesses": [{"k": k, "subset": list(s)} for k, s in self.witnesses],
            "backend": self.backend,
        }
        if self.side is not None:
            d["side"] = self.side
        if self.ops is not None:
            d["ops"] = self.ops
        d["elapsed"] = self.elapsed
        return d


def complement(subset, n: int) -> list[int]:
    s = set(subset)
    return [i for i in range(1, n + 1) if i not in s]


def _square(a: ExactMatrix) -> int:
    n, m = a.shape
    if n != m:
        raise ValueError(f"expected a square matrix, got {n}x{m}")
    return n


def cut_rank(a: ExactMatrix, subset, tol: float | None = None) -> int:
    """Rank of the block with rows outside ``subset`` and columns in ``subset``."""
    n = a.nrows
    return rank(submatrix(a, complement(subset, n), subset), tol=tol)


def _first_failure(a: ExactMatrix, k: int, tol: float | None):
    n = a.nrows
    for s in combinations(range(1, n + 1), k):
        if cut_rank(a, s, tol) < k:
            return s
    return None


def is_k_uniform_cluster(a, k: int, tol: float | None = None) -> tuple[bool, tuple[int, ...] | None]:
    """Check the off-diagonal block criterion for every k-subset.

    Returns ``(verdict, witness)`` where the witness is the lexicographically
    first failing subset, or ``None`` on success.
    """
    a = as_matrix(a)
    n = _square(a)
    if not 1 <= k <= n // 2:
        raise ValueError(f"k={k} outside 1..{n // 2}")
    w = _first_failure(a, k, tol)
    return w is None, w


def max_uniformity(a, tol: float | None = None) -> UniformityReport:
    a = as_matrix(a)
    n = _square(a)
    if not a.is_symmetric():
        raise ValueError("adjacency matrix must be symmetric")
    start = time.perf_counter()
    k_max, witnesses = 0, []
    for k in range(1, n // 2 + 1):
        w = _first_failure(a, k, tol)
        if w is not None:
            witnesses.append((k, w))
            break
        k_max = k
    return UniformityReport(
        n=n,
        k_max=k_max,
        is_ame=k_max == n // 2,
        witnesses=witnesses,
        backend=a.backend,
        elapsed=time.perf_counter() - start,
    )


def is_mds_generator(g, tol: float | None = None) -> tuple[bool, tuple[int, ...] | None]:
    """Every choice of k columns of the ``k x n`` generator must be invertible."""
    g = as_matrix(g)
    k, n = g.shape
    if k == 0 or rank(g, tol=tol) != k:
        raise ValueError("generator matrix must have full row rank")
    rows = list(range(1, k + 1))
    for cols in combinations(range(1, n + 1), k):
        if rank(submatrix(g, rows, cols), tol=tol) < k:
            return False, cols
    return True, None


def _positive(x) -> bool:
    return float(x) > 0 if not hasattr(x, "denominator") else x > 0


def is_totally_positive(a, method: str = "fekete") -> bool:
    """All minors strictly positive.

    ``method="fekete"`` checks only minors on contiguous rows and columns,
    which suffices by Fekete's criterion; ``"exhaustive"`` checks them all.
    """
    a = as_matrix(a)
    n, m = a.shape
    if method == "fekete":
        for size in range(1, min(n, m) + 1):
            for r0 in range(1, n - size + 2):
                rows = range(r0, r0 + size)
                for c0 in range(1, m - size + 2):
                    if not _positive(determinant(submatrix(a, rows, range(c0, c0 + size)))):
                        return False
        return True
    if method == "exhaustive":
        for size in range(1, min(n, m) + 1):
            for rows in combinations(range(1, n + 1), size):
                for cols in combinations(range(1, m + 1), size):
                    if not _positive(determinant(submatrix(a, rows, cols))):
                        return False
        return True
    raise ValueError(f"unknown method {method!r}")


# -- rotor and Zak cluster states -------------------------------------------


class RotorMatrix(ExactMatrix):
    """Symmetric integer matrix defining a rotor (or one side of a Zak) cluster state.

    Only integer matrices are accepted: for them, injectivity of the
    restricted homomorphism into the torus is the same as full rational
    column rank of the off-diagonal block.
    """

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        if not self.is_integer():
            raise ValueError("rotor matrices must have integer entries")
        if not self.is_symmetric():
            raise ValueError("rotor matrices must be symmetric")


@dataclass(frozen=True)
class ZakPair:
    a: RotorMatrix
    p: RotorMatrix

    def __post_init__(self):
        object.__setattr__(self, "a", _rotor(self.a))
        object.__setattr__(self, "p", _rotor(self.p))
        if self.a.shape != self.p.shape:
            raise ValueError("Zak pair matrices must have equal size")

    @property
    def n(self) -> int:
        return self.a.nrows


def _rotor(c) -> RotorMatrix:
    return c if isinstance(c, RotorMatrix) else RotorMatrix(c)


def rotor_k_uniform(c, k: int) -> tuple[bool, tuple[int, ...] | None]:
    return is_k_uniform_cluster(_rotor(c), k)


def rotor_max_uniformity(c) -> UniformityReport:
    return max_uniformity(_rotor(c))


def zak_k_uniform(z: ZakPair, k: int) -> tuple[bool, tuple[str, tuple[int, ...]] | None]:
    """Both the A-side and P-side blocks must pass; the witness names the failing side."""
    for side, m in (("A", z.a), ("P", z.p)):
        ok, w = is_k_uniform_cluster(m, k)
        if not ok:
            return False, (side, w)
    return True, None


def zak_max_uniformity(z: ZakPair) -> UniformityReport:
    start = time.perf_counter()
    n = z.n
    k_max, witnesses, side = 0, [], None
    for k in range(1, n // 2 + 1):
        ok, w = zak_k_uniform(z, k)
        if not ok:
            side = w[0]
            witnesses.append((k, w[1]))
            break
        k_max = k
    return UniformityReport(n=n, k_max=k_max, is_ame=k_max == n // 2, witnesses=witnesses,
                            backend="exact", elapsed=time.perf_counter() - start, side=side)


# -- multi-unitarity --------------------------------------------------------


@dataclass(frozen=True)
class Direction:
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    unitary: bool

    def label(self) -> str:
        return "".join(map(str, self.inputs)) + "|" + "".join(map(str, self.outputs))


def multiunitary_directions(a, tol: float | None = None) -> list[Direction]:
    """Unitarity of the operator obtained by bending each balanced half into bras.

    Halves are listed once each, with the half containing mode 1 as inputs.
    The operator is unitary iff the block coupling the halves is invertible.
    """
    a = as_matrix(a)
    n = _square(a)
    if n % 2:
        raise ValueError("multi-unitarity needs an even number of modes")
    out = []
    for half in combinations(range(1, n + 1), n // 2):
        if half[0] != 1:
            continue
        other = tuple(complement(half, n))
        block = submatrix(a, other, half)
        out.append(Direction(half, other, rank(block, tol=tol) == n // 2))
    return out
