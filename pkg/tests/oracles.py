"""Independent reference computations shared by the tests."""

import itertools
from fractions import Fraction

import numpy as np

from cvame.matcore import ExactMatrix, determinant
from cvame.stabilizer import fourier_columns, from_cluster

# the four adjacency matrices whose teleportation thresholds are tabulated
MATRIX_A = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
MATRIX_B = [[1, 1, 1, 1], [1, 2, 3, 4], [1, 3, 6, 10], [1, 4, 10, 20]]
MATRIX_C = [[1, 1, 1, 1], ["1", "1/2", "1/4", "1/8"], ["1", "1/4", "1/16", "1/64"], ["1", "1/8", "1/64", "1/512"]]
MATRIX_D = [[0, 1, 1, 2], [1, 0, 1, 3], [1, 1, 0, 3], [2, 3, 3, 0]]
THRESHOLD_DB = {"a": 33.007, "b": 52.712, "c": 47.710, "d": 48.582}


def leibniz_det(rows):
    """Permutation-expansion determinant, exact over Fractions."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = Fraction(-1 if inv % 2 else 1)
        for i, p in enumerate(perm):
            term *= Fraction(rows[i][p])
        total += term
    return total


def gauss_rank(rows):
    """Textbook Fraction elimination, independent of the Bareiss path."""
    m = [[Fraction(x) for x in r] for r in rows]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def random_representation(n, rng):
    """A random integer cluster state in disguise.

    Returns ``(A, H)`` where ``H`` is ``(A | -I)`` after a random Fourier
    subset and a random invertible integer row action.
    """
    u = rng.integers(-3, 4, size=(n, n))
    a = ExactMatrix((np.triu(u) + np.triu(u, 1).T).tolist())
    flip = [m for m in range(1, n + 1) if rng.random() < 0.5]
    h = fourier_columns(from_cluster(a).array, flip)
    while True:
        t = ExactMatrix(rng.integers(-2, 3, size=(n, n)).tolist())
        if determinant(t) != 0:
            break
    return a, ExactMatrix(t.array @ h)
