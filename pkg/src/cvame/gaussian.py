"""Finite-squeezing numerics for approximate cluster states.

Covariance matrices use grouped ``(x_1..x_n, p_1..p_n)`` ordering with the
vacuum equal to the identity. A squeezing parameter ``r`` scales the
quadrature variances by ``e^{+-2r}``, so ``dB = 10 log10(e^{2r})``.

The approximate cluster state is ``sigma = M D M^T`` with
``D = diag(e^{2r} I, e^{-2r} I)`` and the orthogonal symplectic frame

    M = [[R, -R A], [R A, R]],   R = (I + A^2)^{-1/2}.

Its nullifiers ``p - A x`` have variance shrinking as ``e^{-2r}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import bisect

from .matcore import ExactMatrix, rank, sqrt_spd, submatrix, symplectic_form
from .stabilizer import from_cluster
from .uniformity import complement, max_uniformity

DB_PER_R = 20.0 / math.log(10.0)


def db_to_r(db: float) -> float:
    return db / DB_PER_R


def r_to_db(r: float) -> float:
    return r * DB_PER_R


def _float(m) -> np.ndarray:
    if isinstance(m, np.ndarray):
        return np.asarray(m, dtype=float)
    return (m if isinstance(m, ExactMatrix) else ExactMatrix(m)).to_float()


def _adjacency_array(a) -> np.ndarray:
    a = _float(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12):
        raise ValueError("adjacency matrix must be symmetric")
    return (a + a.T) / 2


def cluster_frame(a) -> np.ndarray:
    """Orthogonal symplectic ``M`` taking squeezed vacuum to the approximate cluster state."""
    a = _adjacency_array(a)
    n = a.shape[0]
    r = np.linalg.inv(sqrt_spd(np.eye(n) + a @ a))
    ra = r @ a
    return np.block([[r, -ra], [ra, r]])


def _squeeze_diag(n: int, r: float) -> np.ndarray:
    return np.r_[np.full(n, math.exp(2 * r)), np.full(n, math.exp(-2 * r))]


def cluster_covariance(a, r: float) -> np.ndarray:
    m = cluster_frame(a)
    n = m.shape[0] // 2
    sigma = (m * _squeeze_diag(n, r)) @ m.T
    return (sigma + sigma.T) / 2


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Sorted symplectic spectrum of a covariance matrix (moduli of eigenvalues of ``i Omega sigma``)."""
    sigma = _float(sigma)
    n = sigma.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ sigma))
    return np.sort(ev)[::2]


def is_covariance(sigma, tol: float | None = None) -> bool:
    """Symmetric, positive definite and obeying the uncertainty bound ``nu >= 1 - tol``.

    The default ``tol`` is ``1e-8``, widened to ``10 * eps * cond(sigma)`` for
    strongly squeezed states whose symplectic spectrum float64 cannot resolve
    more finely.
    """
    sigma = _float(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        return False
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-10 * max(1.0, np.abs(sigma).max())):
        return False
    w = np.linalg.eigvalsh(sigma)
    if w[0] <= 0:
        return False
    if tol is None:
        tol = max(1e-8, 10 * np.finfo(float).eps * w[-1] / w[0])
    return bool(symplectic_eigenvalues(sigma)[0] >= 1 - tol)


def reduced(sigma, subset) -> np.ndarray:
    """Covariance of the modes in ``subset`` (1-based), keeping their x and p rows."""
    sigma = _float(sigma)
    n = sigma.shape[0] // 2
    modes = [int(i) for i in subset]
    if not modes:
        raise ValueError("reduced state needs a nonempty mode set")
    if any(not 1 <= i <= n for i in modes):
        raise IndexError(f"modes {modes} outside 1..{n}")
    idx = [i - 1 for i in modes] + [n + i - 1 for i in modes]
    return sigma[np.ix_(idx, idx)]


def purity(sigma) -> float:
    """``1 / sqrt(det sigma)`` for a Gaussian state in vacuum-identity units."""
    sign, logdet = np.linalg.slogdet(_float(sigma))
    if sign <= 0:
        raise ValueError("covariance matrix is not positive definite")
    return math.exp(-0.5 * logdet)


def uniformity_oracle(a, subset, r: float) -> float:
    """Purity of the reduced approximate cluster state on ``subset``."""
    return purity(reduced(cluster_covariance(a, r), subset))


def mixed_modes(sigma, tol: float = 1e-3) -> int:
    """Number of symplectic eigenvalues above ``1 + tol``.

    For a reduced cluster state this counts the directions entangled with
    the rest, i.e. the rank of the cut, once squeezing resolves them.
    """
    return int(np.sum(symplectic_eigenvalues(sigma) > 1 + tol))


# -- EPR extraction and teleportation ---------------------------------------


@dataclass(frozen=True)
class Pairing:
    """Senders ``a_i`` paired with receivers ``b_i`` (1-based), plus an ancilla for odd n."""

    senders: tuple[int, ...]
    receivers: tuple[int, ...]
    ancilla: int | None = None

    def __post_init__(self):
        if len(self.senders) != len(self.receivers):
            raise ValueError("pairing needs equally many senders and receivers")
        modes = list(self.senders) + list(self.receivers)
        if self.ancilla is not None:
            modes.append(self.ancilla)
        if len(set(modes)) != len(modes):
            raise ValueError("pairing modes must be distinct")

    @property
    def k(self) -> int:
        return len(self.senders)

    def check(self, n: int) -> None:
        modes = set(self.senders) | set(self.receivers)
        if self.ancilla is not None:
            modes.add(self.ancilla)
        if self.k != n // 2 or modes != set(range(1, n + 1)):
            raise ValueError(f"pairing {self} does not cover {n} modes as floor(n/2) pairs")

    @classmethod
    def parse(cls, text: str, n: int) -> "Pairing":
        """Parse ``"1:3,2:4"`` (sender:receiver pairs); an odd leftover mode becomes the ancilla."""
        try:
            pairs = [tuple(int(x) for x in item.split(":")) for item in text.split(",") if item.strip()]
        except ValueError as exc:
            raise ValueError(f"malformed pairing {text!r}") from exc
        if not pairs or any(len(p) != 2 for p in pairs):
            raise ValueError(f"malformed pairing {text!r}")
        used = {m for p in pairs for m in p}
        rest = [m for m in range(1, n + 1) if m not in used]
        pairing = cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs),
                      rest[0] if len(rest) == 1 and n % 2 else None)
        pairing.check(n)
        return pairing

    @classmethod
    def default(cls, n: int) -> "Pairing":
        """Modes ``1..k`` send to ``k+1..2k``; mode ``n`` is the ancilla when n is odd."""
        k = n // 2
        return cls(tuple(range(1, k + 1)), tuple(range(k + 1, 2 * k + 1)), n if n % 2 else None)

    def __str__(self) -> str:
        return ",".join(f"{a}:{b}" for a, b in zip(self.senders, self.receivers))


@dataclass(frozen=True)
class EPRExtraction:
    """Symplectic ``S`` acting on receivers and ancilla; quadratures map as ``gamma -> S gamma``."""

    symplectic: np.ndarray
    pairing: Pairing
    ancilla_nullifier: str | None = None
    notes: list[str] = field(default_factory=list)


def _epr_rows(n: int, pairing: Pairing) -> np.ndarray:
    rows = []
    for a, b in zip(pairing.senders, pairing.receivers):
        v = np.zeros(2 * n)
        v[a - 1], v[b - 1] = 1.0, -1.0
        rows.append(v)
    for a, b in zip(pairing.senders, pairing.receivers):
        v = np.zeros(2 * n)
        v[n + a - 1], v[n + b - 1] = 1.0, 1.0
        rows.append(v)
    if pairing.ancilla is not None:
        v = np.zeros(2 * n)
        v[n + pairing.ancilla - 1] = 1.0
        rows.append(v)
    return np.array(rows)


def _rowspace_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    def r(m):
        s = np.linalg.svd(m, compute_uv=False)
        return int(np.sum(s > tol * max(1.0, s[0])))
    return r(a) == r(b) == r(np.vstack([a, b]))


def epr_extraction(h, pairing: Pairing) -> EPRExtraction:
    """Symplectic map on the receiver side turning the state into EPR pairs.

    With ``A``-side coefficients as coordinates, the nullifier space is the
    graph of a linear map ``T`` onto the receiver side (plus one receiver-local
    nullifier ``w`` when n is odd). The receiver-side map is fixed by sending
    each ``T e_i`` to the matching EPR nullifier part and ``w`` to ``p_anc``;
    a conjugate vector ``z`` completes it to a symplectic basis.
    """
    h = _float(h)
    n = h.shape[0]
    if h.shape[1] != 2 * n:
        raise ValueError("stabilizer matrix must be n x 2n")
    pairing.check(n)
    k = pairing.k
    anc = [] if pairing.ancilla is None else [pairing.ancilla]
    recv = list(pairing.receivers) + anc
    m = len(recv)
    idx_a = [a - 1 for a in pairing.senders] + [n + a - 1 for a in pairing.senders]
    idx_b = [b - 1 for b in recv] + [n + b - 1 for b in recv]
    h_a, h_b = h[:, idx_a], h[:, idx_b]

    s = np.linalg.svd(h_a, compute_uv=False)
    if np.sum(s > 1e-10 * max(1.0, s[0])) < 2 * k:
        raise ValueError(f"no EPR extraction for pairing {pairing}: the cut is not maximally entangled")

    basis = [row for row in np.linalg.pinv(h_a) @ h_b]  # B-parts with A-part e_i
    targets = []
    for i in range(k):
        v = np.zeros(2 * m)
        v[i] = -1.0  # x_a - x_b
        targets.append(v)
    for i in range(k):
        v = np.zeros(2 * m)
        v[m + i] = 1.0  # p_a + p_b
        targets.append(v)
    om = symplectic_form(m)
    notes = []
    ancilla_nullifier = None
    if anc:
        u, sv, vt = np.linalg.svd(h_a.T)
        w = vt[-1] @ h_b  # receiver-local nullifier
        rows = np.array([t @ om for t in basis] + [w @ om])
        rhs = np.zeros(2 * k + 1)
        e_p, e_x = np.zeros(2 * m), np.zeros(2 * m)
        e_p[2 * m - 1], e_x[m - 1] = 1.0, 1.0
        rhs[-1] = e_p @ om @ e_x
        z = np.linalg.lstsq(rows, rhs, rcond=None)[0]
        basis += [w, z]
        targets += [e_p, e_x]
        ancilla_nullifier = f"p_{pairing.ancilla}"
        notes.append(f"ancilla mode {pairing.ancilla} left with nullifier p_{pairing.ancilla}")

    q = np.array(targets).T @ np.linalg.inv(np.array(basis).T)
    s_b = np.linalg.inv(q).T
    full = np.eye(2 * n)
    full[np.ix_(idx_b, idx_b)] = s_b

    om_n = symplectic_form(n)
    if not np.allclose(full @ om_n @ full.T, om_n, atol=1e-10 * max(1.0, np.abs(full).max() ** 2)):
        raise ArithmeticError("EPR extraction is not symplectic")
    if not _rowspace_equal(h @ np.linalg.inv(full), _epr_rows(n, pairing)):
        raise ArithmeticError("EPR extraction failed the nullifier subspace check")
    return EPRExtraction(full, pairing, ancilla_nullifier, notes)


def _noise_factor(a, pairing: Pairing) -> tuple[np.ndarray, np.ndarray]:
    """Noise quadratures ``L S M`` split into their x- and p-squeezed columns."""
    a = _adjacency_array(a)
    n = a.shape[0]
    pairing.check(n)
    ext = epr_extraction(from_cluster(ExactMatrix(a, backend="float")).to_float(), pairing)
    k = pairing.k
    sel = np.zeros((2 * k, 2 * n))
    for i, (s, b) in enumerate(zip(pairing.senders, pairing.receivers)):
        sel[i, b - 1], sel[i, s - 1] = 1.0, -1.0  # x_b - x_a
        sel[k + i, n + b - 1], sel[k + i, n + s - 1] = 1.0, 1.0  # p_b + p_a
    f = sel @ ext.symplectic @ cluster_frame(a)
    return f[:, :n], f[:, n:]


def _fidelity_from_factor(fx: np.ndarray, fp: np.ndarray, r: float) -> float:
    k = fx.shape[0] // 2
    noise = math.exp(2 * r) * fx @ fx.T + math.exp(-2 * r) * fp @ fp.T
    # sigma_in + sigma_out = 2 I + noise for a coherent input at unit gain
    sign, logdet = np.linalg.slogdet(2 * np.eye(2 * k) + noise)
    return math.exp(k * math.log(2) - 0.5 * logdet)


def teleportation_fidelity(a, r: float, pairing: Pairing | None = None) -> float:
    """Coherent-state fidelity of joint teleportation over all pairs.

    The output adds the noise of ``gamma_b - Z gamma_a`` with
    ``Z = I (+) -I``, i.e. the EPR nullifiers ``x_b - x_a`` and ``p_b + p_a``
    after extraction, and the fidelity is ``2^k / sqrt(det(sigma_in + sigma_out))``.
    """
    a = _adjacency_array(a)
    pairing = pairing or Pairing.default(a.shape[0])
    fx, fp = _noise_factor(a, pairing)
    return _fidelity_from_factor(fx, fp, r)


def teleportation_fidelity_direct(a, r: float, pairing: Pairing | None = None) -> float:
    """Same quantity assembled from the transformed covariance blocks ``a, b, c``."""
    a = _adjacency_array(a)
    n = a.shape[0]
    pairing = pairing or Pairing.default(n)
    ext = epr_extraction(from_cluster(ExactMatrix(a, backend="float")).to_float(), pairing)
    s = ext.symplectic
    sigma = s @ cluster_covariance(a, r) @ s.T
    k = pairing.k
    ia = [x - 1 for x in pairing.senders] + [n + x - 1 for x in pairing.senders]
    ib = [x - 1 for x in pairing.receivers] + [n + x - 1 for x in pairing.receivers]
    sa, sb, c = sigma[np.ix_(ia, ia)], sigma[np.ix_(ib, ib)], sigma[np.ix_(ia, ib)]
    z = np.diag(np.r_[np.ones(k), -np.ones(k)])
    sigma_out = np.eye(2 * k) + z @ sa @ z + sb - z @ c - c.T @ z
    return 2**k / math.sqrt(np.linalg.det(np.eye(2 * k) + sigma_out))


class NonMonotoneError(RuntimeError):
    pass


@dataclass
class Threshold:
    db: float
    r: float
    target: float
    fidelity: float
    pairing: str
    ame: bool

    def to_dict(self) -> dict:
        return {"targetFidelity": self.target, "db": round(self.db, 6), "r": self.r,
                "fidelity": self.fidelity, "pairing": self.pairing, "isAME": self.ame}


def _is_ame(a) -> bool:
    return max_uniformity(ExactMatrix(_adjacency_array(a), backend="float")).is_ame


def squeezing_threshold(a, target: float, pairing: Pairing | None = None,
                        db_max: float = 100.0, xtol: float = 1e-6) -> Threshold:
    """Smallest squeezing (dB) whose fidelity reaches ``target``.

    A 1 dB grid over ``[0, db_max]`` is checked for monotonicity first; the
    crossing is then bisected.
    """
    if not 0 < target < 1:
        raise ValueError("target fidelity must lie in (0, 1)")
    a = _adjacency_array(a)
    pairing = pairing or Pairing.default(a.shape[0])
    fx, fp = _noise_factor(a, pairing)
    f = lambda db: _fidelity_from_factor(fx, fp, db_to_r(db))
    grid = np.linspace(0.0, db_max, int(round(db_max)) + 1)
    values = np.array([f(x) for x in grid])
    if np.any(np.diff(values) < -1e-12):
        bad = int(np.argmax(np.diff(values) < -1e-12))
        raise NonMonotoneError(f"fidelity decreases between {grid[bad]} and {grid[bad + 1]} dB")
    above = np.nonzero(values >= target)[0]
    if above.size == 0:
        raise ValueError(f"fidelity {target} not reached below {db_max} dB")
    hi = int(above[0])
    if hi == 0:
        db = 0.0
    else:
        db = bisect(lambda x: f(x) - target, grid[hi - 1], grid[hi], xtol=xtol)
        while f(db) < target:  # land on the reaching side of the bracket
            db = min(db + xtol, grid[hi])
    ame = _is_ame(a)
    if not ame:
        warnings.warn("adjacency matrix is not AME; fidelity only certifies the chosen cut",
                      stacklevel=2)
    return Threshold(db, db_to_r(db), target, f(db), str(pairing), ame)


def fidelity_sweep(a, db_min: float, db_max: float, step: float,
                   pairing: Pairing | None = None) -> list[tuple[float, float]]:
    """Fidelity on the grid ``db_min, db_min + step, ..., <= db_max``."""
    if not db_min < db_max:
        raise ValueError("sweep needs db_min < db_max")
    if step <= 0:
        raise ValueError("sweep step must be positive")
    a = _adjacency_array(a)
    pairing = pairing or Pairing.default(a.shape[0])
    fx, fp = _noise_factor(a, pairing)
    count = int(math.floor((db_max - db_min) / step + 1e-9)) + 1
    out = []
    for i in range(count):
        db = round(db_min + i * step, 10)
        out.append((db, _fidelity_from_factor(fx, fp, db_to_r(db))))
    return out


def oracle_grid(a, db: float = 40.0, max_size: int | None = None) -> list[dict]:
    """Rank verdict and reduced-state purity for every subset up to ``floor(n/2)`` modes."""
    m = a if isinstance(a, ExactMatrix) else ExactMatrix(a)
    n = m.nrows
    sigma = cluster_covariance(m, db_to_r(db))
    out = []
    for size in range(1, (max_size or n // 2) + 1):
        for s in combinations(range(1, n + 1), size):
            cut = rank(submatrix(m, complement(s, n), s))
            red = reduced(sigma, s)
            out.append({"subset": list(s), "cutRank": cut, "fullRank": cut == size,
                        "purity": purity(red), "mixedModes": mixed_modes(red)})
    return out
