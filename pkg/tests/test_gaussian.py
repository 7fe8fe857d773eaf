import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvame.families import hilbert, pascal, random_adjacency, sqrt_primes, vandermonde_sym
from cvame.gaussian import (
    DB_PER_R,
    NonMonotoneError,
    Pairing,
    cluster_covariance,
    db_to_r,
    epr_extraction,
    fidelity_sweep,
    is_covariance,
    mixed_modes,
    oracle_grid,
    purity,
    r_to_db,
    reduced,
    squeezing_threshold,
    symplectic_eigenvalues,
    teleportation_fidelity,
    teleportation_fidelity_direct,
    uniformity_oracle,
)
from cvame.matcore import ExactMatrix, symplectic_form
from cvame.stabilizer import from_cluster
from oracles import MATRIX_A, MATRIX_B, MATRIX_C, MATRIX_D, THRESHOLD_DB


def closed_form_a(r):
    """Two independent EPR pairs of variance e^{-2r} per nullifier."""
    return (1 + math.exp(-2 * r)) ** -2


def is_pure(sigma, tol=1e-8):
    # sigma Omega sigma Omega = -I holds exactly for pure states
    om = symplectic_form(sigma.shape[0] // 2)
    return np.allclose(sigma @ om @ sigma @ om, -np.eye(sigma.shape[0]), atol=tol * np.abs(sigma).max() ** 2)


# -- squeezing units ---------------------------------------------------------------------


def test_db_conversion():
    assert DB_PER_R == pytest.approx(20 / math.log(10))
    assert r_to_db(0) == 0
    assert r_to_db(1) == pytest.approx(10 * math.log10(math.exp(2)))
    assert db_to_r(r_to_db(0.731)) == pytest.approx(0.731)


# -- covariance matrices ---------------------------------------------------------------------


def test_vacuum():
    assert np.allclose(cluster_covariance(np.zeros((3, 3)), 0.0), np.eye(6))


def test_squeezed_vacuum():
    r = 0.7
    sigma = cluster_covariance(np.zeros((2, 2)), r)
    assert np.allclose(sigma, np.diag([math.exp(2 * r)] * 2 + [math.exp(-2 * r)] * 2))


def test_pascal_covariance_is_pure():
    for r in (0.0, 0.5, 2.0, db_to_r(35)):
        sigma = cluster_covariance(pascal(4), r)
        assert np.allclose(symplectic_eigenvalues(sigma), 1, atol=1e-8)
        assert is_covariance(sigma)


def test_strong_squeezing_purity_at_float_resolution():
    # cond(sigma) = e^{4r} = 1e10 at 50 dB, so only ~1e-6 is resolvable
    sigma = cluster_covariance(pascal(4), db_to_r(50))
    assert np.allclose(symplectic_eigenvalues(sigma), 1, atol=1e-10 * np.linalg.cond(sigma))
    assert is_covariance(sigma)
    assert not is_covariance(sigma, tol=1e-8)


def test_nullifier_variance_shrinks():
    a = pascal(3).to_float()
    r = 1.3
    sigma = cluster_covariance(a, r)
    # nullifiers p - A x, normalized by (I + A^2)^{-1/2}
    nul = np.hstack([-a, np.eye(3)])
    var = nul @ sigma @ nul.T
    expected = (np.eye(3) + a @ a) * math.exp(-2 * r)
    assert np.allclose(var, expected)


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(0, 4))  # up to ~35 dB
def test_covariance_is_pure_state(n, seed, r):
    sigma = cluster_covariance(random_adjacency(n, seed), r)
    assert np.allclose(symplectic_eigenvalues(sigma), 1, atol=1e-8)
    assert is_pure(sigma)
    assert purity(sigma) == pytest.approx(1, abs=1e-8)


def test_is_covariance_rejects():
    assert not is_covariance(0.5 * np.eye(2))
    assert not is_covariance(np.array([[1.0, 0.3], [0.0, 1.0]]))
    assert not is_covariance(np.eye(3))
    assert is_covariance(2 * np.eye(4))


def test_cluster_covariance_rejects_asymmetric():
    with pytest.raises(ValueError):
        cluster_covariance(np.array([[0.0, 1.0], [2.0, 0.0]]), 1.0)


# -- reduced states and the purity oracle ------------------------------------------------------


def test_purity_examples():
    assert purity(np.eye(4)) == 1
    assert purity(3 * np.eye(2)) == pytest.approx(1 / 3)


def test_reduced():
    sigma = np.arange(36, dtype=float).reshape(6, 6)
    assert np.array_equal(reduced(sigma, [2]), sigma[np.ix_([1, 4], [1, 4])])
    with pytest.raises(ValueError):
        reduced(sigma, [])
    with pytest.raises(IndexError):
        reduced(sigma, [4])


def test_oracle_examples():
    r = db_to_r(40)
    assert uniformity_oracle(ExactMatrix(MATRIX_A), [1, 3], r) > 0.5
    assert uniformity_oracle(ExactMatrix(MATRIX_A), [1, 2], r) < 1e-3
    assert uniformity_oracle(pascal(4), [1, 2], r) < 1e-3
    assert uniformity_oracle(pascal(4), [2, 4], 0.0) == pytest.approx(1)


def test_oracle_closed_pair():
    # modes 1 and 3 of matrix (a) only talk to each other, so they stay pure
    for db in (5, 20, 40):
        assert uniformity_oracle(ExactMatrix(MATRIX_A), [1, 3], db_to_r(db)) == pytest.approx(1)


@pytest.mark.parametrize("a", [pascal(4), hilbert(3), vandermonde_sym("1/2", 3), sqrt_primes(3), pascal(5)],
                         ids=["pascal4", "hilbert3", "vander3", "sqrtprimes3", "pascal5"])
def test_monotone_suppression(a):
    n = a.nrows
    grid = np.arange(0, 51, 1.0)
    for s in combinations(range(1, n + 1), n // 2):
        values = [uniformity_oracle(a, s, db_to_r(db)) for db in grid]
        assert all(y <= x * (1 + 1e-12) for x, y in zip(values, values[1:]))
        assert values[-1] < values[0]


def test_oracle_grid_fields():
    rows = oracle_grid(ExactMatrix(MATRIX_A))
    assert len(rows) == 4 + 6
    by_subset = {tuple(r["subset"]): r for r in rows}
    assert by_subset[(1, 3)]["fullRank"] is False
    assert by_subset[(1, 2)]["fullRank"] is True


# -- pairings -----------------------------------------------------------------------------------


def test_pairing_parse_and_default():
    p = Pairing.parse("1:3,2:4", 4)
    assert (p.senders, p.receivers, p.ancilla) == ((1, 2), (3, 4), None)
    assert Pairing.default(4) == p
    assert str(p) == "1:3,2:4"
    odd = Pairing.default(5)
    assert (odd.senders, odd.receivers, odd.ancilla) == ((1, 2), (3, 4), 5)
    assert Pairing.parse("1:4,2:5", 5).ancilla == 3


@pytest.mark.parametrize("text", ["1:3", "1:3,2:3", "1-3,2:4", "1:3,2:5", ""])
def test_pairing_rejects(text):
    with pytest.raises(ValueError):
        Pairing.parse(text, 4)


# -- EPR extraction ------------------------------------------------------------------------------


def _check_extraction(h, pairing):
    ext = epr_extraction(h, pairing)
    s = ext.symplectic
    n = s.shape[0] // 2
    om = symplectic_form(n)
    assert np.allclose(s @ om @ s.T, om, atol=1e-10)
    outside = set(pairing.receivers) | ({pairing.ancilla} if pairing.ancilla else set())
    for a in range(1, n + 1):
        if a in outside:
            continue
        for idx in (a - 1, n + a - 1):
            e = np.zeros(2 * n)
            e[idx] = 1
            assert np.allclose(s[idx], e) and np.allclose(s[:, idx], e)
    return ext


def test_extraction_of_epr_pair_is_identity():
    h = ExactMatrix([[1, -1, 0, 0], [0, 0, 1, 1]])
    ext = _check_extraction(h, Pairing((1,), (2,)))
    assert np.allclose(ext.symplectic, np.eye(4))


def test_extraction_of_matrix_a_is_local_fourier():
    ext = _check_extraction(from_cluster(ExactMatrix(MATRIX_A)), Pairing.default(4))
    s = ext.symplectic
    # per-mode rotation on modes 3, 4 mixing only x_j and p_j
    for j in (2, 3):
        block = s[np.ix_([j, 4 + j], [j, 4 + j])]
        assert np.allclose(np.abs(block), [[0, 1], [1, 0]])


@pytest.mark.parametrize("a", [MATRIX_B, MATRIX_C, MATRIX_D])
def test_extraction_four_modes(a):
    _check_extraction(from_cluster(ExactMatrix(a)).to_float(), Pairing.default(4))


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_extraction_pascal(n):
    ext = _check_extraction(from_cluster(pascal(n)).to_float(), Pairing.default(n))
    assert (ext.ancilla_nullifier is None) == (n % 2 == 0)
    if n % 2:
        assert ext.notes


def test_extraction_fails_on_deficient_cut():
    with pytest.raises(ValueError):
        epr_extraction(from_cluster(ExactMatrix(MATRIX_A)).to_float(), Pairing.parse("1:2,3:4", 4))


# -- teleportation fidelity -----------------------------------------------------------------------


def test_fidelity_matrix_a_closed_form():
    for db in np.arange(0, 60.5, 0.5):
        r = db_to_r(db)
        assert abs(teleportation_fidelity(MATRIX_A, r) - closed_form_a(r)) < 1e-12


def test_fidelity_baseline():
    assert teleportation_fidelity(MATRIX_A, 0.0) == pytest.approx(0.25)


@pytest.mark.parametrize("a", [MATRIX_A, MATRIX_B, MATRIX_C, MATRIX_D], ids="abcd")
def test_factored_matches_block_formula(a):
    for db in (0, 5, 12.5, 20):
        r = db_to_r(db)
        assert teleportation_fidelity(a, r) == pytest.approx(teleportation_fidelity_direct(a, r), rel=1e-9)


@pytest.mark.parametrize("a", [MATRIX_A, MATRIX_B, MATRIX_C, MATRIX_D], ids="abcd")
def test_fidelity_monotone_and_bounded(a):
    values = [f for _, f in fidelity_sweep(a, 0, 60, 0.5)]
    assert all(0 < f <= 1 for f in values)
    assert all(y >= x - 1e-12 for x, y in zip(values, values[1:]))


@pytest.mark.filterwarnings("ignore:adjacency matrix is not AME")
@pytest.mark.parametrize("name, a", [("a", MATRIX_A), ("b", MATRIX_B), ("c", MATRIX_C), ("d", MATRIX_D)])
def test_thresholds(name, a):
    t = squeezing_threshold(a, 0.999)
    assert abs(t.db - THRESHOLD_DB[name]) < 0.05
    assert 0.999 <= t.fidelity < 0.999 + 1e-6


@pytest.mark.filterwarnings("ignore:adjacency matrix is not AME")
def test_threshold_matrix_a_exact():
    # (1 + e^{-2r})^{-2} = F  =>  e^{-2r} = F^{-1/2} - 1
    r = -0.5 * math.log(0.999 ** -0.5 - 1)
    assert squeezing_threshold(MATRIX_A, 0.999).db == pytest.approx(r_to_db(r), abs=1e-5)


def test_threshold_errors():
    with pytest.raises(ValueError):
        squeezing_threshold(MATRIX_A, 1.0)
    with pytest.raises(ValueError):
        squeezing_threshold(MATRIX_A, 0.999, db_max=10)
    assert issubclass(NonMonotoneError, RuntimeError)


def test_threshold_warns_when_not_ame():
    with pytest.warns(UserWarning):
        t = squeezing_threshold(MATRIX_D, 0.99)
    assert t.ame is False


def test_threshold_odd_modes():
    t = squeezing_threshold(pascal(5), 0.99)
    assert t.ame and 0 < t.db < 100


def test_sweep_rows():
    rows = fidelity_sweep(MATRIX_A, 0, 60, 1)
    assert len(rows) == 61
    assert rows[0] == (0.0, pytest.approx(0.25))
    assert rows[33][1] == pytest.approx(0.999, abs=1e-4)
    assert len(fidelity_sweep(MATRIX_B, 0, 60, 0.5)) == 121


def test_sweep_errors():
    with pytest.raises(ValueError):
        fidelity_sweep(MATRIX_A, 10, 10, 1)
    with pytest.raises(ValueError):
        fidelity_sweep(MATRIX_A, 0, 10, 0)


def test_fidelity_pairing_direction_symmetric():
    for a in (MATRIX_B, MATRIX_D):
        r = db_to_r(30)
        assert teleportation_fidelity(a, r, Pairing.parse("1:3,2:4", 4)) == pytest.approx(
            teleportation_fidelity(a, r, Pairing.parse("3:1,4:2", 4)), rel=1e-9)


ORACLE_SET = [pascal(4), hilbert(3), vandermonde_sym("1/2", 3), sqrt_primes(3), ExactMatrix(MATRIX_A),
              ExactMatrix(MATRIX_D)] + [random_adjacency(2 + s % 4, s) for s in range(20)]


@pytest.mark.parametrize("a", ORACLE_SET, ids=lambda m: f"n{m.nrows}")
def test_oracle_grid_agrees_with_rank(a):
    for row in oracle_grid(a, db=40):
        assert row["mixedModes"] == row["cutRank"]
        if row["fullRank"]:
            assert row["purity"] < 1e-2
        elif row["cutRank"] == 0:
            assert row["purity"] > 1e-1


def test_partially_deficient_cut_still_mixes():
    # cut {1,4} of matrix (d) has rank 1 of 2: one entangled direction remains
    a = ExactMatrix(MATRIX_D)
    p30, p40 = (uniformity_oracle(a, [1, 4], db_to_r(db)) for db in (30, 40))
    assert p40 < 1e-3
    assert p30 / p40 == pytest.approx(10, rel=0.05)
    assert mixed_modes(reduced(cluster_covariance(a, db_to_r(40)), [1, 4])) == 1
