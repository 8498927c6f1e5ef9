"""Witness construction and validation certificates."""

import math

import pytest

from orbitref import (
    CriterionHolds,
    FiniteField,
    Matrix,
    NotJordanCoordinates,
    NotPrime,
    QI,
    QQ,
    SpectralProfile,
    block_profile,
    build_c_orbit_witness,
    build_prime_field_counterexample,
    canonical_jordan,
    commutator_is_zero,
    enumerate_orbref0,
    orbref0_contains,
    validate_witness,
)


def _witness_pattern(S, m):
    rows = S.to_strings()
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            expected = "1" if (i == m - 1 and j in (0, 1)) else "0"
            if v != expected:
                return False
    return True


def test_witness_unimodular_3_plus_1():
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    prof = block_profile(T)
    S = build_c_orbit_witness(T, prof)
    assert _witness_pattern(S, 3)
    # S e0 = e2 and S e1 = e2, everything else dies
    e0 = [QQ.one(), QQ.zero(), QQ.zero(), QQ.zero()]
    e1 = [QQ.zero(), QQ.one(), QQ.zero(), QQ.zero()]
    assert [str(v) for v in S.apply(e0)] == ["0", "0", "1", "0"]
    assert [str(v) for v in S.apply(e1)] == ["0", "0", "1", "0"]


def test_witness_lone_block_d2():
    T = Matrix.jordan_block(QQ, 1, 2)
    S = build_c_orbit_witness(T, block_profile(T))
    assert S == Matrix.from_values(QQ, [[0, 0], [1, 1]])


def test_witness_scaled_block_with_nilpotent_tail():
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 2, 3),
                           Matrix.jordan_block(QQ, 0, 2)])
    S = build_c_orbit_witness(T, block_profile(T))
    assert _witness_pattern(S, 3)


def test_witness_commutator_identity():
    # (T - lam) S e0 = 0 while S (T - lam) e0 = S e1 = e_{m-1} != 0
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    prof = block_profile(T)
    S = build_c_orbit_witness(T, prof)
    lam = Matrix.identity(QQ, 4)
    A = T - lam
    e0 = [QQ.one(), QQ.zero(), QQ.zero(), QQ.zero()]
    assert all(v.is_zero for v in A.apply(S.apply(e0)))
    out = S.apply(A.apply(e0))
    assert [str(v) for v in out] == ["0", "0", "1", "0"]


def test_witness_requires_failed_criterion():
    T = Matrix.jordan_block(QQ, 1, 1)
    with pytest.raises(CriterionHolds):
        build_c_orbit_witness(T, block_profile(T))
    N = Matrix.jordan_block(QQ, 0, 3)
    with pytest.raises(CriterionHolds):
        build_c_orbit_witness(N, block_profile(N))


def test_witness_requires_jordan_coordinates():
    J = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    prof = block_profile(J)
    scrambled = Matrix.from_values(QQ, [[1, 0, 0, 1],
                                        [1, 1, 0, 0],
                                        [0, 1, 1, 0],
                                        [0, 0, 0, 1]])
    with pytest.raises(NotJordanCoordinates):
        build_c_orbit_witness(scrambled, prof)
    # dominant block must lead
    reordered = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 1),
                                   Matrix.jordan_block(QQ, 1, 3)])
    with pytest.raises(NotJordanCoordinates):
        build_c_orbit_witness(reordered, prof)


def test_canonical_jordan_orders_dominant_block_first():
    prof = SpectralProfile.from_blocks(QI, [("1", [1, 3]), ("0", [2])])
    T, layout = canonical_jordan(prof)
    assert [(str(e), s) for e, s in layout] == [("1", 3), ("1", 1), ("0", 2)]
    S = build_c_orbit_witness(T, prof)
    assert _witness_pattern(S, 3)


def test_prime_field_pair_entries():
    for p in (2, 3, 5):
        T, S = build_prime_field_counterexample(p)
        assert T.to_strings() == [["1", "1"], ["0", "1"]]
        assert S.to_strings() == [["0", "1"], ["0", "1"]]
        assert T.field == FiniteField(p)
    with pytest.raises(NotPrime):
        build_prime_field_counterexample(6)


def test_prime_field_pair_certificates():
    # S sits in OrbRef0(T) (all p^2 vectors) but outside the scaled orbit
    for p in (2, 3, 5):
        T, S = build_prime_field_counterexample(p)
        ok, failing = orbref0_contains(T, S)
        assert ok and failing is None
        zero, _ = commutator_is_zero(S, T)
        assert not zero
        result = enumerate_orbref0(T)
        assert S in set(result.members)
        assert any(D == S for D in result.difference)


def test_validate_witness_closed_form_decay():
    # T = (1+J3) + (1+J1); for x = e0: T^n e0 = e0 + n e1 + C(n,2) e2, so the
    # orthogonal component of e2 against it has norm ~ sqrt(1+n^2)/C(n,2)
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    prof = block_profile(T)
    S = build_c_orbit_witness(T, prof)
    report = validate_witness(S, T, samples=100, horizon=2000, seed=0)
    assert report.commutator_nonzero
    assert report.verdict_supported
    e0_row = next(r for r in report.membership_residuals if r["vector"] == "e0")
    r100 = e0_row["checkpoints"]["100"]
    r2000 = e0_row["checkpoints"]["2000"]
    predicted_100 = math.sqrt(1 + 100 ** 2) / math.comb(100, 2)
    predicted_2000 = math.sqrt(1 + 2000 ** 2) / math.comb(2000, 2)
    assert abs(r100 - predicted_100) < 0.2 * predicted_100
    assert abs(r2000 - predicted_2000) < 0.2 * predicted_2000
    assert r2000 < 1e-2
    assert 3.0 < r100 / r2000


def test_validate_witness_every_vector_converges():
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 2, 3),
                           Matrix.jordan_block(QQ, 0, 2)])
    prof = block_profile(T)
    S = build_c_orbit_witness(T, prof)
    report = validate_witness(S, T, samples=50, horizon=2000, seed=1)
    assert report.verdict_supported
    for row in report.membership_residuals:
        assert row["checkpoints"]["2000"] < 1e-2


def test_validate_witness_workers_deterministic():
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    prof = block_profile(T)
    S = build_c_orbit_witness(T, prof)
    reports = [validate_witness(S, T, samples=20, horizon=400, seed=0,
                                workers=w).as_dict() for w in (1, 2, 8)]
    assert reports[0] == reports[1] == reports[2]


def test_validate_rejects_shape_mismatch():
    from orbitref import ShapeMismatch

    T = Matrix.jordan_block(QQ, 1, 3)
    S = Matrix.zeros(QQ, 2)
    with pytest.raises(ShapeMismatch):
        validate_witness(S, T)
