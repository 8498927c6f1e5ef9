"""Definition-level orbit oracle: power orbits, membership, enumeration,
rigidity, numeric residuals, and the space scan."""

import numpy as np
import pytest

from orbitref import (
    BudgetExceeded,
    FiniteField,
    Matrix,
    QQ,
    c_orbit_membership_residual,
    commutator_is_zero,
    enumerate_orbref0,
    matpow,
    orbref0_contains,
    power_orbit,
    rigidity_violations,
)
from orbitref.oracle import matrix_from_scan_index, scan_space


# -- power orbits ---------------------------------------------------------------

def test_power_orbit_identity():
    g2 = FiniteField(2)
    orb = power_orbit(Matrix.identity(g2, 2))
    assert len(orb.powers) == 1 and orb.tail == 0 and orb.cycle == 1


def test_power_orbit_nilpotent():
    g3 = FiniteField(3)
    orb = power_orbit(Matrix.jordan_block(g3, 0, 2))
    assert [P.to_strings() for P in orb.powers] == [
        [["1", "0"], ["0", "1"]],
        [["0", "0"], ["1", "0"]],
        [["0", "0"], ["0", "0"]],
    ]
    assert orb.tail == 2 and orb.cycle == 1


def test_power_orbit_unipotent_order_p():
    g5 = FiniteField(5)
    orb = power_orbit(Matrix.from_values(g5, [[1, 1], [0, 1]]))
    assert len(orb.powers) == 5 and orb.tail == 0 and orb.cycle == 5


def test_scaled_matrices_positive_powers_only():
    g3 = FiniteField(3)
    orb = power_orbit(Matrix.jordan_block(g3, 0, 2))
    scaled = orb.scaled_matrices()
    # {0} plus the two nonzero multiples of J; the identity is not a positive
    # power of a singular matrix
    assert len(scaled) == 3
    assert Matrix.identity(g3, 2) not in scaled


# -- membership -------------------------------------------------------------------

def test_contains_own_power():
    g5 = FiniteField(5)
    T = Matrix.from_values(g5, [[1, 2], [3, 4]])
    ok, failing = orbref0_contains(T, matpow(T, 3))
    assert ok and failing is None


def test_contains_prime_field_pair():
    g3 = FiniteField(3)
    T = Matrix.from_values(g3, [[1, 1], [0, 1]])
    S = Matrix.from_values(g3, [[0, 1], [0, 1]])
    ok, _ = orbref0_contains(T, S)
    assert ok


def test_contains_failing_vector():
    g2 = FiniteField(2)
    ok, failing = orbref0_contains(Matrix.identity(g2, 2),
                                   Matrix.from_values(g2, [[1, 0], [0, 0]]))
    assert not ok
    assert [str(v) for v in failing] == ["1", "1"]


def test_contains_budget():
    g2 = FiniteField(2)
    with pytest.raises(BudgetExceeded):
        orbref0_contains(Matrix.identity(g2, 2), Matrix.identity(g2, 2), budget=3)


# -- enumeration ------------------------------------------------------------------

def test_enumerate_gf2_shear_strictly_larger():
    g2 = FiniteField(2)
    T = Matrix.from_values(g2, [[1, 1], [0, 1]])
    S = Matrix.from_values(g2, [[0, 1], [0, 1]])
    res = enumerate_orbref0(T)
    assert not res.equal
    assert any(D == S for D in res.difference)


def test_enumerate_gf4_shear_equal():
    g4 = FiniteField(2, 2)
    T = Matrix.from_values(g4, [[1, 1], [0, 1]])
    res = enumerate_orbref0(T)
    assert res.equal


def test_enumerate_nilpotent_j2_gf3_equal():
    g3 = FiniteField(3)
    res = enumerate_orbref0(Matrix.jordan_block(g3, 0, 2))
    assert res.equal
    assert res.orbref0_size == res.forb_size == 3


def test_enumerate_budget():
    g4 = FiniteField(2, 2)
    with pytest.raises(BudgetExceeded):
        enumerate_orbref0(Matrix.identity(g4, 2), budget=100)


def test_scaled_orbit_inside_orbref0_and_scalar_closure():
    g3 = FiniteField(3)
    T = Matrix.from_values(g3, [[1, 1], [0, 1]])
    res = enumerate_orbref0(T)
    members = set(res.members)
    scaled = power_orbit(T).scaled_matrices()
    assert scaled <= members
    assert len(scaled) == res.forb_size
    # members absorb scalars: lam * S stays a member for every lam
    for S in res.members:
        for lam in g3.elements():
            assert S.scale(lam) in members


def test_orbit_members_commute_noncommuting_member_certifies_inequality():
    g3 = FiniteField(3)
    T = Matrix.from_values(g3, [[1, 1], [0, 1]])
    res = enumerate_orbref0(T)
    for P in power_orbit(T).scaled_matrices():
        assert commutator_is_zero(P, T)[0]
    noncommuting = [S for S in res.members if not commutator_is_zero(S, T)[0]]
    assert bool(noncommuting) == (not res.equal)


def test_rigidity_clean_for_small_nilpotents():
    g3 = FiniteField(3)
    assert rigidity_violations(Matrix.jordan_block(g3, 0, 2)) == []
    g2 = FiniteField(2)
    J21 = Matrix.block_diag([Matrix.jordan_block(g2, 0, 2),
                             Matrix.jordan_block(g2, 0, 1)])
    assert rigidity_violations(J21) == []


def test_lone_3_chain_defeats_rigidity_and_equality():
    # The two-entry operator x -> (<x,e0> + <x,e1>) e2 lies in OrbRef0 of a
    # lone nilpotent 3-chain over every field but is no scaled power; the
    # exhaustive oracle must surface it.
    g2 = FiniteField(2)
    J3 = Matrix.jordan_block(g2, 0, 3)
    S = Matrix.from_values(g2, [[0, 0, 0], [0, 0, 0], [1, 1, 0]])
    ok, _ = orbref0_contains(J3, S)
    assert ok
    res = enumerate_orbref0(J3)
    assert not res.equal
    assert any(D == S for D in res.difference)
    bad = rigidity_violations(J3)
    assert bad  # S f = T f != 0 at f = e1 without S = T


# -- numeric residuals --------------------------------------------------------------

def test_residual_scaled_power_hits_zero():
    T = Matrix.from_values(QQ, [[1, 1], [0, 2]])
    S = matpow(T, 5).scale(QQ.parse("3/7"))
    rng = np.random.default_rng(1)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    trace = c_orbit_membership_residual(T, S, x, N=10)
    assert trace.min_up_to(4) > 1e-9
    assert trace.min_up_to(5) < 1e-9


def test_residual_zero_operator():
    T = Matrix.from_values(QQ, [[2, 0], [0, 3]])
    S = Matrix.zeros(QQ, 2)
    trace = c_orbit_membership_residual(T, S, [1.0, 2.0], N=5)
    assert trace.events[0] == (0, 0.0)


def test_residual_witness_closed_form():
    T = Matrix.block_diag([Matrix.jordan_block(QQ, 1, 3),
                           Matrix.jordan_block(QQ, 1, 1)])
    S = Matrix.from_values(QQ, [[0] * 4, [0] * 4, [1, 1, 0, 0], [0] * 4])
    trace = c_orbit_membership_residual(T, S, [1.0, 0.0, 0.0, 0.0], N=1000)
    assert trace.final < 0.01
    # running minima are nonincreasing
    values = [v for _, v in trace.events]
    assert values == sorted(values, reverse=True)


def test_residual_monotone_in_horizon():
    T = Matrix.jordan_block(QQ, 1, 2)
    S = Matrix.from_values(QQ, [[0, 0], [1, 1]])
    trace = c_orbit_membership_residual(T, S, [1.0, 1.0], N=500)
    assert trace.min_up_to(500) <= trace.min_up_to(100) <= trace.min_up_to(20)


# -- space scan ----------------------------------------------------------------------

def test_scan_counts_gf2_d2():
    g2 = FiniteField(2)
    res = scan_space(g2, 2, cache_path=None)
    assert res.total == 16
    assert res.counts["split"] + res.counts["nonsplit"] == 16
    # the shear is the only similarity class violating equality over GF(2)
    assert res.counts["split_not_equal"] > 0


def test_scan_dedup_matches_flat_scan():
    g3 = FiniteField(3)
    fast = scan_space(g3, 2, cache_path=None, dedup=True)
    slow = scan_space(g3, 2, cache_path=None, dedup=False)
    assert fast.counts == slow.counts
    assert fast.violations == slow.violations


def test_scan_workers_deterministic():
    g3 = FiniteField(3)
    results = [scan_space(g3, 2, cache_path=None, workers=w).as_dict()
               for w in (1, 2, 8)]
    assert results[0] == results[1] == results[2]


def test_scan_cache_resume(tmp_path):
    g2 = FiniteField(2)
    cache = str(tmp_path / "scan.jsonl")
    first = scan_space(g2, 2, cache_path=cache)
    assert first.from_cache == 0
    second = scan_space(g2, 2, cache_path=cache)
    assert second.from_cache == second.scanned == first.scanned
    assert second.counts == first.counts


def test_scan_nilpotent_filter_and_rigidity():
    g3 = FiniteField(3)
    res = scan_space(g3, 2, nilpotent_only=True, rigidity=True, cache_path=None)
    assert res.scanned == 9  # q^(d^2-d) nilpotent matrices
    assert res.counts["nilpotent"] == 9
    assert res.counts["split_not_equal"] == 0
    assert res.counts["rigidity_violating"] == 0


def test_matrix_from_scan_index_round_trip():
    g2 = FiniteField(2)
    seen = set()
    for i in range(16):
        M = matrix_from_scan_index(g2, 2, i)
        seen.add(tuple(tuple(r) for r in M.to_strings()))
    assert len(seen) == 16


def test_scan_d1_all_equal():
    # every 1x1 matrix is trivially settled by the enumeration itself
    g3 = FiniteField(3)
    res = scan_space(g3, 1, cache_path=None)
    assert res.total == 3
    assert res.counts["split_not_equal"] == 0
    assert res.counts["nonsplit"] == 0


def test_int_kernel_polynomials_match_matrix_level():
    # the scan's table-encoded char/min polys agree with the exact kernel
    import random

    from orbitref import char_poly, minimal_polynomial
    from orbitref.oracle import (
        _Tables,
        _char_poly_int,
        _encode_matrix,
        _min_poly_int,
    )

    rng = random.Random(9)
    for field in (FiniteField(2), FiniteField(3), FiniteField(2, 2)):
        tbl = _Tables(field)
        els = field.elements()
        for d in (1, 2, 3):
            for _ in range(20):
                M = Matrix(field, [[els[rng.randrange(len(els))]
                                    for _ in range(d)] for _ in range(d)])
                cols = _encode_matrix(tbl, M)
                cp_int = _char_poly_int(tbl, cols, d)
                cp = char_poly(M)
                assert [tbl.scalars[c] for c in cp_int] == list(cp.coeffs)
                mp_int = _min_poly_int(tbl, cols, d)
                mp = minimal_polynomial(M)
                assert [tbl.scalars[c] for c in mp_int] == list(mp.coeffs)


@pytest.mark.slow
def test_scan_gf9_full_space():
    # the extension-field equality over GF(9): every 2x2 matrix with split
    # minimal polynomial has OrbRef0 equal to its scaled power orbit
    g9 = FiniteField(3, 2)
    res = scan_space(g9, 2, workers=4, cache_path=None)
    assert res.total == 6561
    assert res.counts["split_not_equal"] == 0
