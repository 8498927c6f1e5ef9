"""Exact matrix kernel: ranks, powers, characteristic polynomials, kernels,
conjugation, commutators."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from orbitref import (
    ComplexFloats,
    FiniteField,
    Matrix,
    NumericKindUnsupported,
    Polynomial,
    QI,
    QQ,
    Scalar,
    Singular,
    char_poly,
    commutator_is_zero,
    conjugate,
    inverse,
    kernel_basis,
    matpow,
    minimal_polynomial,
    rank,
)


def _rand_scalar_qi(rng, span=4):
    return Scalar(QI, (Fraction(rng.randint(-span, span)),
                       Fraction(rng.randint(-span, span))))


def _rand_matrix_qi(rng, n, span=4):
    return Matrix(QI, [[_rand_scalar_qi(rng, span) for _ in range(n)]
                       for _ in range(n)])


def _rand_invertible_qi(rng, n):
    while True:
        P = _rand_matrix_qi(rng, n, span=2)
        if rank(P) == n:
            return P


# -- rank -------------------------------------------------------------------

def test_rank_examples():
    assert rank(Matrix.zeros(QQ, 3)) == 0
    assert rank(Matrix.identity(QQ, 4)) == 4
    assert rank(Matrix.jordan_block(QQ, 0, 3)) == 2


def test_rank_numeric_matches_exact():
    rng = random.Random(3)
    c = ComplexFloats()
    for _ in range(20):
        M = _rand_matrix_qi(rng, 4)
        Mf = Matrix(c, [[Scalar(c, complex(float(s.value[0]), float(s.value[1])))
                         for s in row] for row in M.rows])
        assert rank(Mf) == rank(M)


def test_rank_nullity_exhaustive_m2_gf2():
    g2 = FiniteField(2)
    for vals in itertools.product(range(2), repeat=4):
        M = Matrix.from_values(g2, [[vals[0], vals[1]], [vals[2], vals[3]]])
        assert rank(M) + len(kernel_basis(M)) == 2


def test_rank_nullity_random_qi():
    rng = random.Random(7)
    for _ in range(25):
        M = _rand_matrix_qi(rng, 5)
        assert rank(M) + len(kernel_basis(M)) == 5


# -- powers -----------------------------------------------------------------

def test_matpow_examples():
    J2 = Matrix.jordan_block(QQ, 0, 2)
    assert matpow(J2, 2).is_zero
    I4 = Matrix.identity(QQ, 4)
    assert matpow(I4, 10 ** 6) == I4
    g5 = FiniteField(5)
    shear = Matrix.from_values(g5, [[1, 1], [0, 1]])
    assert matpow(shear, 5) == Matrix.identity(g5, 2)


def test_matpow_additive():
    rng = random.Random(11)
    M = _rand_matrix_qi(rng, 3, span=2)
    for a, b in [(0, 3), (2, 2), (1, 4)]:
        assert matpow(M, a + b) == matpow(M, a) @ matpow(M, b)


# -- characteristic polynomial ----------------------------------------------

def test_char_poly_examples():
    assert str(char_poly(Matrix.jordan_block(QQ, 0, 2))) == "t^2"
    assert str(char_poly(Matrix.from_values(QQ, [[1, 0], [0, 2]]))) == "t^2-3t+2"
    g2 = FiniteField(2)
    shear = Matrix.from_values(g2, [[1, 1], [0, 1]])
    # p = 2 <= d = 2 exercises the polynomial-entry fallback
    assert str(char_poly(shear)) == "t^2+1"


def test_char_poly_small_characteristic_fallback_matches_faddeev():
    # GF(5) with d = 3 < p runs Faddeev-LeVerrier; compare the fallback on
    # the same matrix by forcing it through a GF(3) twin where p <= d
    g3 = FiniteField(3)
    rng = random.Random(13)
    els = g3.elements()
    for _ in range(30):
        M = Matrix(g3, [[els[rng.randrange(3)] for _ in range(3)]
                        for _ in range(3)])
        poly = char_poly(M)
        assert poly.is_monic and poly.degree == 3
        assert poly.evaluate_matrix(M).is_zero  # Cayley-Hamilton


def test_char_poly_similarity_invariant():
    rng = random.Random(17)
    for n in (2, 3, 4, 5, 6):
        for _ in range(6):
            M = _rand_matrix_qi(rng, n, span=3)
            P = _rand_invertible_qi(rng, n)
            assert char_poly(conjugate(M, P)) == char_poly(M)


def test_cayley_hamilton_qi():
    rng = random.Random(19)
    for n in (2, 3, 4, 5, 6):
        M = _rand_matrix_qi(rng, n, span=3)
        assert char_poly(M).evaluate_matrix(M).is_zero


def test_companion_round_trip():
    poly = Polynomial.from_ints(QQ, [1, 0, 1])  # t^2 + 1
    C = Matrix.companion(poly)
    assert char_poly(C) == poly


def test_minimal_polynomial():
    # scalar matrix: degree 1; generic diagonal: product of distinct factors
    M = Matrix.identity(QQ, 3).scale(QQ.from_int(2))
    assert str(minimal_polynomial(M)) == "t-2"
    D = Matrix.from_values(QQ, [[1, 0, 0], [0, 1, 0], [0, 0, 2]])
    assert str(minimal_polynomial(D)) == "t^2-3t+2"
    J = Matrix.block_diag([Matrix.jordan_block(QQ, 0, 2),
                           Matrix.jordan_block(QQ, 0, 1)])
    assert str(minimal_polynomial(J)) == "t^2"
    g2 = FiniteField(2)
    shear = Matrix.from_values(g2, [[1, 1], [0, 1]])
    assert str(minimal_polynomial(shear)) == "t^2+1"


# -- kernels ----------------------------------------------------------------

def test_kernel_examples():
    assert kernel_basis(Matrix.identity(QQ, 3)) == []
    z = kernel_basis(Matrix.zeros(QQ, 2))
    assert len(z) == 2
    k = kernel_basis(Matrix.jordan_block(QQ, 0, 3))
    assert len(k) == 1
    assert [str(v) for v in k[0]] == ["0", "0", "1"]  # last chain vector


def test_kernel_numeric_unsupported():
    c = ComplexFloats()
    with pytest.raises(NumericKindUnsupported):
        kernel_basis(Matrix.identity(c, 2))


# -- commutators and conjugation ---------------------------------------------

def test_commutator_examples():
    T = Matrix.from_values(QQ, [[1, 0], [1, 1]])
    assert commutator_is_zero(T, T)[0]
    assert commutator_is_zero(Matrix.identity(QQ, 2), T)[0]
    S = Matrix.from_values(QQ, [[0, 0], [1, 1]])
    zero, C = commutator_is_zero(S, T)
    assert not zero and not C.is_zero


def test_conjugate_examples():
    M = Matrix.from_values(QQ, [[1, 0], [0, 2]])
    assert conjugate(M, Matrix.identity(QQ, 2)) == M
    P = Matrix.from_values(QQ, [[1, 1], [0, 1]])
    assert conjugate(M, P) == Matrix.from_values(QQ, [[1, 1], [0, 2]])
    # round trip
    assert conjugate(conjugate(M, P), inverse(P)) == M


def test_conjugate_preserves_nilpotency():
    rng = random.Random(23)
    J = Matrix.block_diag([Matrix.jordan_block(QI, 0, 3),
                           Matrix.jordan_block(QI, 0, 2)])
    for _ in range(10):
        P = _rand_invertible_qi(rng, 5)
        assert matpow(conjugate(J, P), 5).is_zero


def test_singular_inverse_rejected():
    with pytest.raises(Singular):
        inverse(Matrix.jordan_block(QQ, 0, 2))


def test_pow_operator():
    M = Matrix.from_values(QQ, [[1, 1], [0, 1]])
    assert M ** 3 == Matrix.from_values(QQ, [[1, 3], [0, 1]])


@given(st.integers(0, 12), st.integers(0, 12),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_matpow_additive_property(a, b, entries):
    M = Matrix.from_values(QQ, [entries[:2], entries[2:]])
    assert matpow(M, a + b) == matpow(M, a) @ matpow(M, b)
