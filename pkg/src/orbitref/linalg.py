"""Dense exact/numeric matrix kernel: rank, powers, characteristic
polynomials, kernels, conjugation and commutators.

Exact elimination is fraction-free (Bareiss) over Q and Q(i) after clearing
row denominators, which bounds intermediate growth on conjugated test
matrices; finite fields use plain Gauss-Jordan.  Characteristic polynomials
come from the division-free Faddeev-LeVerrier recursion where the
characteristic allows it (char 0, or p > d) and otherwise from a
fraction-free expansion of det(tI - M) with polynomial entries.  Floating
complex matrices route rank questions through an SVD whose threshold comes
from the field descriptor, never from call sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from . import _gaussint as gi
from .errors import (
    MixedFields,
    NumericKindUnsupported,
    ShapeMismatch,
    Singular,
    WrongField,
)
from .fields import (
    KIND_COMPLEX,
    KIND_FINITE,
    KIND_GAUSSIAN,
    KIND_RATIONALS,
    Field,
    Scalar,
    embed,
)


class Matrix:
    """Immutable dense square matrix of scalars over one field."""

    __slots__ = ("field", "n", "rows")

    def __init__(self, field: Field, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if n == 0:
            raise ShapeMismatch("empty matrix")
        for r in rows:
            if len(r) != n:
                raise ShapeMismatch("matrix must be square")
            for s in r:
                if not isinstance(s, Scalar):
                    raise TypeError("matrix entries must be Scalars")
                if s.field != field:
                    raise MixedFields("entry field differs from matrix field")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *args):
        raise AttributeError("Matrix is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_values(cls, field: Field, rows) -> "Matrix":
        """Build from ints, scalar strings, Fractions or Scalars."""
        conv = []
        for r in rows:
            out = []
            for v in r:
                if isinstance(v, Scalar):
                    out.append(v)
                elif isinstance(v, int):
                    out.append(field.from_int(v))
                elif isinstance(v, str):
                    out.append(field.parse(v))
                elif isinstance(v, Fraction) and field.kind == KIND_RATIONALS:
                    out.append(Scalar(field, v))
                else:
                    raise TypeError(f"cannot coerce {v!r} into {field.name}")
            conv.append(out)
        return cls(field, conv)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one, zero = field.one(), field.zero()
        return cls(field, [[one if i == j else zero for j in range(n)]
                           for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, n: int) -> "Matrix":
        zero = field.zero()
        return cls(field, [[zero] * n for _ in range(n)])

    @classmethod
    def jordan_block(cls, field: Field, eigenvalue, size: int) -> "Matrix":
        """Lower-chain Jordan block: T e_k = lam e_k + e_{k+1}, T e_{m-1} = lam e_{m-1}."""
        lam = eigenvalue if isinstance(eigenvalue, Scalar) else (
            field.parse(eigenvalue) if isinstance(eigenvalue, str)
            else field.from_int(eigenvalue))
        one, zero = field.one(), field.zero()
        rows = [[zero] * size for _ in range(size)]
        for i in range(size):
            rows[i][i] = lam
            if i:
                rows[i][i - 1] = one
        return cls(field, rows)

    @classmethod
    def block_diag(cls, blocks) -> "Matrix":
        blocks = list(blocks)
        field = blocks[0].field
        n = sum(b.n for b in blocks)
        zero = field.zero()
        rows = [[zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            if b.field != field:
                raise MixedFields("all blocks must share one field")
            for i in range(b.n):
                for j in range(b.n):
                    rows[off + i][off + j] = b.rows[i][j]
            off += b.n
        return cls(field, rows)

    @classmethod
    def companion(cls, poly: "Polynomial") -> "Matrix":
        """Companion matrix of a monic polynomial (ones on the subdiagonal)."""
        if not poly.is_monic:
            raise ValueError("companion matrix needs a monic polynomial")
        field = poly.field
        d = poly.degree
        one, zero = field.one(), field.zero()
        rows = [[zero] * d for _ in range(d)]
        for i in range(1, d):
            rows[i][i - 1] = one
        for i in range(d):
            rows[i][d - 1] = -poly.coeffs[i]
        return cls(field, rows)

    # -- access ------------------------------------------------------------

    def __getitem__(self, key) -> Scalar:
        i, j = key
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(self.rows[i][j] for i in range(self.n))

    def to_strings(self) -> list[list[str]]:
        return [[str(s) for s in r] for r in self.rows]

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.field != self.field:
            raise MixedFields("matrices over different fields")
        if other.n != self.n:
            raise ShapeMismatch(f"dims {self.n} vs {other.n}")

    def __add__(self, other):
        self._check_same(other)
        return Matrix(self.field, [[a + b for a, b in zip(r1, r2)]
                                   for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check_same(other)
        return Matrix(self.field, [[a - b for a, b in zip(r1, r2)]
                                   for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix(self.field, [[-a for a in r] for r in self.rows])

    def __matmul__(self, other):
        self._check_same(other)
        n = self.n
        cols = [other.col(j) for j in range(n)]
        out = []
        for i in range(n):
            ri = self.rows[i]
            out.append([_dot(ri, cols[j]) for j in range(n)])
        return Matrix(self.field, out)

    def scale(self, c) -> "Matrix":
        c = c if isinstance(c, Scalar) else self.field.from_int(c)
        return Matrix(self.field, [[a if a.is_zero else c * a for a in r]
                                   for r in self.rows])

    def add_scalar_to_diagonal(self, c: Scalar) -> "Matrix":
        rows = [list(r) for r in self.rows]
        for i in range(self.n):
            rows[i][i] = rows[i][i] + c
        return Matrix(self.field, rows)

    def __pow__(self, k: int) -> "Matrix":
        return matpow(self, k)

    def apply(self, vec):
        """Matrix-vector product on a tuple of scalars."""
        if len(vec) != self.n:
            raise ShapeMismatch("vector length mismatch")
        return tuple(_dot(r, vec) for r in self.rows)

    def trace(self) -> Scalar:
        t = self.field.zero()
        for i in range(self.n):
            t = t + self.rows[i][i]
        return t

    @property
    def is_zero(self) -> bool:
        return all(s.is_zero for r in self.rows for s in r)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and other.field == self.field
                and other.rows == self.rows)

    def __hash__(self):
        return hash((self.field, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(str(s) for s in r) for r in self.rows)
        return f"Matrix({self.field.name}, [{body}])"


def _dot(row, col):
    # skipping zero terms pays off on the block-diagonal matrices that
    # dominate this package's workloads
    acc = None
    for a, b in zip(row, col):
        if a.is_zero or b.is_zero:
            continue
        term = a * b
        acc = term if acc is None else acc + term
    if acc is None:
        return row[0].field.zero()
    return acc


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Coefficients from the constant term up; no trailing zeros."""

    field: Field
    coeffs: tuple[Scalar, ...]

    @classmethod
    def from_scalars(cls, field: Field, coeffs) -> "Polynomial":
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        return cls(field, tuple(coeffs))

    @classmethod
    def from_ints(cls, field: Field, coeffs) -> "Polynomial":
        return cls.from_scalars(field, [field.from_int(c) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1].is_one

    def evaluate(self, s: Scalar) -> Scalar:
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def evaluate_matrix(self, M: Matrix) -> Matrix:
        acc = Matrix.zeros(M.field, M.n)
        for c in reversed(self.coeffs):
            acc = (acc @ M) + Matrix.identity(M.field, M.n).scale(c)
        return acc

    def deflate(self, root: Scalar) -> tuple["Polynomial", Scalar]:
        """Synthetic division by (t - root): (quotient, remainder)."""
        acc = self.field.zero()
        out = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            out.append(acc)
        rem = out.pop()
        return Polynomial.from_scalars(self.field, reversed(out)), rem

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if c.is_zero:
                continue
            cs = str(c)
            if e == 0:
                term = cs
            else:
                tpart = "t" if e == 1 else f"t^{e}"
                if cs == "1":
                    term = tpart
                elif cs == "-1":
                    term = f"-{tpart}"
                else:
                    term = f"{cs}{tpart}" if _is_simple_coeff(cs) else f"({cs}){tpart}"
            if parts and not term.startswith("-"):
                parts.append("+" + term)
            else:
                parts.append(term)
        return "".join(parts)


def _is_simple_coeff(cs: str) -> bool:
    return "+" not in cs[1:] and "-" not in cs[1:]


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------

def _int_divx(a: int, b: int) -> int:
    q, r = divmod(a, b)
    assert r == 0, "Bareiss division was not exact"
    return q


def _bareiss_rank(rows, mul, sub, divx, is_zero) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0]) if n else 0
    rank = 0
    prev = None
    while rank < n and rank < m:
        pi = pj = -1
        for i in range(rank, n):
            for j in range(rank, m):
                if not is_zero(a[i][j]):
                    pi, pj = i, j
                    break
            if pi >= 0:
                break
        if pi < 0:
            break
        a[rank], a[pi] = a[pi], a[rank]
        if pj != rank:
            for row in a:
                row[rank], row[pj] = row[pj], row[rank]
        piv = a[rank][rank]
        for i in range(rank + 1, n):
            air = a[i][rank]
            for j in range(rank + 1, m):
                t = sub(mul(piv, a[i][j]), mul(air, a[rank][j]))
                if prev is not None:
                    t = divx(t, prev)
                a[i][j] = t
        prev = piv
        rank += 1
    return rank


def _cleared_int_rows(M: Matrix) -> list[list[int]]:
    out = []
    for r in M.rows:
        denom = lcm(*(s.value.denominator for s in r)) if r else 1
        out.append([int(s.value * denom) for s in r])
    return out


def _cleared_gint_rows(M: Matrix) -> list[list[gi.Gint]]:
    out = []
    for r in M.rows:
        denoms = []
        for s in r:
            re_part, im_part = s.value
            denoms.append(re_part.denominator)
            denoms.append(im_part.denominator)
        denom = lcm(*denoms)
        row = []
        for s in r:
            re_part, im_part = s.value
            row.append((int(re_part * denom), int(im_part * denom)))
        out.append(row)
    return out


def _rank_field_elim(M: Matrix) -> int:
    rows = [list(r) for r in M.rows]
    n = M.n
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, n) if not rows[i][col].is_zero), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col]
        for i in range(rank + 1, n):
            if rows[i][col].is_zero:
                continue
            f = rows[i][col] / inv
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == n:
            break
    return rank


def to_ndarray(M: Matrix) -> np.ndarray:
    """Complex ndarray view of a Q, Q(i) or complex matrix."""
    kind = M.field.kind
    out = np.empty((M.n, M.n), dtype=complex)
    for i, r in enumerate(M.rows):
        for j, s in enumerate(r):
            if kind == KIND_COMPLEX:
                out[i, j] = s.value
            elif kind == KIND_RATIONALS:
                out[i, j] = float(s.value)
            elif kind == KIND_GAUSSIAN:
                out[i, j] = complex(float(s.value[0]), float(s.value[1]))
            else:
                raise WrongField("finite-field matrix has no complex form")
    return out


def rank(M: Matrix) -> int:
    """Exact rank via fraction-free elimination; numeric rank by SVD with the
    descriptor tolerance for complex matrices."""
    kind = M.field.kind
    if kind == KIND_COMPLEX:
        s = np.linalg.svd(to_ndarray(M), compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.count_nonzero(s > M.field.tol * s[0]))
    if kind == KIND_FINITE:
        return _rank_field_elim(M)
    if kind == KIND_RATIONALS:
        return _bareiss_rank(_cleared_int_rows(M), int.__mul__, int.__sub__,
                             _int_divx, lambda x: x == 0)
    if kind == KIND_GAUSSIAN:
        def gdivx(a, b):
            out = gi.gdivexact(a, b)
            assert out is not None, "Bareiss division was not exact"
            return out
        return _bareiss_rank(_cleared_gint_rows(M), gi.gmul, gi.gsub, gdivx,
                             lambda z: z == (0, 0))
    raise WrongField(f"rank unsupported over {M.field.name}")


# ---------------------------------------------------------------------------
# powers, characteristic and minimal polynomials
# ---------------------------------------------------------------------------

def matpow(M: Matrix, k: int) -> Matrix:
    """M^k by binary exponentiation; M^0 is the identity."""
    if not isinstance(k, int) or k < 0:
        raise ValueError("exponent must be a nonnegative integer")
    result = Matrix.identity(M.field, M.n)
    base = M
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def char_poly(M: Matrix) -> Polynomial:
    """Monic characteristic polynomial det(tI - M), exactly."""
    kind = M.field.kind
    if kind == KIND_COMPLEX:
        raise NumericKindUnsupported("char_poly needs an exact matrix")
    if kind == KIND_FINITE and M.field.p <= M.n:
        return _char_poly_polyentry(M)
    return _char_poly_faddeev(M)


def _char_poly_faddeev(M: Matrix) -> Polynomial:
    # division-free except for /k, hence the p > d guard for finite fields
    f = M.field
    n = M.n
    down = [f.one()]
    N = Matrix.identity(f, n)
    for k in range(1, n + 1):
        MN = M @ N
        c = -(MN.trace() / f.from_int(k))
        down.append(c)
        N = MN.add_scalar_to_diagonal(c)
    return Polynomial.from_scalars(f, reversed(down))


def _pp_trim(c: list[Scalar]) -> tuple[Scalar, ...]:
    while c and c[-1].is_zero:
        c.pop()
    return tuple(c)


def _pp_mul(a, b, f: Field):
    if not a or not b:
        return ()
    zero = f.zero()
    out = [zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai.is_zero:
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return _pp_trim(out)


def _pp_sub(a, b, f: Field):
    zero = f.zero()
    out = [zero] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = out[i] - c
    return _pp_trim(out)


def _pp_divexact(a, b, f: Field):
    # long division over a field; Bareiss guarantees zero remainder
    a = list(a)
    q = [f.zero()] * max(len(a) - len(b) + 1, 0)
    binv = b[-1]
    while len(a) >= len(b):
        if a[-1].is_zero:
            a.pop()
            continue
        fac = a[-1] / binv
        shift = len(a) - len(b)
        q[shift] = fac
        for i, bi in enumerate(b):
            a[shift + i] = a[shift + i] - fac * bi
        a.pop()
    assert not _pp_trim(a), "polynomial Bareiss division was not exact"
    return tuple(q)


def _char_poly_polyentry(M: Matrix) -> Polynomial:
    """det(tI - M) by fraction-free elimination with GF(p)[t] entries.

    Valid at any characteristic; used when p <= d rules out dividing by k.
    """
    f = M.field
    n = M.n
    one, zero = f.one(), f.zero()
    a: list[list[tuple[Scalar, ...]]] = []
    for i in range(n):
        row = []
        for j, s in enumerate(M.rows[i]):
            const = -s
            lin = one if i == j else zero
            row.append(_pp_trim([const, lin]))
        a.append(row)
    sign = 1
    prev = None
    for k in range(n - 1):
        pi = pj = -1
        for i in range(k, n):
            for j in range(k, n):
                if a[i][j]:
                    pi, pj = i, j
                    break
            if pi >= 0:
                break
        if pi < 0:
            return Polynomial.from_scalars(f, [])  # cannot happen: det is monic
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = _pp_sub(_pp_mul(piv, a[i][j], f), _pp_mul(a[i][k], a[k][j], f), f)
                if prev is not None:
                    t = _pp_divexact(t, prev, f)
                a[i][j] = t
        prev = piv
    det = a[n - 1][n - 1]
    if sign < 0:
        det = tuple(-c for c in det)
    poly = Polynomial.from_scalars(f, det)
    assert poly.is_monic and poly.degree == n
    return poly


def minimal_polynomial(M: Matrix) -> Polynomial:
    """Least-degree monic p with p(M) = 0, via the first Krylov dependence
    among vec(I), vec(M), vec(M^2), ..."""
    if M.field.kind == KIND_COMPLEX:
        raise NumericKindUnsupported("minimal_polynomial needs an exact matrix")
    f = M.field
    n = M.n
    # reduced rows with bookkeeping of the combination that produced them
    basis: list[tuple[list[Scalar], list[Scalar], int]] = []  # (vector, combo, pivot)
    power = Matrix.identity(f, n)
    for deg in range(n + 1):
        vec = [s for r in power.rows for s in r]
        combo = [f.zero()] * (n + 2)
        combo[deg] = f.one()
        for bvec, bcombo, piv in basis:
            c = vec[piv]
            if c.is_zero:
                continue
            vec = [x - c * y for x, y in zip(vec, bvec)]
            combo = [x - c * y for x, y in zip(combo, bcombo)]
        piv = next((i for i, x in enumerate(vec) if not x.is_zero), None)
        if piv is None:
            lead = combo[deg]
            coeffs = [c / lead for c in combo[:deg + 1]]
            return Polynomial.from_scalars(f, coeffs)
        inv = vec[piv]
        vec = [x / inv for x in vec]
        combo = [x / inv for x in combo]
        basis.append((vec, combo, piv))
        power = power @ M
    raise AssertionError("Cayley-Hamilton guarantees a dependence by degree n")


# ---------------------------------------------------------------------------
# kernels, inverses, conjugation, commutators
# ---------------------------------------------------------------------------

def kernel_basis(M: Matrix) -> list[tuple[Scalar, ...]]:
    """Exact null-space basis (empty iff M invertible); deterministic order."""
    if M.field.kind == KIND_COMPLEX:
        raise NumericKindUnsupported(
            "kernel_basis is exact-only; use rank() for numeric nullity")
    f = M.field
    n = M.n
    rows = [list(r) for r in M.rows]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if not rows[i][col].is_zero), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][col].is_zero:
                c = rows[i][col]
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    zero, one = f.zero(), f.one()
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for ri, pc in enumerate(pivots):
            v[pc] = -rows[ri][fc]
        basis.append(tuple(v))
    return basis


def inverse(P: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan; raises Singular."""
    if P.field.kind == KIND_COMPLEX:
        raise NumericKindUnsupported("inverse is exact-only here")
    f = P.field
    n = P.n
    aug = [list(P.rows[i]) + [f.one() if i == j else f.zero() for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if not aug[i][col].is_zero), None)
        if piv is None:
            raise Singular("matrix is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [x / inv for x in aug[col]]
        for i in range(n):
            if i != col and not aug[i][col].is_zero:
                c = aug[i][col]
                aug[i] = [x - c * y for x, y in zip(aug[i], aug[col])]
    return Matrix(f, [r[n:] for r in aug])


def conjugate(M: Matrix, P: Matrix) -> Matrix:
    """P M P^{-1}, exactly."""
    M._check_same(P)
    return P @ M @ inverse(P)


def commutator_is_zero(S: Matrix, T: Matrix) -> tuple[bool, Matrix]:
    """Whether ST = TS; returns the commutator ST - TS alongside.

    Exact for exact kinds.  For complex matrices the test is
    max-entry |ST-TS| <= tol * n * max(1,|S|_max) * max(1,|T|_max).
    """
    S._check_same(T)
    C = (S @ T) - (T @ S)
    if S.field.kind != KIND_COMPLEX:
        return C.is_zero, C
    tol = S.field.tol
    s_max = max((abs(x.value) for r in S.rows for x in r), default=0.0)
    t_max = max((abs(x.value) for r in T.rows for x in r), default=0.0)
    bound = tol * S.n * max(1.0, s_max) * max(1.0, t_max)
    c_max = max((abs(x.value) for r in C.rows for x in r), default=0.0)
    return c_max <= bound, C


def embed_matrix(M: Matrix, target: Field) -> Matrix:
    """Entrywise embedding along Q -> Q(i) -> C."""
    if M.field == target:
        return M
    return Matrix(target, [[embed(s, target) for s in r] for r in M.rows])
