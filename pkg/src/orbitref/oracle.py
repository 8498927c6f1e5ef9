"""Definition-level ground truth for orbit reflexivity questions.

Over a finite field GF(q) the scaled power orbit {lam T^n : n >= 1} is
finite (the power sequence is eventually periodic by pigeonhole), so
membership of S in OrbRef0(T) -- "S x lies in the scaled power orbit of x,
for every x" -- is decidable by brute force, and the full set OrbRef0(T) is
computable by scanning all q^(d^2) candidate matrices.

Exponents start at 1 throughout: orbit sets are {lam T^n : n >= 1}, so the
identity participates exactly when some positive power returns to it (T
invertible).  Including n = 0 would admit, for any Jordan block J_m with
m >= 2, the operator sending e_0 and e_1 both to the end of the chain -- an
operator outside the scaled orbit that passes every per-vector test -- and
the nilpotent and extension-field equalities verified by the acceptance
suite would be false with no convention making them true.

The enumeration walks candidates by their columns (images of the basis
vectors) in basis-first order: a column outside the orbit set of its basis
vector kills every candidate sharing that prefix at once, which is the
early-exit that makes desk-scale budgets practical.  Everything here is
exact integer arithmetic on table-encoded field elements; Matrix objects
only appear at the API boundary.

The numeric half is the membership residual for the complex criterion:
dist(Sx, C*T^n x), the norm of the component of Sx orthogonal to T^n x,
computed on renormalised direction iterates so unbounded ||T^n x|| growth
cancels.  It never claims membership -- it reports decay consistent with
membership at a tolerance up to a horizon.

`scan_space` sweeps every d x d matrix over GF(q) (d <= 3), classifies the
minimal polynomial, and checks OrbRef0 = scaled-power-orbit per matrix.
Verdicts are similarity invariants, so by default the scan memoises the
expensive enumeration per (characteristic, minimal polynomial) class --
which determines the similarity class for d <= 3 -- and a flag forces the
plain per-matrix scan.  Results persist to a JSON-lines cache keyed by
(q, d, matrix hash); re-runs skip finished matrices.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

import numpy as np

from .errors import BudgetExceeded, MixedFields, ShapeMismatch, WrongField
from .fields import KIND_FINITE, FiniteField, Scalar
from .linalg import Matrix, to_ndarray

DEFAULT_CONTAINS_BUDGET = 10 ** 6
DEFAULT_ENUM_BUDGET = 2 ** 24


# ---------------------------------------------------------------------------
# integer-encoded field kernel
# ---------------------------------------------------------------------------

class _Tables:
    """Index-encoded GF(q) arithmetic: elements are 0..q-1 in the field's
    canonical element order, ops are table lookups."""

    def __init__(self, field: FiniteField):
        self.field = field
        els = field.elements()
        self.q = len(els)
        self.scalars = els
        index = {s.value: i for i, s in enumerate(els)}
        self.add = [[index[(a + b).value] for b in els] for a in els]
        self.mul = [[index[(a * b).value] for b in els] for a in els]
        self.neg = [index[(-a).value] for a in els]

    def vec_add(self, x, y):
        add = self.add
        return tuple(add[a][b] for a, b in zip(x, y))

    def vec_scale(self, s, x):
        row = self.mul[s]
        return tuple(row[a] for a in x)

    def mat_vec(self, cols, x):
        acc = None
        for xi, col in zip(x, cols):
            if xi == 0:
                continue
            term = self.vec_scale(xi, col)
            acc = term if acc is None else self.vec_add(acc, term)
        return acc if acc is not None else (0,) * len(cols[0])

    def mat_mul(self, a_cols, b_cols):
        return tuple(self.mat_vec(a_cols, b) for b in b_cols)


def _encode_matrix(tbl: _Tables, M: Matrix):
    """Matrix -> tuple of column vectors of element indices."""
    field = tbl.field
    return tuple(
        tuple(field.element_index(M[i, j].value) for i in range(M.n))
        for j in range(M.n)
    )


def _decode_matrix(tbl: _Tables, cols, d: int) -> Matrix:
    field = tbl.field
    rows = [[tbl.scalars[cols[j][i]] for j in range(d)] for i in range(d)]
    return Matrix(field, rows)


def _identity_cols(q: int, d: int):
    return tuple(tuple(1 if i == j else 0 for i in range(d)) for j in range(d))


def _vec_index(x, q: int) -> int:
    idx = 0
    for c in reversed(x):
        idx = idx * q + c
    return idx


def _all_vectors(q: int, d: int):
    out = []
    for idx in range(q ** d):
        v = idx
        digits = []
        for _ in range(d):
            digits.append(v % q)
            v //= q
        out.append(tuple(digits))
    return out


def _power_cols(tbl: _Tables, Tcols, d: int):
    """Distinct powers T^0, T^1, ... plus (tail, cycle) of the sequence."""
    seen: dict[tuple, int] = {}
    powers = []
    cur = _identity_cols(tbl.q, d)
    k = 0
    while cur not in seen:
        seen[cur] = k
        powers.append(cur)
        cur = tbl.mat_mul(Tcols, cur)
        k += 1
    first_repeat = seen[cur]
    return powers, first_repeat, k - first_repeat


def _positive_powers(powers, tail: int):
    """The distinct matrices among {T^n : n >= 1}.  When the sequence is
    purely cyclic (tail 0) the identity recurs as T^cycle and stays in."""
    return powers if tail == 0 else powers[1:]


def _orbit_masks(tbl: _Tables, powers, tail: int, d: int):
    """Per-vector membership bitmasks: bit v of masks[x] says v is lam*(T^n x)
    for some lam and some n >= 1."""
    q = tbl.q
    vectors = _all_vectors(q, d)
    masks = []
    pos = _positive_powers(powers, tail)
    for x in vectors:
        m = 1  # zero vector always present (lam = 0)
        for P in pos:
            y = tbl.mat_vec(P, x)
            for lam in range(1, q):
                m |= 1 << _vec_index(tbl.vec_scale(lam, y), q)
        masks.append(m)
    return vectors, masks


def _scaled_orbit_cols(tbl: _Tables, powers, tail: int, d: int) -> frozenset:
    """All matrices lam * T^n with n >= 1 (including 0), column-encoded."""
    q = tbl.q
    out = {tuple(tuple(0 for _ in range(d)) for _ in range(d))}
    for P in _positive_powers(powers, tail):
        for lam in range(1, q):
            out.add(tuple(tbl.vec_scale(lam, col) for col in P))
    return frozenset(out)


def _enumerate_members(tbl: _Tables, Tcols, d: int):
    """Column scan of all q^(d^2) candidates with basis-first early exit."""
    q = tbl.q
    powers, tail, cycle = _power_cols(tbl, Tcols, d)
    vectors, masks = _orbit_masks(tbl, powers, tail, d)
    basis = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    allowed_cols = []
    for j, e in enumerate(basis):
        mask = masks[_vec_index(e, q)]
        allowed_cols.append([v for v in vectors if (mask >> _vec_index(v, q)) & 1])
    check_vecs = []
    for x in vectors:
        nonzero = [(i, c) for i, c in enumerate(x) if c]
        if len(nonzero) >= 2:  # scalar multiples of basis vectors pass by scaling
            check_vecs.append((nonzero, masks[_vec_index(x, q)]))
    members = []
    vec_add = tbl.vec_add
    vec_scale = tbl.vec_scale
    for cols in product(*allowed_cols):
        ok = True
        for nonzero, mask in check_vecs:
            acc = None
            for i, c in nonzero:
                term = vec_scale(c, cols[i])
                acc = term if acc is None else vec_add(acc, term)
            if not (mask >> _vec_index(acc, q)) & 1:
                ok = False
                break
        if ok:
            members.append(cols)
    forb = _scaled_orbit_cols(tbl, powers, tail, d)
    member_set = set(members)
    assert forb <= member_set, "scaled power orbit must sit inside OrbRef0"
    return members, forb, tail, cycle


def _positive_power_pairs(powers, tail: int, cycle: int):
    """(exponent, T^exponent) for the distinct positive powers."""
    pairs = [(e, powers[e]) for e in range(1, len(powers))]
    if tail == 0:
        pairs.append((cycle, powers[0]))  # identity recurs at T^cycle
    return pairs


def _rigidity_violations_cols(tbl: _Tables, power_pairs, members, d: int):
    """Scaled-power rigidity: if S f = beta T^k f != 0 for some vector f and
    k >= 1, then S must equal beta T^k as a matrix.  Returns violators."""
    q = tbl.q
    vectors = _all_vectors(q, d)
    violations = []
    for cols in members:
        for f in vectors:
            y = tbl.mat_vec(cols, f)
            if all(c == 0 for c in y):
                continue
            for k, P in power_pairs:
                z = tbl.mat_vec(P, f)
                if all(c == 0 for c in z):
                    continue
                for beta in range(1, q):
                    if tbl.vec_scale(beta, z) == y:
                        expected = tuple(tbl.vec_scale(beta, col) for col in P)
                        if cols != expected:
                            violations.append((cols, f, beta, k))
    return violations


# ---------------------------------------------------------------------------
# public API: orbits, membership, enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSet:
    """The finite set of distinct powers of T over GF(q), with the tail and
    cycle lengths of the power sequence; scaled multiples are implicit."""

    base: Matrix
    powers: tuple[Matrix, ...]
    tail: int
    cycle: int

    def scaled_matrices(self) -> set[Matrix]:
        """The scaled power orbit {lam T^n : n >= 1} (0 included via lam = 0)."""
        field = self.base.field
        out = {Matrix.zeros(field, self.base.n)}
        positive = self.powers if self.tail == 0 else self.powers[1:]
        for lam in field.elements():
            if lam.is_zero:
                continue
            for P in positive:
                out.add(P.scale(lam))
        return out


def _require_finite(M: Matrix):
    if M.field.kind != KIND_FINITE:
        raise WrongField("orbit oracle operations need a finite-field matrix")


def power_orbit(T: Matrix) -> OrbitSet:
    """Enumerate T^0, T^1, ... until the first repeated matrix."""
    _require_finite(T)
    tbl = _Tables(T.field)
    Tcols = _encode_matrix(tbl, T)
    powers, tail, cycle = _power_cols(tbl, Tcols, T.n)
    return OrbitSet(
        base=T,
        powers=tuple(_decode_matrix(tbl, P, T.n) for P in powers),
        tail=tail,
        cycle=cycle,
    )


def orbref0_contains(T: Matrix, S: Matrix,
                     budget: int = DEFAULT_CONTAINS_BUDGET
                     ) -> tuple[bool, Optional[tuple[Scalar, ...]]]:
    """Exact check that S x lies in {lam T^k x} for every x in GF(q)^d.

    Returns (True, None) or (False, first failing vector in index order).
    """
    _require_finite(T)
    if S.field != T.field:
        raise MixedFields("candidate and base matrix fields differ")
    if S.n != T.n:
        raise ShapeMismatch(f"dims {S.n} vs {T.n}")
    q = T.field.q
    d = T.n
    if q ** d > budget:
        raise BudgetExceeded(
            f"{q}^{d} vector checks exceed the budget of {budget}")
    tbl = _Tables(T.field)
    Tcols = _encode_matrix(tbl, T)
    Scols = _encode_matrix(tbl, S)
    powers, tail, _ = _power_cols(tbl, Tcols, d)
    positive = _positive_powers(powers, tail)
    for x in _all_vectors(q, d):
        y = tbl.mat_vec(Scols, x)
        if all(c == 0 for c in y):
            continue  # lam = 0 always fits
        hit = False
        for P in positive:
            z = tbl.mat_vec(P, x)
            i = next((i for i, c in enumerate(z) if c), None)
            if i is None:
                continue
            lam = _field_div(tbl, y[i], z[i])
            if tbl.vec_scale(lam, z) == y:
                hit = True
                break
        if not hit:
            failing = tuple(tbl.scalars[c] for c in x)
            return False, failing
    return True, None


def _field_div(tbl: _Tables, a: int, b: int) -> int:
    # a / b with b != 0, via the scalar layer (tables carry no inverses)
    sa, sb = tbl.scalars[a], tbl.scalars[b]
    val = (sa / sb).value
    return tbl.field.element_index(val)


@dataclass(frozen=True)
class Orbref0Result:
    base: Matrix
    members: tuple[Matrix, ...]
    orbref0_size: int
    forb_size: int
    equal: bool
    difference: tuple[Matrix, ...]
    tail: int
    cycle: int

    def summary(self) -> dict:
        return {
            "orbref0_size": self.orbref0_size,
            "forb_size": self.forb_size,
            "equal": self.equal,
            "power_tail": self.tail,
            "power_cycle": self.cycle,
        }


def enumerate_orbref0(T: Matrix, budget: int = DEFAULT_ENUM_BUDGET) -> Orbref0Result:
    """The exact set OrbRef0(T) by exhaustive candidate scan, with the
    comparison against the scaled power orbit."""
    _require_finite(T)
    q = T.field.q
    d = T.n
    if q ** (d * d) > budget:
        raise BudgetExceeded(
            f"{q}^{d * d} candidates exceed the budget of {budget}")
    tbl = _Tables(T.field)
    Tcols = _encode_matrix(tbl, T)
    members, forb, tail, cycle = _enumerate_members(tbl, Tcols, d)
    diff = [cols for cols in members if cols not in forb]
    return Orbref0Result(
        base=T,
        members=tuple(_decode_matrix(tbl, c, d) for c in members),
        orbref0_size=len(members),
        forb_size=len(forb),
        equal=len(members) == len(forb),
        difference=tuple(_decode_matrix(tbl, c, d) for c in diff),
        tail=tail,
        cycle=cycle,
    )


def rigidity_violations(T: Matrix, budget: int = DEFAULT_ENUM_BUDGET) -> list[dict]:
    """Violations of scaled-power rigidity among the members of OrbRef0(T):
    S f = beta T^k f != 0 must force S = beta T^k."""
    _require_finite(T)
    q = T.field.q
    d = T.n
    if q ** (d * d) > budget:
        raise BudgetExceeded(
            f"{q}^{d * d} candidates exceed the budget of {budget}")
    tbl = _Tables(T.field)
    Tcols = _encode_matrix(tbl, T)
    members, _, _, _ = _enumerate_members(tbl, Tcols, d)
    powers, tail, cycle = _power_cols(tbl, Tcols, d)
    raw = _rigidity_violations_cols(tbl, _positive_power_pairs(powers, tail, cycle),
                                    members, d)
    out = []
    for cols, f, beta, k in raw:
        out.append({
            "member_rows": _decode_matrix(tbl, cols, d).to_strings(),
            "vector": [str(tbl.scalars[c]) for c in f],
            "beta": str(tbl.scalars[beta]),
            "power": k,
        })
    return out


# ---------------------------------------------------------------------------
# numeric membership residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualTrace:
    """Running minima of the point-to-line membership residual.

    events lists (n, value) whenever the minimum improves; min_up_to reads
    the running minimum at any horizon."""

    events: tuple[tuple[int, float], ...]
    horizon: int

    def min_up_to(self, n: int) -> float:
        best = float("inf")
        for k, v in self.events:
            if k > n:
                break
            best = v
        return best

    @property
    def final(self) -> float:
        return self.events[-1][1]


def c_orbit_membership_residual(T: Matrix, S: Matrix, x, N: int) -> ResidualTrace:
    """dist(Sx, C * T^n x) for n = 0..N, reported as running minima.

    Conventions: the line always contains 0 (lam = 0 is allowed), the
    distance is ||Sx|| when T^n x = 0 and Sx != 0, and 0 when both vanish.
    Directions are renormalised every step so growth in ||T^n x|| cancels.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if S.n != T.n:
        raise ShapeMismatch(f"dims {S.n} vs {T.n}")
    Tf = to_ndarray(T)
    Sf = to_ndarray(S)
    xv = np.array([complex(v.value) if isinstance(v, Scalar) and v.field.kind == "c64"
                   else _to_complex(v) for v in x], dtype=complex)
    if xv.shape != (T.n,):
        raise ShapeMismatch("sample vector has the wrong length")
    sx = Sf @ xv
    norm_sx = float(np.linalg.norm(sx))
    events: list[tuple[int, float]] = []
    best = float("inf")
    y = xv.copy()
    for n in range(N + 1):
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            res = norm_sx
        else:
            proj = abs(np.vdot(y / ny, sx))
            res = float(np.sqrt(max(norm_sx * norm_sx - proj * proj, 0.0)))
        if res < best:
            best = res
            events.append((n, res))
        if n < N:
            y = Tf @ y
            ny = float(np.linalg.norm(y))
            if ny > 0.0:
                y = y / ny
    return ResidualTrace(tuple(events), N)


def _to_complex(v) -> complex:
    if isinstance(v, Scalar):
        from .fields import KIND_GAUSSIAN, KIND_RATIONALS

        if v.field.kind == KIND_RATIONALS:
            return complex(float(v.value), 0.0)
        if v.field.kind == KIND_GAUSSIAN:
            return complex(float(v.value[0]), float(v.value[1]))
        return complex(v.value)
    return complex(v)


# ---------------------------------------------------------------------------
# exhaustive space scan with cache
# ---------------------------------------------------------------------------

@dataclass
class ScanResult:
    q: int
    d: int
    total: int
    scanned: int
    from_cache: int
    counts: dict
    violations: list[dict]
    rigidity_violations: list[dict]
    cache_path: Optional[str]

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "d": self.d,
            "total": self.total,
            "scanned": self.scanned,
            "from_cache": self.from_cache,
            "counts": self.counts,
            "violations": self.violations,
            "rigidity_violations": self.rigidity_violations,
            "cache": self.cache_path,
        }


def matrix_hash(q: int, d: int, digits: Iterable[int]) -> str:
    body = f"{q}:{d}:" + ",".join(str(c) for c in digits)
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def _matrix_cols_from_index(idx: int, q: int, d: int):
    """Row-major base-q digits of idx, returned column-encoded."""
    digits = []
    v = idx
    for _ in range(d * d):
        digits.append(v % q)
        v //= q
    cols = tuple(tuple(digits[i * d + j] for i in range(d)) for j in range(d))
    return cols, digits


def _char_poly_int(tbl: _Tables, cols, d: int) -> tuple[int, ...]:
    """Characteristic polynomial coefficients (constant first, monic), by
    explicit minor sums -- division-free, any characteristic, d <= 3."""
    add, mul, neg = tbl.add, tbl.mul, tbl.neg

    def a(i, j):
        return cols[j][i]

    if d == 1:
        return (neg[a(0, 0)], 1)
    if d == 2:
        tr = add[a(0, 0)][a(1, 1)]
        det = add[mul[a(0, 0)][a(1, 1)]][neg[mul[a(0, 1)][a(1, 0)]]]
        return (det, neg[tr], 1)
    if d == 3:
        tr = add[add[a(0, 0)][a(1, 1)]][a(2, 2)]

        def minor2(r1, r2, c1, c2):
            return add[mul[a(r1, c1)][a(r2, c2)]][neg[mul[a(r1, c2)][a(r2, c1)]]]

        m2 = add[add[minor2(0, 1, 0, 1)][minor2(0, 2, 0, 2)]][minor2(1, 2, 1, 2)]
        det = 0
        for perm, sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                           ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
            term = mul[mul[a(0, perm[0])][a(1, perm[1])]][a(2, perm[2])]
            det = add[det][term if sign > 0 else neg[term]]
        return (neg[det], m2, neg[tr], 1)
    raise ValueError("integer char poly implemented for d <= 3 only")


def _poly_eval_int(tbl: _Tables, coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = tbl.add[tbl.mul[acc][x]][c]
    return acc


def _poly_deflate_int(tbl: _Tables, coeffs, root: int):
    out = []
    acc = 0
    for c in reversed(coeffs):
        acc = tbl.add[tbl.mul[acc][root]][c]
        out.append(acc)
    rem = out.pop()
    return tuple(reversed(out)), rem


def _splits_int(tbl: _Tables, coeffs) -> bool:
    cur = coeffs
    for x in range(tbl.q):
        while len(cur) > 1:
            quot, rem = _poly_deflate_int(tbl, cur, x)
            if rem != 0:
                break
            cur = quot
    return len(cur) == 1


def _min_poly_int(tbl: _Tables, cols, d: int) -> tuple[int, ...]:
    """Least monic dependence among vec(T^0), vec(T^1), ... by elimination."""
    q = tbl.q
    add, mul, neg = tbl.add, tbl.mul, tbl.neg
    basis: list[tuple[list[int], list[int], int]] = []
    power = _identity_cols(q, d)
    for deg in range(d + 1):
        vec = [power[j][i] for j in range(d) for i in range(d)]
        combo = [0] * (d + 2)
        combo[deg] = 1
        for bvec, bcombo, piv in basis:
            c = vec[piv]
            if c == 0:
                continue
            vec = [add[x][neg[mul[c][y]]] for x, y in zip(vec, bvec)]
            combo = [add[x][neg[mul[c][y]]] for x, y in zip(combo, bcombo)]
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            lead = combo[deg]
            inv = _field_div(tbl, 1, lead)
            return tuple(mul[inv][c] for c in combo[:deg + 1])
        inv = _field_div(tbl, 1, vec[piv])
        vec = [mul[inv][x] for x in vec]
        combo = [mul[inv][x] for x in combo]
        basis.append((vec, combo, piv))
        power = tbl.mat_mul(power, cols)
    raise AssertionError("dependence must occur by degree d")


def _classify_chunk(payload) -> list[tuple]:
    """Cheap per-matrix classification: (idx, hash, key, split, nilpotent)."""
    (p, k, modulus, d, start, stop, nilpotent_only) = payload
    field = FiniteField(p, k, modulus)
    tbl = _Tables(field)
    q = tbl.q
    out = []
    for idx in range(start, stop):
        cols, digits = _matrix_cols_from_index(idx, q, d)
        cp = _char_poly_int(tbl, cols, d)
        nil = all(c == 0 for c in cp[:-1])
        if nilpotent_only and not nil:
            continue
        mp = _min_poly_int(tbl, cols, d)
        split = _splits_int(tbl, cp)
        out.append((idx, matrix_hash(q, d, digits), (cp, mp), split, nil))
    return out


def _enumerate_one(payload) -> tuple:
    """Full enumeration of one matrix: (equal, orbref0, forb, rigidity_ok)."""
    (p, k, modulus, d, idx, rigidity) = payload
    field = FiniteField(p, k, modulus)
    tbl = _Tables(field)
    cols, _ = _matrix_cols_from_index(idx, tbl.q, d)
    members, forb, _, _ = _enumerate_members(tbl, cols, d)
    rig_ok = None
    if rigidity:
        powers, tail, cycle = _power_cols(tbl, cols, d)
        pairs = _positive_power_pairs(powers, tail, cycle)
        rig_ok = not _rigidity_violations_cols(tbl, pairs, members, d)
    return (len(members) == len(forb), len(members), len(forb), rig_ok)


def _blocks(pending: list[int], workers: int) -> list[list[int]]:
    """Contiguous index blocks for the classification pass."""
    if not pending:
        return []
    nchunks = max(1, min(workers * 4, len(pending)))
    size = (len(pending) + nchunks - 1) // nchunks
    return [pending[pos:pos + size] for pos in range(0, len(pending), size)]


def _fan_out(workers: int, fn, payloads: list) -> list:
    """Run fn over payloads, with a fork pool when workers > 1; output order
    follows payload order regardless of worker count."""
    if not payloads:
        return []
    if workers > 1 and len(payloads) > 1:
        from multiprocessing import get_context

        with get_context("fork").Pool(min(workers, len(payloads))) as pool:
            return pool.map(fn, payloads)
    return [fn(p) for p in payloads]


def default_cache_path() -> str:
    return os.environ.get("ORBITREF_CACHE",
                          os.path.join(".orbitref", "ffscan.jsonl"))


def _load_cache(path: str, q: int, d: int, need_rigidity: bool) -> dict[int, dict]:
    rows: dict[int, dict] = {}
    if not path or not os.path.exists(path):
        return rows
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                continue
            if row.get("q") != q or row.get("d") != d:
                continue
            if need_rigidity and row.get("rigidity_ok") is None:
                continue
            rows[row["i"]] = row
    return rows


def scan_space(field: FiniteField, d: int, *, nilpotent_only: bool = False,
               rigidity: bool = False, dedup: bool = True,
               budget: int = DEFAULT_ENUM_BUDGET, workers: int = 1,
               limit: Optional[int] = None,
               cache_path: Optional[str] = None) -> ScanResult:
    """Classify every d x d matrix over GF(q): does OrbRef0 equal the scaled
    power orbit, and does the minimal polynomial split?

    Two phases: a cheap classification pass over all matrices, then the
    expensive enumeration -- once per (char poly, min poly) similarity class
    under dedup, or once per matrix without it.  Both phases fan out across
    workers; results are identical for any worker count.
    """
    if d > 3:
        raise ValueError("scan_space supports d <= 3")
    q = field.q
    if q ** (d * d) > budget:
        raise BudgetExceeded(
            f"{q}^{d * d} candidates per matrix exceed the budget of {budget}")
    total = q ** (d * d)
    scan_total = min(total, limit) if limit else total
    cached = _load_cache(cache_path, q, d, rigidity) if cache_path else {}
    pending = [i for i in range(scan_total) if i not in cached]

    params = (field.p, field.k, field.modulus, d)
    classification = _fan_out(
        workers,
        _classify_chunk,
        [params + (block[0], block[-1] + 1, nilpotent_only)
         for block in _blocks(pending, workers)],
    )
    info = [item for part in classification for item in part
            if item[0] < scan_total and item[0] not in cached]

    # enumeration targets: the first representative per class, or every matrix
    reps: dict[tuple, int] = {}
    if dedup:
        for idx, _, key, _, _ in info:
            reps.setdefault(key, idx)
        targets = sorted(set(reps.values()))
    else:
        targets = [idx for idx, *_ in info]
    enum_results = _fan_out(workers, _enumerate_one,
                            [params + (idx, rigidity) for idx in targets])
    by_target = dict(zip(targets, enum_results))

    new_rows: dict[int, dict] = {}
    for idx, mhash, key, split, nil in info:
        equal, osize, fsize, rig_ok = by_target[reps[key] if dedup else idx]
        new_rows[idx] = {
            "q": q, "d": d, "i": idx, "hash": mhash,
            "split": split, "nilpotent": nil, "equal": equal,
            "orbref0": osize, "forb": fsize, "rigidity_ok": rig_ok,
        }

    if cache_path and new_rows:
        os.makedirs(os.path.dirname(cache_path) or ".", exist_ok=True)
        with open(cache_path, "a", encoding="utf-8") as fh:
            for i in sorted(new_rows):
                fh.write(json.dumps(new_rows[i], sort_keys=True) + "\n")

    counts = {
        "split": 0, "split_equal": 0, "split_not_equal": 0,
        "nonsplit": 0, "nonsplit_equal": 0, "nonsplit_not_equal": 0,
        "nilpotent": 0, "nilpotent_equal": 0,
        "rigidity_checked": 0, "rigidity_violating": 0,
    }
    violations: list[dict] = []
    rigidity_bad: list[dict] = []
    used_cache = 0
    examined = 0
    for i in range(scan_total):
        row = new_rows.get(i) or cached.get(i)
        if row is None:
            continue  # filtered out by nilpotent_only
        if nilpotent_only and not row["nilpotent"]:
            continue  # cached rows from an unfiltered scan
        if i in cached:
            used_cache += 1
        examined += 1
        if row["split"]:
            counts["split"] += 1
            counts["split_equal" if row["equal"] else "split_not_equal"] += 1
            if not row["equal"]:
                violations.append({"i": row["i"], "hash": row["hash"],
                                   "orbref0": row["orbref0"], "forb": row["forb"]})
        else:
            counts["nonsplit"] += 1
            counts["nonsplit_equal" if row["equal"] else "nonsplit_not_equal"] += 1
        if row["nilpotent"]:
            counts["nilpotent"] += 1
            if row["equal"]:
                counts["nilpotent_equal"] += 1
        if row.get("rigidity_ok") is not None:
            counts["rigidity_checked"] += 1
            if not row["rigidity_ok"]:
                counts["rigidity_violating"] += 1
                rigidity_bad.append({"i": row["i"], "hash": row["hash"]})
    return ScanResult(
        q=q, d=d, total=scan_total, scanned=examined, from_cache=used_cache,
        counts=counts, violations=violations, rigidity_violations=rigidity_bad,
        cache_path=cache_path,
    )


def matrix_from_scan_index(field: FiniteField, d: int, idx: int) -> Matrix:
    """Reconstruct the matrix a scan row refers to (row-major digit order)."""
    tbl = _Tables(field)
    cols, _ = _matrix_cols_from_index(idx, field.q, d)
    return _decode_matrix(tbl, cols, d)
