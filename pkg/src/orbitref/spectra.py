"""Eigenvalue discovery and Jordan block-size profiles from rank sequences.

Block sizes are read off the rank (Weyr) sequence of (M - lam I)^k -- the
count of blocks of size >= k at lam is rank((M-lam I)^{k-1}) - rank((M-lam I)^k)
-- never from eigenvector chains, so the exact and numeric paths share one
mechanism and no Jordan basis is ever required.

Exact eigenvalues come from a divisor search on the cleared-denominator
characteristic polynomial: the rational-root method over Q, its
Gaussian-integer extension over Q(i), exhaustive evaluation over GF(p^k).
If the polynomial does not fully factor the caller gets NotSplit with the
residual factor; escalating the field (q -> qi -> c64) is an explicit caller
decision, never silent.

Numeric eigenvalues come from QR iteration.  Defective eigenvalues of a
block of size m scatter like (machine eps)^(1/m) under rounding, so the
clustering band widens with the dimension; rank thresholds stay at the
descriptor tolerance, which sits well below true singular values and well
above the noise floor once clusters are re-centred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import _gaussint as gi
from .errors import Nilpotent, NotSplit, OrbitrefError, WrongField
from .fields import (
    KIND_COMPLEX,
    KIND_FINITE,
    KIND_GAUSSIAN,
    KIND_RATIONALS,
    Field,
    Scalar,
    as_gaussian_pair,
)
from .linalg import Matrix, Polynomial, char_poly, rank, to_ndarray

_MACH_EPS = float(np.finfo(float).eps)

ModulusSq = Union[Fraction, float, None]


@dataclass(frozen=True)
class ProfileEntry:
    eigenvalue: Scalar
    block_sizes: tuple[int, ...]          # descending
    modulus_sq: ModulusSq                 # Fraction (exact), float (numeric), None (GF)

    @property
    def algebraic_multiplicity(self) -> int:
        return sum(self.block_sizes)


@dataclass(frozen=True)
class SpectralProfile:
    field: Field
    dim: int
    entries: tuple[ProfileEntry, ...]
    split: bool
    nilpotent: bool
    spectral_radius_sq: ModulusSq
    fragile: bool = False

    @classmethod
    def from_blocks(cls, field: Field, blocks) -> "SpectralProfile":
        """Build a profile directly from (eigenvalue, sizes) pairs."""
        entries = []
        for eig, sizes in blocks:
            if not isinstance(eig, Scalar):
                eig = field.parse(eig) if isinstance(eig, str) else field.from_int(eig)
            sizes = tuple(sorted(sizes, reverse=True))
            if not sizes or any(s < 1 for s in sizes):
                raise ValueError("block sizes must be positive")
            entries.append(ProfileEntry(eig, sizes, _modulus_sq(eig)))
        dim = sum(e.algebraic_multiplicity for e in entries)
        return cls(field=field, dim=dim, entries=_sorted_entries(field, entries),
                   split=True, nilpotent=_is_nilpotent(entries),
                   spectral_radius_sq=_radius_sq(entries), fragile=False)

    def entry_for(self, eig: Scalar) -> Optional[ProfileEntry]:
        for e in self.entries:
            if e.eigenvalue == eig:
                return e
        return None

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "field": self.field.describe(),
            "split": self.split,
            "nilpotent": self.nilpotent,
            "fragile": self.fragile,
            "spectral_radius_sq": _modulus_repr(self.spectral_radius_sq),
            "entries": [
                {
                    "eigenvalue": str(e.eigenvalue),
                    "block_sizes": list(e.block_sizes),
                    "modulus_sq": _modulus_repr(e.modulus_sq),
                }
                for e in self.entries
            ],
        }


def _modulus_repr(m: ModulusSq):
    if m is None:
        return None
    if isinstance(m, Fraction):
        return str(m)
    return float(m)


def _modulus_sq(eig: Scalar) -> ModulusSq:
    kind = eig.field.kind
    if kind in (KIND_RATIONALS, KIND_GAUSSIAN):
        re_part, im_part = as_gaussian_pair(eig)
        return re_part * re_part + im_part * im_part
    if kind == KIND_COMPLEX:
        return abs(eig.value) ** 2
    return None


def _is_zero_eig(eig: Scalar, dim: int) -> bool:
    if eig.field.kind == KIND_COMPLEX:
        return abs(eig.value) <= _cluster_band(dim, eig.field.tol, 0.0)
    return eig.is_zero


def _is_nilpotent(entries) -> bool:
    if len(entries) != 1:
        return False
    e = entries[0]
    dim = e.algebraic_multiplicity
    return _is_zero_eig(e.eigenvalue, dim)


def _radius_sq(entries) -> ModulusSq:
    dims = sum(e.algebraic_multiplicity for e in entries)
    best: ModulusSq = None
    for e in entries:
        if _is_zero_eig(e.eigenvalue, dims):
            continue
        if e.modulus_sq is None:
            return None
        if best is None or e.modulus_sq > best:
            best = e.modulus_sq
    return best


def _sorted_entries(field: Field, entries) -> tuple[ProfileEntry, ...]:
    kind = field.kind
    if kind == KIND_FINITE:
        return tuple(sorted(entries,
                            key=lambda e: field.element_index(e.eigenvalue.value)))
    if kind == KIND_COMPLEX:
        return tuple(sorted(entries,
                            key=lambda e: (-e.modulus_sq, e.eigenvalue.value.real,
                                           e.eigenvalue.value.imag)))
    return tuple(sorted(entries, key=lambda e: (-e.modulus_sq, str(e.eigenvalue))))


# ---------------------------------------------------------------------------
# eigenvalue discovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenResult:
    roots: tuple[tuple[Scalar, int], ...]
    split: bool
    residual: Optional[Polynomial]        # non-split factor, exact kinds only


def eigenvalues(M: Matrix) -> EigenResult:
    kind = M.field.kind
    if kind == KIND_COMPLEX:
        return _eigenvalues_numeric(M)
    poly = char_poly(M)
    if kind == KIND_FINITE:
        candidates = [s for s in M.field.elements()]
    elif kind == KIND_RATIONALS:
        candidates = _rational_root_candidates(M.field, poly)
    elif kind == KIND_GAUSSIAN:
        candidates = _gaussian_root_candidates(M.field, poly)
    else:
        raise WrongField(f"eigenvalues unsupported over {M.field.name}")
    roots: list[tuple[Scalar, int]] = []
    current = poly
    for cand in candidates:
        if current.degree == 0:
            break
        mult = 0
        while current.degree > 0:
            quot, rem = current.deflate(cand)
            if not rem.is_zero:
                break
            current = quot
            mult += 1
        if mult:
            roots.append((cand, mult))
    split = current.degree == 0
    return EigenResult(tuple(roots), split, None if split else current)


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    divs = [1]
    for p, e in sorted(gi.factor_int(n).items()):
        grown = []
        pe = 1
        for _ in range(e + 1):
            grown.extend(d * pe for d in divs)
            pe *= p
        divs = grown
    return sorted(set(divs))


def _rational_root_candidates(field: Field, poly: Polynomial) -> list[Scalar]:
    """True rational roots: divisor candidates sieved by exact integer
    evaluation of the cleared polynomial (sum c_i p^i q^(d-i))."""
    coeffs = [s.value for s in poly.coeffs]
    denom = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * denom) for c in coeffs]
    v = 0
    while v < len(ints) and ints[v] == 0:
        v += 1
    deflated = ints[v:]
    roots: set[Fraction] = set()
    if v:
        roots.add(Fraction(0))
    if len(deflated) > 1:
        lead, low = deflated[-1], deflated[0]
        degree = len(deflated) - 1
        seen: set[Fraction] = set()
        for dn in _int_divisors(low):
            for dl in _int_divisors(lead):
                for num in (dn, -dn):
                    cand = Fraction(num, dl)
                    if cand in seen:
                        continue
                    seen.add(cand)
                    p, q = cand.numerator, cand.denominator
                    acc = 0
                    qpow = 1
                    for i in range(degree, -1, -1):
                        acc = acc * p + deflated[i] * qpow
                        qpow *= q
                    if acc == 0:
                        roots.add(cand)
    return [Scalar(field, c) for c in sorted(roots)]


def _gaussian_root_candidates(field: Field, poly: Polynomial) -> list[Scalar]:
    """True Q(i) roots via the Gaussian-integer divisor sieve."""
    pairs = [as_gaussian_pair(s) for s in poly.coeffs]
    denoms = [f.denominator for re_part, im_part in pairs
              for f in (re_part, im_part)]
    denom = math.lcm(*denoms)
    gints = [(int(re_part * denom), int(im_part * denom))
             for re_part, im_part in pairs]
    v = 0
    while v < len(gints) and gints[v] == (0, 0):
        v += 1
    deflated = gints[v:]
    roots: set[tuple[Fraction, Fraction]] = set()
    if v:
        roots.add((Fraction(0), Fraction(0)))
    if len(deflated) > 1:
        lead, low = deflated[-1], deflated[0]
        degree = len(deflated) - 1
        seen: set[tuple[int, int, int, int]] = set()
        for dn in gi.gaussian_divisors(low):
            for dl in gi.gaussian_divisors(lead):
                for u in gi.UNITS:
                    g = gi.gmul(dn, u)
                    key = (g[0], g[1], dl[0], dl[1])
                    if key in seen:
                        continue
                    seen.add(key)
                    # exact evaluation of sum c_i g^i dl^(d-i), all in Z[i]
                    acc = (0, 0)
                    hpow = (1, 0)
                    for i in range(degree, -1, -1):
                        acc = gi.gmul(acc, g)
                        acc = (acc[0] + deflated[i][0] * hpow[0]
                               - deflated[i][1] * hpow[1],
                               acc[1] + deflated[i][0] * hpow[1]
                               + deflated[i][1] * hpow[0])
                        hpow = gi.gmul(hpow, dl)
                    if acc == (0, 0):
                        nn = gi.gnorm(dl)
                        roots.add((Fraction(g[0] * dl[0] + g[1] * dl[1], nn),
                                   Fraction(g[1] * dl[0] - g[0] * dl[1], nn)))
    ordered = sorted(roots, key=lambda p: (p[0] * p[0] + p[1] * p[1], p[0], p[1]))
    return [Scalar(field, c) for c in ordered]


def _cluster_band(dim: int, tol: float, magnitude: float) -> float:
    # defective eigenvalues scatter ~ eps^(1/m); widen with dimension
    return max(tol, 8.0 * _MACH_EPS ** (1.0 / (dim + 1))) * max(1.0, magnitude)


def _cluster_numeric(vals: np.ndarray, tol: float, dim: int):
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    m = len(vals)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            band = _cluster_band(dim, tol, max(abs(vals[i]), abs(vals[j])))
            if abs(vals[i] - vals[j]) <= band:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(complex(vals[i]))
    clusters = [(sum(g) / len(g), len(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    # fragile when a 10x wider band would have merged distinct clusters
    fragile = False
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            zi, zj = clusters[i][0], clusters[j][0]
            if abs(zi - zj) <= 10.0 * _cluster_band(dim, tol, max(abs(zi), abs(zj))):
                fragile = True
    return clusters, fragile


def _eigenvalues_numeric(M: Matrix) -> EigenResult:
    vals = np.linalg.eigvals(to_ndarray(M))
    clusters, _ = _cluster_numeric(vals, M.field.tol, M.n)
    roots = tuple((Scalar(M.field, z), mult) for z, mult in clusters)
    return EigenResult(roots, True, None)


# ---------------------------------------------------------------------------
# block profiles
# ---------------------------------------------------------------------------

def _sizes_from_counts(counts, lam, mult) -> tuple[int, ...]:
    sizes = []
    for s in range(len(counts), 0, -1):
        here = counts[s - 1] - (counts[s] if s < len(counts) else 0)
        sizes.extend([s] * here)
    if sum(sizes) != mult:
        raise OrbitrefError(
            f"rank sequence inconsistent at eigenvalue {lam}: "
            f"sizes {sizes} vs multiplicity {mult}; for numeric input, adjust tol")
    return tuple(sorted(sizes, reverse=True))


def _sizes_from_rank_sequence(M: Matrix, lam: Scalar, mult: int) -> tuple[int, ...]:
    if M.field.kind == KIND_COMPLEX:
        return _sizes_numeric(M, lam, mult)
    n = M.n
    A = M.add_scalar_to_diagonal(-lam)
    target = n - mult
    counts = []  # counts[k-1] = number of blocks of size >= k
    prev_rank = n
    Ak = A
    k = 1
    while True:
        r = rank(Ak)
        counts.append(prev_rank - r)
        if r <= target or k >= mult:
            break
        prev_rank = r
        Ak = Ak @ A
        k += 1
    return _sizes_from_counts(counts, lam, mult)


def _sizes_numeric(M: Matrix, lam: Scalar, mult: int) -> tuple[int, ...]:
    """Weyr counts with power-anchored rank cutoffs: the k-th power's rank
    uses tol * max(smax(A^k), smax(A)^k), so a power that is numerically zero
    at A's scale cannot masquerade as full rank relative to its own noise."""
    n = M.n
    tol = M.field.tol
    A = to_ndarray(M) - complex(lam.value) * np.eye(n)
    svals = np.linalg.svd(A, compute_uv=False)
    base = float(svals[0]) if svals.size else 0.0
    target = n - mult
    counts = []
    prev_rank = n
    Ak = A
    k = 1
    while True:
        s = np.linalg.svd(Ak, compute_uv=False)
        smax = float(s[0]) if s.size else 0.0
        cutoff = tol * max(smax, base ** k)
        r = 0 if cutoff == 0.0 else int(np.count_nonzero(s > cutoff))
        counts.append(prev_rank - r)
        if r <= target or k >= mult:
            break
        prev_rank = r
        Ak = Ak @ A
        k += 1
    return _sizes_from_counts(counts, lam, mult)


def block_profile(M: Matrix) -> SpectralProfile:
    """Jordan block-size profile of M; raises NotSplit over exact fields when
    the characteristic polynomial has a non-linear factor."""
    eig = eigenvalues(M)
    if not eig.split:
        raise NotSplit(
            f"characteristic polynomial does not split over {M.field.name}; "
            f"residual factor {eig.residual}", residual=eig.residual)
    entries = []
    for lam, mult in eig.roots:
        sizes = _sizes_from_rank_sequence(M, lam, mult)
        entries.append(ProfileEntry(lam, sizes, _modulus_sq(lam)))
    fragile = False
    if M.field.kind == KIND_COMPLEX:
        vals = np.linalg.eigvals(to_ndarray(M))
        _, fragile = _cluster_numeric(vals, M.field.tol, M.n)
        fragile = fragile or _radius_tie_fragile(entries, M.field.tol)
    return SpectralProfile(
        field=M.field, dim=M.n, entries=_sorted_entries(M.field, entries),
        split=True, nilpotent=_is_nilpotent(entries),
        spectral_radius_sq=_radius_sq(entries), fragile=fragile)


def _radius_tie_fragile(entries, tol: float) -> bool:
    nonzero = [e for e in entries if isinstance(e.modulus_sq, float)
               and not _is_zero_eig(e.eigenvalue, sum(x.algebraic_multiplicity for x in entries))]
    if not nonzero:
        return False
    r = math.sqrt(max(e.modulus_sq for e in nonzero))
    tight = {id(e) for e in nonzero if r - math.sqrt(e.modulus_sq) <= tol * max(1.0, r)}
    loose = {id(e) for e in nonzero if r - math.sqrt(e.modulus_sq) <= 10 * tol * max(1.0, r)}
    return tight != loose


def radius_selection(profile: SpectralProfile) -> tuple[list[ProfileEntry], bool]:
    """Entries whose modulus ties the spectral radius, plus a fragility flag
    for float ties inside the 10x tolerance band."""
    if profile.nilpotent:
        raise Nilpotent("spectral radius of a nilpotent profile is 0")
    if profile.field.kind == KIND_FINITE:
        raise WrongField("modulus comparisons need a subfield of C")
    nonzero = [e for e in profile.entries
               if not _is_zero_eig(e.eigenvalue, profile.dim)]
    if isinstance(profile.spectral_radius_sq, Fraction):
        sel = [e for e in nonzero if e.modulus_sq == profile.spectral_radius_sq]
        return sel, False
    tol = profile.field.tol
    r = math.sqrt(profile.spectral_radius_sq)
    sel = [e for e in nonzero
           if r - math.sqrt(e.modulus_sq) <= tol * max(1.0, r)]
    loose = [e for e in nonzero
             if r - math.sqrt(e.modulus_sq) <= 10 * tol * max(1.0, r)]
    return sel, len(sel) != len(loose)


def spectral_radius_entries(profile: SpectralProfile) -> list[ProfileEntry]:
    """The sub-list of entries at maximum modulus among nonzero eigenvalues."""
    sel, _ = radius_selection(profile)
    return sel
