"""Explicit non-reflexivity witnesses and their certificates.

For an operator T in Jordan coordinates whose pooled max-modulus block gap
is at least 2, the witness is the rank-one-ish operator

    S x = [<x, e_0> + <x, e_1>] e_{m-1}

on the chain basis e_0..e_{m-1} of the dominant block (T e_k = lam e_k +
e_{k+1}).  As a matrix S has exactly two nonzero entries: row m-1, columns
0 and 1.  Two falsifiable certificates back the verdict:

* commutant exclusion: ST != TS, checked exactly, which keeps S out of the
  SOT closure of the scaled power orbit;
* membership residuals: for seeded sample vectors x, the distance from Sx
  to the complex line through T^n x is driven toward 0 with growing n.

No eigenvalue normalisation is needed: scaling T by a nonzero constant
leaves both the scaled power orbit and the point-to-line residuals
unchanged, so residuals are computed on renormalised direction iterates
(exact powers would overflow doubles whenever the spectral radius is not 1;
only directions matter to a scale-free residual).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    CriterionHolds,
    MixedFields,
    NotJordanCoordinates,
    NotPrime,
    ShapeMismatch,
)
from .fields import (
    KIND_COMPLEX,
    KIND_FINITE,
    FiniteField,
    Scalar,
    is_prime,
)
from .linalg import Matrix, commutator_is_zero, embed_matrix, to_ndarray
from .spectra import SpectralProfile, _modulus_sq, radius_selection
from .deciders import max_modulus_gap

# acceptance thresholds for residual certificates, pinned here
RESIDUAL_CEILING = 1e-2          # min residual at the horizon, every vector
RESIDUAL_SHRINK = 5.0            # horizon residual <= early residual / 5
RESIDUAL_FLOOR = 1e-12           # below this everything counts as converged
COMPONENT_CUTOFF = 1e-9          # relative size declaring an e0/e1 component


def canonical_jordan(profile: SpectralProfile) -> tuple[Matrix, list[tuple[Scalar, int]]]:
    """Block-diagonal Jordan model of a profile with the pooled max-modulus
    blocks first (largest first); remaining blocks follow by decreasing
    modulus then size."""
    entries, _ = radius_selection(profile)
    max_ids = {id(e) for e in entries}
    head: list[tuple[Scalar, int]] = []
    for e in entries:
        head.extend((e.eigenvalue, s) for s in e.block_sizes)
    head.sort(key=lambda b: (-b[1], str(b[0])))
    tail: list[tuple[Scalar, int]] = []
    rest = [e for e in profile.entries if id(e) not in max_ids]
    for e in rest:
        tail.extend((e.eigenvalue, s) for s in e.block_sizes)
    tail.sort(key=lambda b: (_neg_modulus_key(b[0]), -b[1], str(b[0])))
    layout = head + tail
    blocks = [Matrix.jordan_block(profile.field, eig, size) for eig, size in layout]
    return Matrix.block_diag(blocks), layout


def _neg_modulus_key(eig: Scalar):
    m = _modulus_sq(eig)
    if isinstance(m, Fraction):
        return -m
    return -float(m)


def _scalars_equal(a: Scalar, b: Scalar) -> bool:
    if a.field.kind == KIND_COMPLEX:
        return a.field.close(a.value, b.value)
    return a == b


def _parse_jordan_layout(T: Matrix) -> list[tuple[Scalar, int, int]]:
    """(eigenvalue, size, start) blocks of a Jordan-form matrix, or raise."""
    n = T.n
    one = T.field.one()
    blocks = []
    i = 0
    while i < n:
        lam = T[i, i]
        size = 1
        while (i + size < n and _scalars_equal(T[i + size, i + size], lam)
               and _scalars_equal(T[i + size, i + size - 1], one)):
            size += 1
        blocks.append((lam, size, i))
        i += size
    # everything off the block diagonals and intra-block subdiagonals must vanish
    allowed = set()
    for lam, size, start in blocks:
        for j in range(size):
            allowed.add((start + j, start + j))
            if j:
                allowed.add((start + j, start + j - 1))
    for r in range(n):
        for c in range(n):
            if (r, c) in allowed:
                continue
            entry = T[r, c]
            if not (entry.field.close(entry.value, 0) if entry.field.kind == KIND_COMPLEX
                    else entry.is_zero):
                raise NotJordanCoordinates(
                    f"nonzero entry at ({r},{c}) outside the Jordan pattern")
    return blocks


def build_c_orbit_witness(T: Matrix, profile: SpectralProfile) -> Matrix:
    """The two-entry witness matrix for a failed max-modulus block gap.

    T must be block-diagonal Jordan in the profile's block multiset with the
    largest max-modulus block (size m >= 2) first; the result has ones at
    (m-1, 0) and (m-1, 1) and zeros elsewhere.
    """
    if profile.nilpotent:
        raise CriterionHolds("nilpotent operators are C-orbit reflexive")
    gap = max_modulus_gap(profile)
    if gap.gap <= 1:
        raise CriterionHolds(
            f"max-modulus block gap {gap.gap} <= 1; no witness exists")
    if T.n != profile.dim:
        raise ShapeMismatch("operator dimension differs from profile")
    blocks = _parse_jordan_layout(T)
    profile_blocks = sorted(
        (str(e.eigenvalue), s) for e in profile.entries for s in e.block_sizes)
    layout_blocks = sorted((str(lam), size) for lam, size, _ in blocks)
    if profile_blocks != layout_blocks:
        raise NotJordanCoordinates(
            f"Jordan layout {layout_blocks} does not match profile {profile_blocks}")
    lam0, m, start0 = blocks[0]
    entries, _ = radius_selection(profile)
    max_eigs = {str(e.eigenvalue) for e in entries}
    if str(lam0) not in max_eigs or m != gap.largest or start0 != 0:
        raise NotJordanCoordinates(
            "largest max-modulus block must lead the block order")
    S = [[T.field.zero()] * T.n for _ in range(T.n)]
    S[m - 1][0] = T.field.one()
    S[m - 1][1] = T.field.one()
    return Matrix(T.field, S)


def build_prime_field_counterexample(p: int) -> tuple[Matrix, Matrix]:
    """The 2x2 unipotent shear T and the operator S that is in OrbRef0(T)
    but not in the scaled power orbit, over GF(p)."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    field = FiniteField(p)
    T = Matrix.from_values(field, [[1, 1], [0, 1]])
    S = Matrix.from_values(field, [[0, 1], [0, 1]])
    return T, S


@dataclass(frozen=True)
class WitnessReport:
    witness: Matrix
    commutator_nonzero: bool
    commutator_sample: dict
    membership_residuals: tuple[dict, ...]
    verdict_supported: bool
    samples: int
    horizon: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "witness_rows": self.witness.to_strings(),
            "commutator_nonzero": self.commutator_nonzero,
            "commutator_sample": self.commutator_sample,
            "samples": self.samples,
            "horizon": self.horizon,
            "seed": self.seed,
            "membership_residuals": list(self.membership_residuals),
            "verdict_supported": self.verdict_supported,
        }


def _commutator_certificate(S: Matrix, T: Matrix) -> tuple[bool, dict]:
    zero, C = commutator_is_zero(S, T)
    sample = {"entry": None, "value": None}
    if not zero:
        for i in range(C.n):
            for j in range(C.n):
                if not C[i, j].is_zero:
                    sample = {"entry": [i, j], "value": str(C[i, j])}
                    break
            if sample["entry"] is not None:
                break
    return (not zero), sample


def _residual_checkpoints(Tf: np.ndarray, sx: np.ndarray, x: np.ndarray,
                          checkpoints: tuple[int, ...]) -> dict[int, float]:
    """Running minimum of dist(Sx, C * T^n x) at the requested n, computed on
    renormalised direction iterates."""
    horizon = max(checkpoints)
    norm_sx = float(np.linalg.norm(sx))
    out: dict[int, float] = {}
    best = float("inf")
    y = x.astype(complex)
    for n in range(horizon + 1):
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            res = norm_sx
        else:
            proj = abs(np.vdot(y / ny, sx))
            res = float(np.sqrt(max(norm_sx * norm_sx - proj * proj, 0.0)))
        if res < best:
            best = res
        if n in checkpoints:
            out[n] = best
        if n < horizon:
            y = Tf @ y
            ny = float(np.linalg.norm(y))
            if ny > 0.0:
                y = y / ny
    return out


def _vector_batch(dim: int, samples: int, seed: int) -> tuple[list[str], np.ndarray]:
    labels = [f"e{i}" for i in range(dim)]
    cols = [np.eye(dim, dtype=complex)[:, i] for i in range(dim)]
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((2, dim, samples))
    for j in range(samples):
        labels.append(f"sample-{j:03d}")
        cols.append(noise[0, :, j] + 1j * noise[1, :, j])
    return labels, np.stack(cols, axis=1)


def validate_witness(S: Matrix, T: Matrix, samples: int = 100,
                     horizon: int = 2000, seed: int = 0,
                     workers: int = 1) -> WitnessReport:
    """Exact commutator certificate plus seeded membership residuals.

    Residuals are reported as running minima at horizon/20, horizon/4 and
    horizon for every basis vector and `samples` seeded random vectors.
    verdict_supported requires ST != TS, every horizon residual below
    RESIDUAL_CEILING, and at least RESIDUAL_SHRINK-fold shrink from the
    early checkpoint on vectors with a nonzero e0 or e1 component.
    """
    if S.n != T.n:
        raise ShapeMismatch(f"witness dim {S.n} vs operator dim {T.n}")
    if S.field != T.field:
        if S.field.kind == KIND_FINITE or T.field.kind == KIND_FINITE:
            raise MixedFields("witness and operator fields differ")
        S = embed_matrix(S, T.field)
    if horizon < 20:
        raise ValueError("horizon must be at least 20")
    commutator_nonzero, sample = _commutator_certificate(S, T)

    Tf = to_ndarray(T)
    Sf = to_ndarray(S)
    checkpoints = (horizon // 20, horizon // 4, horizon)
    labels, X = _vector_batch(T.n, samples, seed)
    SX = Sf @ X

    rows: list[dict] = []
    indices = list(range(len(labels)))
    chunks = _split_chunks(indices, max(1, workers))
    if len(chunks) > 1:
        from multiprocessing import get_context

        payloads = [(Tf, SX[:, chunk], X[:, chunk], checkpoints) for chunk in chunks]
        with get_context("fork").Pool(len(chunks)) as pool:
            parts = pool.map(_residual_chunk, payloads)
        results = [r for part in parts for r in part]
    else:
        results = _residual_chunk((Tf, SX, X, checkpoints))

    supported = commutator_nonzero
    for idx, cps in zip(indices, results):
        x = X[:, idx]
        scale = max(float(np.linalg.norm(x)), 1.0)
        has_e01 = bool(T.n >= 2
                       and float(abs(x[0]) + abs(x[1])) > COMPONENT_CUTOFF * scale)
        early, _, late = (cps[c] for c in checkpoints)
        converged = late < RESIDUAL_CEILING
        shrunk = (not has_e01) or late <= max(early / RESIDUAL_SHRINK, RESIDUAL_FLOOR)
        supported = supported and converged and shrunk and late <= early
        rows.append({
            "vector": labels[idx],
            "nonzero_e0_or_e1": has_e01,
            "checkpoints": {str(c): cps[c] for c in checkpoints},
        })
    return WitnessReport(
        witness=S,
        commutator_nonzero=commutator_nonzero,
        commutator_sample=sample,
        membership_residuals=tuple(rows),
        verdict_supported=supported,
        samples=samples,
        horizon=horizon,
        seed=seed,
    )


def _split_chunks(indices: list[int], parts: int) -> list[list[int]]:
    parts = min(parts, len(indices)) or 1
    size = (len(indices) + parts - 1) // parts
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def _residual_chunk(payload) -> list[dict[int, float]]:
    Tf, SX, X, checkpoints = payload
    return [
        _residual_checkpoints(Tf, SX[:, j], X[:, j], checkpoints)
        for j in range(X.shape[1])
    ]
