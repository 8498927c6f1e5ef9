"""Decision criteria mapping spectral profiles to cited verdicts.

Four properties are decided:

* reflexive -- the classical Deddens-Fillmore block-gap criterion: for each
  eigenvalue, the two largest Jordan blocks differ in size by at most 1.
* orbit-reflexive -- universally true in finite dimensions (classical).
* c-orbit-reflexive -- nilpotent operators qualify outright (kernels of
  powers exhaust the space); otherwise pool the Jordan blocks of all
  eigenvalues whose modulus ties the spectral radius and require the two
  largest pooled blocks to differ by at most 1.
* algebraic-orbit-reflexive over GF(p^k) -- true when k >= 2 and the minimal
  polynomial splits; over prime fields the criterion is silent, so the
  verdict is "unknown" until the exhaustive orbit oracle settles it.

Missing-second-block convention: a lone block of size m is compared against
0, so a lone block with m >= 2 fails the gap tests.  The d = 2 brute-force
oracle confirms this convention for the pooled criterion (see tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import FiniteFieldUnsupported, WrongField
from .fields import KIND_FINITE
from .linalg import Matrix
from .spectra import SpectralProfile, eigenvalues, radius_selection

PROP_REFLEXIVE = "reflexive"
PROP_ORBIT_REFLEXIVE = "orbit_reflexive"
PROP_C_ORBIT_REFLEXIVE = "c_orbit_reflexive"
PROP_ALGEBRAIC = "algebraic_orbit_reflexive"

CITE_REFLEXIVE = "criterion:per-eigenvalue-block-gap (Deddens-Fillmore)"
CITE_ORBIT = "fact:every-finite-dimensional-operator-is-orbit-reflexive"
CITE_C_ORBIT_NILPOTENT = "criterion:nilpotent-kernels-exhaust-the-space"
CITE_C_ORBIT_GAP = "criterion:max-modulus-block-gap"
CITE_ALGEBRAIC_EXT = "criterion:non-prime-scalar-field-with-split-minimal-polynomial"
CITE_ALGEBRAIC_DELEGATED = "delegated:exhaustive-orbit-oracle"
CITE_ALGEBRAIC_ENUM = "certificate:exhaustive-orbit-enumeration"


@dataclass(frozen=True)
class Verdict:
    property: str
    answer: Optional[bool]                 # None = unknown
    citation: str
    fragile: bool = False
    certificate: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "property": self.property,
            "answer": self.answer,
            "citation": self.citation,
            "fragile": self.fragile,
            "certificate": self.certificate,
        }


@dataclass(frozen=True)
class MaxModulusGap:
    pooled_sizes: tuple[int, ...]          # descending, across tied eigenvalues
    largest: int
    second: int                            # 0 when only one block ties the radius
    eigenvalues: tuple[str, ...]
    fragile: bool

    @property
    def gap(self) -> int:
        return self.largest - self.second

    def as_dict(self) -> dict:
        return {
            "pooled_block_sizes": list(self.pooled_sizes),
            "largest": self.largest,
            "second_largest": self.second,
            "gap": self.gap,
            "max_modulus_eigenvalues": list(self.eigenvalues),
        }


def max_modulus_gap(profile: SpectralProfile) -> MaxModulusGap:
    """Pool block sizes across every eigenvalue at the spectral radius."""
    entries, fragile = radius_selection(profile)
    pooled = sorted((s for e in entries for s in e.block_sizes), reverse=True)
    return MaxModulusGap(
        pooled_sizes=tuple(pooled),
        largest=pooled[0],
        second=pooled[1] if len(pooled) > 1 else 0,
        eigenvalues=tuple(str(e.eigenvalue) for e in entries),
        fragile=fragile,
    )


def decide_reflexive(profile: SpectralProfile) -> Verdict:
    """Per eigenvalue: the two largest blocks differ in size by at most 1."""
    trace = []
    ok = True
    for e in profile.entries:
        largest = e.block_sizes[0]
        second = e.block_sizes[1] if len(e.block_sizes) > 1 else 0
        gap = largest - second
        trace.append({
            "eigenvalue": str(e.eigenvalue),
            "block_sizes": list(e.block_sizes),
            "gap": gap,
        })
        if gap > 1:
            ok = False
    return Verdict(PROP_REFLEXIVE, ok, CITE_REFLEXIVE, profile.fragile,
                   {"criterion_trace": trace})


def decide_orbit_reflexive(M: Matrix) -> Verdict:
    """Always true in finite dimensions (over R or C)."""
    return Verdict(PROP_ORBIT_REFLEXIVE, True, CITE_ORBIT, False,
                   {"note": "holds for every matrix; no computation required"})


def decide_c_orbit_reflexive(profile: SpectralProfile,
                             attach_witness: bool = True) -> Verdict:
    """Pooled max-modulus block gap; nilpotent operators pass outright.

    On a false verdict the certificate carries the explicit witness operator
    (in canonical Jordan-model coordinates) built by the witness module.
    """
    if profile.field.kind == KIND_FINITE:
        raise FiniteFieldUnsupported(
            "c-orbit reflexivity compares complex moduli; finite fields have none")
    if profile.nilpotent:
        return Verdict(PROP_C_ORBIT_REFLEXIVE, True, CITE_C_ORBIT_NILPOTENT,
                       profile.fragile, {"nilpotent": True})
    gap = max_modulus_gap(profile)
    fragile = profile.fragile or gap.fragile
    if gap.gap <= 1:
        return Verdict(PROP_C_ORBIT_REFLEXIVE, True, CITE_C_ORBIT_GAP, fragile,
                       {"criterion_trace": gap.as_dict()})
    certificate: dict = {"criterion_trace": gap.as_dict()}
    if attach_witness:
        from .witness import build_c_orbit_witness, canonical_jordan

        T, layout = canonical_jordan(profile)
        S = build_c_orbit_witness(T, profile)
        certificate["witness"] = {
            "coordinates": "canonical-jordan-model",
            "block_order": [[str(eig), size] for eig, size in layout],
            "operator_rows": T.to_strings(),
            "witness_rows": S.to_strings(),
        }
    return Verdict(PROP_C_ORBIT_REFLEXIVE, False, CITE_C_ORBIT_GAP, fragile,
                   certificate)


def decide_algebraic_f_orbit_reflexive(M: Matrix) -> Verdict:
    """Extension-field criterion over GF(p^k); prime fields are delegated.

    k >= 2 with split minimal polynomial => true.  Otherwise unknown, with a
    delegation note; the CLI settles delegated verdicts exactly through
    enumerate_orbref0 and upgrades the verdict with the enumeration summary.
    """
    if M.field.kind != KIND_FINITE:
        raise WrongField("algebraic orbit reflexivity is decided over GF(p^k)")
    eig = eigenvalues(M)
    if M.field.k >= 2 and eig.split:
        return Verdict(PROP_ALGEBRAIC, True, CITE_ALGEBRAIC_EXT, False, {
            "field_order": M.field.q,
            "split": True,
        })
    reason = ("scalar field has prime order" if M.field.k == 1
              else "minimal polynomial does not split over the field")
    return Verdict(PROP_ALGEBRAIC, None, CITE_ALGEBRAIC_DELEGATED, False, {
        "delegate": "enumerate_orbref0",
        "reason": reason,
        "split": eig.split,
    })


def upgrade_algebraic_verdict(verdict: Verdict, M: Matrix,
                              budget: int = 2 ** 24) -> Verdict:
    """Settle an unknown algebraic verdict by exhaustive enumeration."""
    if verdict.answer is not None:
        return verdict
    from .oracle import enumerate_orbref0

    result = enumerate_orbref0(M, budget=budget)
    certificate = dict(verdict.certificate or {})
    certificate.pop("delegate", None)
    certificate["enumeration"] = result.summary()
    if not result.equal:
        certificate["difference_sample"] = [
            S.to_strings() for S in result.difference[:3]]
    return Verdict(PROP_ALGEBRAIC, result.equal, CITE_ALGEBRAIC_ENUM,
                   verdict.fragile, certificate)
