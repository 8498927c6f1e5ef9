"""orbitref: decide reflexivity, orbit reflexivity and C-orbit reflexivity
of finite-dimensional operators from their Jordan block structure, construct
explicit non-reflexivity witnesses with machine-checkable certificates, and
verify the finite-field statements by exhaustive enumeration."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BudgetExceeded,
    CriterionHolds,
    DivisionByZero,
    FiniteFieldUnsupported,
    MixedFields,
    Nilpotent,
    NotJordanCoordinates,
    NotPrime,
    NotSplit,
    NumericKindUnsupported,
    OrbitrefError,
    ParseError,
    ShapeMismatch,
    Singular,
    WrongField,
)
from .fields import (  # noqa: F401
    QI,
    QQ,
    ComplexFloats,
    Field,
    FiniteField,
    GaussianRationals,
    Rationals,
    Scalar,
    embed,
    norm_sq,
    scalar_arith,
)
from .linalg import (  # noqa: F401
    Matrix,
    Polynomial,
    char_poly,
    commutator_is_zero,
    conjugate,
    embed_matrix,
    inverse,
    kernel_basis,
    matpow,
    minimal_polynomial,
    rank,
)
from .spectra import (  # noqa: F401
    EigenResult,
    ProfileEntry,
    SpectralProfile,
    block_profile,
    eigenvalues,
    spectral_radius_entries,
)
from .deciders import (  # noqa: F401
    Verdict,
    decide_algebraic_f_orbit_reflexive,
    decide_c_orbit_reflexive,
    decide_orbit_reflexive,
    decide_reflexive,
    max_modulus_gap,
    upgrade_algebraic_verdict,
)
from .witness import (  # noqa: F401
    WitnessReport,
    build_c_orbit_witness,
    build_prime_field_counterexample,
    canonical_jordan,
    validate_witness,
)
from .oracle import (  # noqa: F401
    OrbitSet,
    Orbref0Result,
    ResidualTrace,
    c_orbit_membership_residual,
    enumerate_orbref0,
    orbref0_contains,
    power_orbit,
    rigidity_violations,
    scan_space,
)
from .counterexample import (  # noqa: F401
    CounterexampleVector,
    apply_S,
    apply_T_factorial,
    apply_T_power,
    factorial_truncation_holds,
    verify_no_single_power,
)
