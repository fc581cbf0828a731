"""Exact engine for fermionic Fock bimodules over a twisted Weyl algebra.

Everything is computed in closed form over finitely generated pieces:
Weyl elements are finite linear combinations of group monomials,
module vectors are finite sums e_b * A, and Fock vectors live under a
hard particle-number truncation.  No floating point linear algebra
enters an algebraic identity; numerics appear only where a claim is a
numerical claim (norm estimates, positivity).
"""

__version__ = "0.1.0"

from .weyl import (
    GridSpec,
    TestFunctionPair,
    GeneratorSet,
    WeylElement,
    State,
    symplectic_form,
    gram_matrix,
)
from .bimodule import (
    SECTOR_PLUS,
    SECTOR_MINUS,
    OneParticleBasis,
    OneParticleVector,
    Conjugation,
    Twist,
    trivial_twist,
    FreeBimodule,
    ModuleVector,
    left_action,
    module_inner,
    conjugate_vector,
    mutually_free,
    FreenessReport,
)
from .fock import (
    TensorElement,
    AntisymmetricElement,
    antisymmetrize,
    project_antisymmetric,
    tensor_of,
    tensor_inner,
    antisym_inner,
    FockElement,
    vacuum,
    fock_from_antisymmetric,
    create,
    annihilate,
    fock_left_action,
    fock_right_mul,
    gns_inner,
    gns_norm,
    FieldOperator,
    creation,
    annihilation,
    weyl_mult,
    dirac,
    anticommutator,
    commutator,
    adjoint_check,
    operator_matrix,
    OperatorMatrixResult,
)
from .models import (
    SIGMA_KINDS,
    kernel_value,
    sigma_convolve,
    make_twist,
    ModelContext,
    build_context,
    electron,
    electron_star,
    observable,
    gauge_transform,
    CheckResult,
)

__all__ = [
    "__version__",
    "GridSpec",
    "TestFunctionPair",
    "GeneratorSet",
    "WeylElement",
    "State",
    "symplectic_form",
    "gram_matrix",
    "SECTOR_PLUS",
    "SECTOR_MINUS",
    "OneParticleBasis",
    "OneParticleVector",
    "Conjugation",
    "Twist",
    "trivial_twist",
    "FreeBimodule",
    "ModuleVector",
    "left_action",
    "module_inner",
    "conjugate_vector",
    "mutually_free",
    "FreenessReport",
    "TensorElement",
    "AntisymmetricElement",
    "antisymmetrize",
    "project_antisymmetric",
    "tensor_of",
    "tensor_inner",
    "antisym_inner",
    "FockElement",
    "vacuum",
    "fock_from_antisymmetric",
    "create",
    "annihilate",
    "fock_left_action",
    "fock_right_mul",
    "gns_inner",
    "gns_norm",
    "FieldOperator",
    "creation",
    "annihilation",
    "weyl_mult",
    "dirac",
    "anticommutator",
    "commutator",
    "adjoint_check",
    "operator_matrix",
    "OperatorMatrixResult",
    "SIGMA_KINDS",
    "kernel_value",
    "sigma_convolve",
    "make_twist",
    "ModelContext",
    "build_context",
    "electron",
    "electron_star",
    "observable",
    "gauge_transform",
    "CheckResult",
]
