"""Numerical toolkit for a charged particle in a uniform magnetic field.

Closed-form Landau-level wavefunctions (free and non-free families),
discretized canonical-variable operators with commutator and residual
checks, a sparse hard-wall spectrum solver, the phase-space integral
transform that constructs both wavefunction families, and the classical
cyclotron dynamics with its conserved quantities.
"""

from .physcore import (
    ComplexField,
    GaugeChoice,
    Grid2D,
    PhysicalParams,
    QuantumNumbers,
    derive_params,
    field_norm,
    make_grid,
)
from .hermite import QuadratureRule, fourier_of_psi, gauss_hermite, psi_n
from .wavefunctions import (
    NonFreeCoefficients,
    eval_landau,
    eval_nonfree,
    eval_nonfree_term,
    overlap,
    sample_field,
)
from .operators import (
    DiscreteOperator,
    OperatorKind,
    SpectrumResult,
    apply,
    assemble_hamiltonian,
    commutator_apply,
    conserved_operator_check,
    eigen_residual,
    hamiltonian_via_canonical,
    interior_norm,
    spectrum,
)
from .mqtransform import (
    CustomInput,
    DeltaLine,
    PlaneWave,
    RegulatorSchedule,
    delta_prefactor,
    mq_kernel,
    plane_prefactor,
    transform_delta,
    transform_numeric,
    transform_planewave,
)
from .dynamics import (
    CanonicalMomenta,
    ClassicalState,
    ConservedPair,
    canonical_momenta,
    conserved_pair,
    heisenberg_flow,
    integrate_orbit,
    lorentz_rhs,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "ComplexField", "GaugeChoice", "Grid2D", "PhysicalParams", "QuantumNumbers",
    "derive_params", "field_norm", "make_grid",
    "QuadratureRule", "fourier_of_psi", "gauss_hermite", "psi_n",
    "NonFreeCoefficients", "eval_landau", "eval_nonfree", "eval_nonfree_term",
    "overlap", "sample_field",
    "DiscreteOperator", "OperatorKind", "SpectrumResult", "apply",
    "assemble_hamiltonian", "commutator_apply", "conserved_operator_check",
    "eigen_residual", "hamiltonian_via_canonical", "interior_norm", "spectrum",
    "CustomInput", "DeltaLine", "PlaneWave", "RegulatorSchedule",
    "delta_prefactor", "mq_kernel", "plane_prefactor", "transform_delta",
    "transform_numeric", "transform_planewave",
    "CanonicalMomenta", "ClassicalState", "ConservedPair", "canonical_momenta",
    "conserved_pair", "heisenberg_flow", "integrate_orbit", "lorentz_rhs",
    "errors",
    "__version__",
]
