"""Exact simulation of sequential spin-component measurements on spin-s particles."""

from .errors import (
    EnumerationBoundError,
    ImpossibleOutcomeError,
    InvariantViolation,
    SpinError,
    SpinValidationError,
)
from .spin_core import (
    ComplexScalar,
    OperatorMatrix,
    OperatorSet,
    Spin,
    StateVector,
    Units,
    casimir,
    commutator,
    component_along,
    identity,
    make_spin,
    matrix_apply,
    spin_operators,
    squared,
)
from .rotation import (
    X,
    Y,
    Z,
    Axis,
    Expansion,
    axis_eigenstate,
    eigenbasis,
    exact_pi_half_probabilities,
    expand,
    wigner_d_entry,
    wigner_small_d,
)
from .measurement import (
    Condition,
    GoodnessOfFit,
    MeasurementRecord,
    SequenceStats,
    born_distribution,
    chi_square_gof,
    exact_final_distribution,
    make_generator,
    predictable_with_certainty,
    project,
    run_sequence,
    sample_outcome,
    sample_outcomes,
    transition_matrix,
)
from .paradox import (
    Assignment,
    AssignmentMode,
    FalsificationReport,
    ParadoxReport,
    SumSpectrum,
    VonNeumannWitness,
    casimir_holds,
    enumerate_assignments,
    falsify,
    max_max_assignment_feasible,
    max_max_witness,
    paradox_condition,
    paradox_scan,
    sum_operator_spectrum,
    von_neumann_witness,
)

__all__ = [
    # Errors
    "SpinError", "SpinValidationError", "EnumerationBoundError",
    "ImpossibleOutcomeError", "InvariantViolation",

    # Operator algebra
    "Spin", "Units", "ComplexScalar", "OperatorMatrix", "OperatorSet", "StateVector",
    "make_spin", "spin_operators", "casimir", "commutator", "matrix_apply",
    "identity", "squared", "component_along",

    # Rotations
    "Axis", "X", "Y", "Z", "Expansion", "wigner_small_d", "wigner_d_entry",
    "eigenbasis", "axis_eigenstate", "expand", "exact_pi_half_probabilities",

    # Measurement
    "MeasurementRecord", "Condition", "SequenceStats", "GoodnessOfFit",
    "born_distribution", "project", "predictable_with_certainty",
    "sample_outcome", "sample_outcomes", "make_generator", "transition_matrix",
    "run_sequence", "exact_final_distribution", "chi_square_gof",

    # Paradox
    "Assignment", "AssignmentMode", "ParadoxReport", "VonNeumannWitness",
    "SumSpectrum", "FalsificationReport", "paradox_condition",
    "enumerate_assignments", "max_max_witness", "max_max_assignment_feasible",
    "falsify", "von_neumann_witness", "sum_operator_spectrum", "paradox_scan",
    "casimir_holds",
]
