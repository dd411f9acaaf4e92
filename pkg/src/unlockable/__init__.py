"""Four-party unlockable bound-entangled state: construction, cut analysis
and exhaustive simulation of its unlocking protocols."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .analysis import (
    PPTReport,
    SeparableEnsemble,
    expansion_equality_check,
    negativity,
    permutation_invariant,
    ppt_check,
    separable_ensemble_for_cut,
)
from .errors import ArgumentError, CapacityError, LayoutError, UnsupportedScenarioError
from .protocols import (
    RegisterAssignment,
    Transcript,
    apply_correction,
    bell_basis_measurement,
    equivalence_check,
    superadditivity_protocol,
    teleport_view,
    unlock,
)
from .states import (
    BellKind,
    WeylLabel,
    bell_state,
    generalized_bell_state,
    heisenberg_weyl,
    pauli_sigma,
    smolin_qudit_state,
    smolin_state,
)
from .tensor import (
    Cut,
    DensityOperator,
    PermutationMap,
    StateVector,
    SubsystemLayout,
    fidelity_pure,
    frobenius_distance,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
    permute_subsystems,
)
