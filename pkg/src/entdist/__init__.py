"""Three independent routes to one number.

The success probability of locally distinguishing a maximally entangled
basis with a partially entangled resource equals the resource's fully
entangled fraction. This package computes that probability three ways: an
exact simulation of the teleportation protocol (lower bound), the trace of
an analytic dual certificate (upper bound), and a first-order PPT solver
(squeezed in between), then checks that they coincide.
"""

from .certificate import (
    CertificateParts,
    DualCertificate,
    FeasibilityReport,
    UpsilonReport,
    build_certificate,
    certificate_parts,
    check_swap_transpose_identity,
    upsilon_spectrum_check,
    verify_dual_feasibility,
)
from .measures import fef, fef_pure, negativity
from .protocol import (
    CompletionStates,
    IncompleteBounds,
    ProtocolRun,
    ResidualEnsemble,
    default_completion,
    incomplete_bounds,
    protocol_success,
    sample_protocol_success,
    simulate_protocol,
    teleport_residuals,
)
from .sdp import (
    SandwichReport,
    SDPProblem,
    SDPResult,
    dual_bound_from_certificate,
    sandwich_report,
    solve_primal_ppt,
)
from .states import (
    Ensemble,
    MaxEntBasis,
    ResourceSpectrum,
    build_ensemble,
    conjugated_basis,
    dump_basis_file,
    four_factor_layout,
    haar_random_unitary,
    load_basis_file,
    max_ent_state,
    pair_layout,
    random_spectrum,
    resource_state,
    schmidt_coefficients,
    validate_basis,
    weyl_basis,
)
from .tensor import (
    SubsystemLayout,
    frobenius,
    herm_eig,
    is_hermitian,
    is_psd,
    min_eigenvalue,
    partial_transpose,
    permute_factors,
    permute_ket,
    psd_project,
    transpose_party_a,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateParts",
    "CompletionStates",
    "DualCertificate",
    "Ensemble",
    "FeasibilityReport",
    "IncompleteBounds",
    "MaxEntBasis",
    "ProtocolRun",
    "ResidualEnsemble",
    "ResourceSpectrum",
    "SandwichReport",
    "SDPProblem",
    "SDPResult",
    "SubsystemLayout",
    "UpsilonReport",
    "build_certificate",
    "build_ensemble",
    "certificate_parts",
    "check_swap_transpose_identity",
    "conjugated_basis",
    "default_completion",
    "dual_bound_from_certificate",
    "dump_basis_file",
    "fef",
    "fef_pure",
    "four_factor_layout",
    "frobenius",
    "haar_random_unitary",
    "herm_eig",
    "incomplete_bounds",
    "is_hermitian",
    "is_psd",
    "load_basis_file",
    "max_ent_state",
    "min_eigenvalue",
    "negativity",
    "pair_layout",
    "partial_transpose",
    "permute_factors",
    "permute_ket",
    "protocol_success",
    "psd_project",
    "random_spectrum",
    "resource_state",
    "sample_protocol_success",
    "sandwich_report",
    "schmidt_coefficients",
    "simulate_protocol",
    "solve_primal_ppt",
    "teleport_residuals",
    "transpose_party_a",
    "upsilon_spectrum_check",
    "validate_basis",
    "verify_dual_feasibility",
    "weyl_basis",
]
