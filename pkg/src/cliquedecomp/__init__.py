"""Planted and maximum clique recovery by rank-one plus sparse matrix decomposition."""

from .certificate import (
    CertificateConfig,
    CertificateReport,
    GolfingResult,
    certify,
    estimate_pq_norm,
    golfing_wl,
    neumann_ws,
)
from .graphs import (
    DimacsParseError,
    Graph,
    GroundTruthPair,
    PlantedInstance,
    generate_bernoulli_symmetric,
    generate_planted,
    graph_from_json,
    graph_to_json,
    load_dimacs,
    parse_dimacs,
)
from .metrics import (
    RecoveryReport,
    build_recovery_report,
    clique_size_error,
    extract_clique,
    incoherence_check,
    relative_error,
    variance_spread,
)
from .projections import (
    project_support,
    project_support_perp,
    project_tangent,
    project_tangent_perp,
)
from .prox import (
    SpectralDecomposition,
    box_weighted_soft_threshold,
    matrix_norms,
    soft_threshold,
    spectral_decomposition,
    svt,
    weighted_soft_threshold,
)
from .solver import (
    PLANTED_PRESET,
    NumericalFailure,
    SolveResult,
    SolverConfig,
    SolverState,
    compute_lambda,
    kkt_residuals,
    solve,
    update_weights,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateConfig",
    "CertificateReport",
    "DimacsParseError",
    "GolfingResult",
    "Graph",
    "GroundTruthPair",
    "NumericalFailure",
    "PLANTED_PRESET",
    "PlantedInstance",
    "RecoveryReport",
    "SolveResult",
    "SolverConfig",
    "SolverState",
    "SpectralDecomposition",
    "box_weighted_soft_threshold",
    "build_recovery_report",
    "certify",
    "clique_size_error",
    "compute_lambda",
    "estimate_pq_norm",
    "extract_clique",
    "generate_bernoulli_symmetric",
    "generate_planted",
    "golfing_wl",
    "graph_from_json",
    "graph_to_json",
    "incoherence_check",
    "kkt_residuals",
    "load_dimacs",
    "matrix_norms",
    "neumann_ws",
    "parse_dimacs",
    "project_support",
    "project_support_perp",
    "project_tangent",
    "project_tangent_perp",
    "relative_error",
    "soft_threshold",
    "solve",
    "spectral_decomposition",
    "svt",
    "update_weights",
    "variance_spread",
    "weighted_soft_threshold",
]
