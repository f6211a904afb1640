"""Tropical-algebra toolkit for P-time event graphs.

Models P-time event graphs, compiles them into coupled max-plus /
min-plus recurrent inequalities and decides existence of extremal
periodic firing schedules through tropical spectral theory.
"""

from .analysis import (
    Candidate,
    CombinedModel,
    CouplingNotFound,
    ExistenceReport,
    NecessaryReport,
    Trajectory,
    TrajectoryMode,
    Violation,
    build_combined,
    existence_report,
    fastest_init,
    in_image_star,
    necessary_check,
    run_trajectory,
    slowest_init,
    verify_trajectory,
)
from .model import (
    MatrixBundle,
    ModelError,
    PlaceSpec,
    PtegModel,
    extract_matrices,
    is_normalized,
    normalize,
    parse_model,
    serialize_model,
    validate,
)
from .spectral import (
    CriticalGraph,
    NoCircuit,
    NotIrreducible,
    PrecedenceGraph,
    SpectralReport,
    build_graph,
    coupling_index,
    critical_graph,
    cyclicity,
    eigenvectors,
    is_irreducible,
    max_cycle_mean,
    min_cycle_mean,
    min_eigenvectors,
    periodic_eigenvectors,
    spectral_report,
)
from .tropical import (
    MAXPLUS,
    MINPLUS,
    NEG_INF,
    POS_INF,
    UNIT,
    DimensionMismatch,
    Number,
    SemiringTag,
    StarDivergence,
    TagMismatch,
    TropicalError,
    TropicalMatrix,
    conjugate,
    format_matrix,
    format_number,
    is_finite,
    kleene_plus,
    kleene_star,
    leq,
    mat_add,
    mat_mul,
    mat_pow,
    negate,
    parse_matrix,
    parse_number,
    residual_left,
    retag,
    scalar_add,
    scalar_mul,
    scale,
)

__version__ = "0.1.0"
