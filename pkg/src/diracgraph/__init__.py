"""Dirac operators on finite metric graphs.

Point spectra via the Birman-Schwinger principle, reference resolvents,
essential spectrum and P/T/C symmetry tests, with an independent
transfer-matrix oracle and a closed form for star graphs.
"""

from .errors import (
    BranchPoint,
    ConditionError,
    ContourThroughZero,
    DiracGraphError,
    GraphError,
    NotDecaying,
    NotInResolventSet,
    ProblemFileError,
    ReferencePoint,
    ThresholdRegion,
    TopologyMismatch,
)
from .graph import (
    ExternalEdge,
    InternalEdge,
    MetricGraph,
    build_W,
    flip_orientation,
    incidence_matrix,
    numberings,
    star_graph,
    vertex_degrees,
)
from .problem import GraphSpinor, SpectralProblem
from .solver import (
    assemble_Q,
    char_fn,
    check_reference_point,
    essential_spectrum,
    find_eigenvalues,
    resolvent_apply,
)
from .star import classify_regularity, pencil_spectrum, star_point_spectrum
from .symmetry import (
    charge_conditions,
    conjugate_conditions,
    is_C_symmetric,
    is_T_symmetric,
    parity_transform,
)
from .transmission import (
    GlobalConditions,
    VertexConditions,
    assemble_global,
    global_conditions,
    is_self_adjoint,
    rank_deficiency,
    relation_subspace,
    relations_equal,
)

__all__ = [
    "BranchPoint",
    "ConditionError",
    "ContourThroughZero",
    "DiracGraphError",
    "ExternalEdge",
    "GlobalConditions",
    "GraphError",
    "GraphSpinor",
    "InternalEdge",
    "MetricGraph",
    "NotDecaying",
    "NotInResolventSet",
    "ProblemFileError",
    "ReferencePoint",
    "SpectralProblem",
    "ThresholdRegion",
    "TopologyMismatch",
    "VertexConditions",
    "assemble_Q",
    "assemble_global",
    "build_W",
    "char_fn",
    "charge_conditions",
    "check_reference_point",
    "classify_regularity",
    "conjugate_conditions",
    "essential_spectrum",
    "find_eigenvalues",
    "flip_orientation",
    "global_conditions",
    "incidence_matrix",
    "is_C_symmetric",
    "is_T_symmetric",
    "is_self_adjoint",
    "numberings",
    "parity_transform",
    "pencil_spectrum",
    "rank_deficiency",
    "relation_subspace",
    "relations_equal",
    "resolvent_apply",
    "star_graph",
    "star_point_spectrum",
    "vertex_degrees",
]

__version__ = "0.1.0"
