"""Limiting states of consensus protocols via the matrix of maximum out-forests."""

from .analysis import check_corollary1, check_time_shift, consensus_verdict, limiting_state
from .digraph import (
    Arc,
    BicomponentDecomposition,
    DigraphFormatError,
    LaplacianMatrix,
    WeightedDigraph,
    bicomponents,
    format_digraph,
    laplacian,
    parse_digraph,
    read_digraph,
)
from .dynamics import (
    PerronMatrix,
    TauBoundError,
    TrajectoryReport,
    cesaro_limit,
    degroot_iterate,
    matrix_exponential_action,
    perron,
    simulate_continuous,
)
from .eigenprojection import (
    ProjectionEstimate,
    SpectrumReport,
    Tolerances,
    eigenprojection_polynomial,
    eigenprojection_recursive,
    eigenprojection_resolvent,
    spectrum_report,
)
from .forest import (
    EnumerationCapExceeded,
    ForestCensus,
    ForestMatrix,
    OutForest,
    compose_max_forests,
    enumerate_max_forests,
    forest_matrix,
    max_forest_dimension,
)

__version__ = "0.1.0"
