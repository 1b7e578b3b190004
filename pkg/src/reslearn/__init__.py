"""reslearn: learn weighted undirected graphs from partial, noisy
random-walk similarity measurements.

Exact closed-form reconstruction when data is complete, tree recovery
from edge supersets, a non-convex least-squares solver (projected
gradient and block coordinate descent with spectral initialization),
and a convex minimum-total-weight solver under resistance upper bounds,
plus the measurement, metrics, and dataset plumbing around them.
"""

from ._kernels import HAVE_COMPILED
from .convex import (
    FeasibilityReport,
    PenaltyConfig,
    check_feasible,
    solve_convex,
    write_feasibility_report,
)
from .datasets import gen_grid, gen_knn, read_ego_edges
from .exact import (
    metric_completion,
    reconstruct_from_hitting,
    reconstruct_from_ppr,
    reconstruct_full,
    reconstruct_tree,
)
from .exceptions import (
    DisconnectedGraphError,
    EmptySampleError,
    FileFormatError,
    IncompletableError,
    InconsistentPPRError,
    InfeasibleMeasurementsError,
    InvalidPairError,
    InvalidParameterError,
    NoInformationError,
    NotATreeInstanceError,
    NotPSDError,
    ResLearnError,
    UndefinedMetricError,
)
from .graph import (
    Graph,
    all_pairs,
    effective_resistance,
    hitting_times,
    is_connected,
    lap_pinv,
    laplacian,
    num_pairs,
    pair_index,
    pair_of,
    pinv_psd,
    ppr_matrix,
    read_graph,
    resistance_columns,
    resistance_table,
    degrees,
    volume,
    write_graph,
)
from .lsq import (
    LearnResult,
    SolverConfig,
    default_lambda_grid,
    gradient,
    hessian,
    initialize,
    objective,
    project_nonneg,
    solve_block_cd,
    solve_gd,
    uniform_weights,
    write_trace,
)
from .measurements import (
    MeasurementSet,
    NoiseSpec,
    measure,
    read_measurements,
    sample_pairs,
    write_measurements,
)
from .metrics import (
    baseline_density,
    build_metrics,
    edges_learned,
    generalization_error,
    normalized_objective,
    top_m_pairs,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "Graph",
    "MeasurementSet",
    "NoiseSpec",
    "SolverConfig",
    "PenaltyConfig",
    "LearnResult",
    "FeasibilityReport",
    "pair_index",
    "pair_of",
    "all_pairs",
    "num_pairs",
    "laplacian",
    "pinv_psd",
    "lap_pinv",
    "is_connected",
    "effective_resistance",
    "resistance_table",
    "resistance_columns",
    "ppr_matrix",
    "hitting_times",
    "degrees",
    "volume",
    "read_graph",
    "write_graph",
    "sample_pairs",
    "measure",
    "read_measurements",
    "write_measurements",
    "reconstruct_full",
    "reconstruct_from_hitting",
    "reconstruct_from_ppr",
    "reconstruct_tree",
    "metric_completion",
    "objective",
    "gradient",
    "hessian",
    "project_nonneg",
    "initialize",
    "uniform_weights",
    "default_lambda_grid",
    "solve_gd",
    "solve_block_cd",
    "write_trace",
    "solve_convex",
    "check_feasible",
    "write_feasibility_report",
    "normalized_objective",
    "generalization_error",
    "edges_learned",
    "top_m_pairs",
    "baseline_density",
    "build_metrics",
    "gen_grid",
    "gen_knn",
    "read_ego_edges",
    "ResLearnError",
    "InvalidPairError",
    "InvalidParameterError",
    "DisconnectedGraphError",
    "NotPSDError",
    "FileFormatError",
    "EmptySampleError",
    "InfeasibleMeasurementsError",
    "IncompletableError",
    "NotATreeInstanceError",
    "InconsistentPPRError",
    "NoInformationError",
    "UndefinedMetricError",
]
