"""Convex hierarchical clustering on similarity graphs.

Computes regularization paths of doubly stochastic centroid matrices
pi(lam) that coalesce from the identity (lam = 0) to the consensus matrix
(lam -> infinity), directly on a similarity kernel / weighted graph.
Three solvers are provided: an accelerated dual proximal method (the
default), an ADMM splitting (cross-check), and a linearized projected
gradient on a smoothed surrogate.
"""

from .admm import AdmmConfig, admm_solve
from .bench import (
    BenchmarkConfig,
    FractalGraphSpec,
    generate_fractal_graph,
    run_benchmark,
)
from .errors import GraphCoalesceError
from .fista import SolveResult, SolverConfig, denoise, primal_objective, solve
from .kernel import (
    DifferenceImage,
    SimilarityKernel,
    apply_difference,
    apply_difference_adjoint,
    from_dense,
    from_edge_list,
    lipschitz_constant,
    read_dense_csv,
    read_edge_list,
    two_hop_kernel,
    write_dense_csv,
    write_edge_list,
)
from .linearized import LinearizedConfig, linearized_solve
from .metrics import (
    ClusterAssignment,
    centroid_similarity,
    cluster_scores,
    effective_rank,
    extract_clusters_by_fusion,
    homogeneity_completeness,
    kmeans,
    matching_accuracy,
    silhouette_score,
)
from .paths import (
    PathEntry,
    RegularizationPath,
    compute_path,
    default_lambda_grid,
    read_path,
    write_path,
)
from .projections import (
    ProjectionConfig,
    project_doubly_stochastic,
    project_row_stochastic,
    project_simplex_rows,
)

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig",
    "BenchmarkConfig",
    "ClusterAssignment",
    "DifferenceImage",
    "FractalGraphSpec",
    "GraphCoalesceError",
    "LinearizedConfig",
    "PathEntry",
    "ProjectionConfig",
    "RegularizationPath",
    "SimilarityKernel",
    "SolveResult",
    "SolverConfig",
    "admm_solve",
    "apply_difference",
    "apply_difference_adjoint",
    "centroid_similarity",
    "cluster_scores",
    "compute_path",
    "default_lambda_grid",
    "denoise",
    "effective_rank",
    "extract_clusters_by_fusion",
    "from_dense",
    "from_edge_list",
    "generate_fractal_graph",
    "homogeneity_completeness",
    "kmeans",
    "linearized_solve",
    "lipschitz_constant",
    "matching_accuracy",
    "primal_objective",
    "project_doubly_stochastic",
    "project_row_stochastic",
    "project_simplex_rows",
    "read_dense_csv",
    "read_edge_list",
    "read_path",
    "run_benchmark",
    "silhouette_score",
    "solve",
    "two_hop_kernel",
    "write_dense_csv",
    "write_edge_list",
    "write_path",
]
