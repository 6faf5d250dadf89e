"""treemod: spanning-tree modulus, fair edge usage, and core deflation."""

__version__ = "0.1.0"

from .analysis import (
    HomogeneityCertificate,
    UsageStats,
    edge_usage,
    expected_overlap,
    fair_tree_candidate,
    homogeneous_lower_bound,
    is_homogeneous,
    is_uniform,
    sample_tree,
    sample_trees,
    usage_stats,
)
from .deflation import (
    CoreRecord,
    DeflationHierarchy,
    DeflationLevel,
    SerialDecomposition,
    compose_pmf,
    deflate,
    denseness,
    denseness_exact,
    densest_subgraph,
    eta_from_hierarchy,
    homogeneous_core,
    meo_from_hierarchy,
    serial_decompose,
)
from .errors import (
    CapExceededError,
    GraphError,
    InfeasiblePartitionError,
    NumericalError,
    OracleDisagreementError,
    SolverError,
    ToleranceError,
    TreemodError,
)
from .multigraph import (
    EdgeBijection,
    Multigraph,
    VertexPartition,
    articulation_points,
    biconnected_components,
    connected_components,
    contract,
    from_edge_list,
    is_connected,
    vertex_induced_subgraph,
)
from .oracle import (
    OracleReport,
    cross_check,
    densest_subgraph_exhaustive,
    exact_meo,
    exact_mod2,
    fair_trees,
    min_partition_exhaustive,
)
from .partitions import (
    FeasiblePartition,
    homogeneity_by_partitions,
    iter_feasible_partitions,
    min_feasible_partition,
    tree_crossings,
    validate_feasible,
)
from .qp import DualActiveSetLDP, qp_subproblem
from .solver import (
    KKTReport,
    ModulusResult,
    SolverConfig,
    TreePmf,
    extract_pmf,
    kkt_residuals,
    meo_value,
    solve,
)
from .trees import (
    EdgeVector,
    SpanningTree,
    count_trees,
    effective_resistance,
    enumerate_trees,
    is_spanning_tree,
    min_tree,
    tree_cost,
    usage_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
