"""Graph reconstruction from distance queries: counting oracles,
query-optimal reconstruction algorithms, generators and a benchmark CLI."""

from .chordal import reconstruct_chordal
from .decomposition import (
    BalancedBag,
    TreeDecomposition,
    bounded_diameter_decomposition,
    clique_tree,
    find_balanced_bag,
    validate_decomposition,
    verify_treelength,
)
from .errors import (
    DecompositionError,
    GraphError,
    InfeasibleParameters,
    InternalInvariantError,
    NotChordalError,
    OracleInconsistencyError,
    RetryLimitExceeded,
    WorkBudgetExceeded,
)
from .estimators import (
    ChordalReconstructor,
    KChordalReconstructor,
    TreelengthReconstructor,
    TreeReconstructor,
)
from .generators import GenSpec, gen_chordal, gen_kchordal, gen_tree, generate
from .graph import (
    Graph,
    LayeredView,
    all_pairs_distances,
    bfs_distances,
    is_k_chordal,
    max_degree,
    read_graph_file,
    write_graph_file,
)
from .kchordal import reconstruct_kchordal
from .lowerbound import (
    LowerBoundTree,
    distance_query_as_word_query,
    lb_tree_distance,
    learn_partition,
    reconstruct_balanced_function,
    recover_leaf_labels,
)
from .oracles import (
    CoordinateOracle,
    DistanceOracle,
    MembershipOracle,
    WordOracle,
    betweenness_query,
    word_query_via_coordinates,
)
from .result import ReconstructionResult
from .tree import centroid, parent_search, random_component_order, reconstruct_tree
from .treelength import reconstruct_treelength

__version__ = "0.1.0"
