"""Testing minor-freeness of bounded-degree graphs with few neighbor queries."""

from .construction import (
    CutInstance,
    RelevantTree,
    circus_minor_from_cut,
    cross_matching,
    grid_minor_from_cut,
    k2k_minor_from_cut,
    monotone_subsequence,
    path_minor_with_relevant,
    star_minor_with_relevant,
)
from .generators import FarnessCertificate, gen_cactus, gen_outerplanar, gen_planted_far
from .graph import (
    EXCEEDS_CAP,
    STAR,
    BoundedDegreeGraph,
    BudgetExhausted,
    GraphError,
    LocalView,
    QueryOracle,
    ball,
    canonical_bfs,
    distance,
    edge_key,
    induced_subgraph,
    load_graph,
    neighbor_query,
    parse_graph,
    save_graph,
    to_dot,
)
from .harness import ExperimentSpec, TrialRecord, partition_stats, run_campaign
from .minors import (
    ForbiddenFamily,
    MinorEmbedding,
    MinorTemplate,
    find_minor_bruteforce,
    is_family_minor_free,
    make_circus,
    make_grid,
    make_k2k,
    quotient,
    verify_embedding,
)
from .partition import LocalAccessFailure, LocalPartition, PartitionConfig, enumerate_partition, init_partition
from .tester import TesterConfig, Verdict, query_report, sample_edge, test_minor_freeness

__all__ = [
    "EXCEEDS_CAP",
    "STAR",
    "BoundedDegreeGraph",
    "BudgetExhausted",
    "CutInstance",
    "ExperimentSpec",
    "FarnessCertificate",
    "ForbiddenFamily",
    "GraphError",
    "LocalAccessFailure",
    "LocalPartition",
    "LocalView",
    "MinorEmbedding",
    "MinorTemplate",
    "PartitionConfig",
    "QueryOracle",
    "RelevantTree",
    "TesterConfig",
    "TrialRecord",
    "Verdict",
    "ball",
    "canonical_bfs",
    "circus_minor_from_cut",
    "cross_matching",
    "distance",
    "edge_key",
    "enumerate_partition",
    "find_minor_bruteforce",
    "gen_cactus",
    "gen_outerplanar",
    "gen_planted_far",
    "grid_minor_from_cut",
    "induced_subgraph",
    "init_partition",
    "is_family_minor_free",
    "k2k_minor_from_cut",
    "load_graph",
    "make_circus",
    "make_grid",
    "make_k2k",
    "monotone_subsequence",
    "neighbor_query",
    "parse_graph",
    "partition_stats",
    "path_minor_with_relevant",
    "query_report",
    "quotient",
    "run_campaign",
    "sample_edge",
    "save_graph",
    "star_minor_with_relevant",
    "test_minor_freeness",
    "to_dot",
    "verify_embedding",
]
