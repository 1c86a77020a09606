"""Enumerate all maximal k-plexes of size >= q in an undirected graph.

A k-plex is a vertex set in which every member misses at most k-1 of the
others; a 1-plex is a clique.  The enumerator seeds a branch-and-bound
search at every vertex of the (q-k)-core in degeneracy order, prunes with
common-neighbor counting and a per-member slack upper bound, and can run
on several workers with dynamic task splitting.  An exhaustive oracle
provides independent ground truth for small graphs.
"""

from .graph import (
    Graph,
    GraphParseError,
    induced_subgraph,
    load_dimacs,
    load_edge_list,
    write_edge_list,
)
from .preprocess import (
    CoreInfo,
    SeedSets,
    build_seed,
    core_decomposition,
    lemma3_prune,
    reduce_to_core,
    two_hop_neighbors,
)
from .bounds import BoundScratch, basic_bound, hybrid_bound, support_bound
from .enumerator import (
    CollectSink,
    CountSink,
    ResultSink,
    SearchContext,
    Stats,
    StreamSink,
    branch,
    check_maximal,
    enumerate_kplexes,
    filter_on_add,
    is_kplex,
    seed_context,
    seed_sets,
    select_pivot,
)
from .oracle import (
    SolutionSet,
    VerificationReport,
    brute_force_maximal_kplexes,
    verify_solution,
)
from .parallel import BranchTask, enumerate_parallel, split_task

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphParseError", "load_edge_list", "load_dimacs",
    "write_edge_list", "induced_subgraph",
    "CoreInfo", "SeedSets", "core_decomposition", "reduce_to_core",
    "build_seed", "lemma3_prune", "two_hop_neighbors",
    "BoundScratch", "basic_bound", "support_bound", "hybrid_bound",
    "SearchContext", "ResultSink", "CountSink", "CollectSink", "StreamSink",
    "Stats", "is_kplex", "select_pivot", "check_maximal", "filter_on_add",
    "branch", "enumerate_kplexes", "seed_sets", "seed_context",
    "SolutionSet", "VerificationReport", "brute_force_maximal_kplexes",
    "verify_solution",
    "BranchTask", "enumerate_parallel", "split_task",
    "__version__",
]
