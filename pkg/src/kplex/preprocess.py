"""Search-space reduction: core decomposition, degeneracy ordering, 2-hop
seed construction, and common-neighbor candidate pruning.

Everything here is a pure function over an immutable Graph and is safe to
call from any number of workers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, induced_subgraph

__all__ = [
    "CoreInfo",
    "SeedSets",
    "core_decomposition",
    "reduce_to_core",
    "build_seed",
    "two_hop_neighbors",
    "lemma3_prune",
]


@dataclass
class CoreInfo:
    """Peeling result: per-vertex core numbers, the removal ordering, and
    the degeneracy (the largest core number)."""

    core_number: np.ndarray
    ordering: np.ndarray
    degeneracy: int
    position: np.ndarray = field(init=False)

    def __post_init__(self):
        pos = np.empty(len(self.ordering), dtype=np.int64)
        pos[self.ordering] = np.arange(len(self.ordering))
        self.position = pos


def core_decomposition(g: Graph) -> CoreInfo:
    """Bucket-peel the graph, always removing a minimum-degree vertex and
    breaking degree ties by lowest internal ID (deterministic orderings
    make seed partitions reproducible).
    """
    n = g.n
    degree = g.degrees()
    core = np.zeros(n, dtype=np.int32)
    ordering = np.empty(n, dtype=np.int32)
    removed = np.zeros(n, dtype=bool)
    heap: list[tuple[int, int]] = [(int(degree[v]), v) for v in range(n)]
    heapq.heapify(heap)
    current = 0
    for i in range(n):
        while True:
            d, v = heapq.heappop(heap)
            if not removed[v] and d == degree[v]:
                break
        current = max(current, d)
        core[v] = current
        ordering[i] = v
        removed[v] = True
        for u in g.neighbors(v):
            if not removed[u]:
                degree[u] -= 1
                heapq.heappush(heap, (int(degree[u]), int(u)))
    return CoreInfo(core, ordering, int(core.max()) if n else 0)


def reduce_to_core(g: Graph, k: int, q: int) -> tuple[Graph, np.ndarray]:
    """The (q-k)-core of ``g``: the maximal subgraph of minimum degree
    >= q-k.  Every maximal k-plex of size >= q lives entirely inside it.

    Returns ``(core_graph, old_to_new)``; the core may be empty.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q < 2 * k - 1:
        raise ValueError(f"q must be >= 2k-1 = {2 * k - 1}, got {q}")
    floor = q - k
    degree = g.degrees()
    alive = np.ones(g.n, dtype=bool)
    stack = [v for v in range(g.n) if degree[v] < floor]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if alive[u]:
                degree[u] -= 1
                if degree[u] < floor:
                    alive[u] = False
                    stack.append(int(u))
    return induced_subgraph(g, np.nonzero(alive)[0])


@dataclass
class SeedSets:
    """The starting candidate/exclusion split for one seed vertex.

    ``cand`` holds the 2-hop neighbors that come after the seed in the
    degeneracy ordering, ``excl`` the ones that come before.
    """

    seed: int
    cand: np.ndarray
    excl: np.ndarray


def two_hop_neighbors(g: Graph, v: int) -> np.ndarray:
    """Ascending IDs of vertices within distance <= 2 of ``v``, excluding v."""
    one = g.neighbors(v)
    if len(one) == 0:
        return np.zeros(0, dtype=np.int64)
    pieces = [one.astype(np.int64)]
    for u in one:
        pieces.append(g.neighbors(u).astype(np.int64))
    hood = np.unique(np.concatenate(pieces))
    return hood[hood != v]


def build_seed(g: Graph, info: CoreInfo, i: int) -> SeedSets:
    """Seed sets for position ``i`` (0-based) of the degeneracy ordering.

    Membership is decided by distance <= 2 in ``g``; a k-plex of size
    >= 2k-1 has diameter at most 2, so nothing is lost.
    """
    seed = int(info.ordering[i])
    hood = two_hop_neighbors(g, seed)
    pos = info.position[hood]
    return SeedSets(seed, hood[pos > i], hood[pos < i])


def lemma3_prune(
    g: Graph,
    S,
    cand,
    excl,
    k: int,
    q: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Drop candidates that some member of S rules out by common-neighbor
    counting, then repeat to a fixed point.

    A vertex u (in cand or excl) is removed when some v in S has fewer
    than q-2k+2 common neighbors with u (q-2k when u and v are adjacent),
    counted inside the subgraph induced by S and the surviving cand;
    excluded vertices never contribute to the counts.  Removals only
    shrink counts, so the fixed point is unique regardless of order; a
    worklist re-examines just the pairs a removal touched.

    No maximal k-plex of size >= max(q, |S|) containing S is lost.
    """
    S = [int(v) for v in S]
    cand_list = [int(v) for v in cand]
    excl_list = [int(v) for v in excl]
    target = max(q, len(S))
    thr_nonadj = target - 2 * k + 2
    thr_adj = target - 2 * k
    if thr_nonadj <= 0 and thr_adj <= 0:
        return (np.asarray(cand_list, dtype=np.int64),
                np.asarray(excl_list, dtype=np.int64))

    adj = {v: set(g.neighbors(v).tolist()) for v in
           set(S) | set(cand_list) | set(excl_list)}

    in_cand = set(cand_list)
    in_excl = set(excl_list)
    counted = set(S) | in_cand  # common neighbors live in G(S + cand)

    def common(u: int, v: int) -> int:
        return len(adj[u] & adj[v] & counted)

    def violates(u: int) -> bool:
        for v in S:
            thr = thr_adj if v in adj[u] else thr_nonadj
            if common(u, v) < thr:
                return True
        return False

    worklist = list(cand_list) + list(excl_list)
    queued = set(worklist)
    while worklist:
        u = worklist.pop()
        queued.discard(u)
        if u not in in_cand and u not in in_excl:
            continue
        if not violates(u):
            continue
        if u in in_cand:
            in_cand.discard(u)
            counted.discard(u)
            # u stops counting as a common neighbor: recheck the pairs it served
            for x in adj[u]:
                if (x in in_cand or x in in_excl) and x not in queued:
                    # only pairs (x, v) with u adjacent to both lose a count
                    if any(v in adj[u] for v in S):
                        worklist.append(x)
                        queued.add(x)
        else:
            in_excl.discard(u)

    cand_out = np.asarray([v for v in cand_list if v in in_cand], dtype=np.int64)
    excl_out = np.asarray([v for v in excl_list if v in in_excl], dtype=np.int64)
    return cand_out, excl_out
