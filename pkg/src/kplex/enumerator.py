"""Branch-and-bound enumeration of all maximal k-plexes of size >= q.

The search state (S, C, X) is explicit: S is the k-plex under
construction, C the candidates that can still extend it, X the vertices
already explored elsewhere whose presence vetoes maximality.  Branching
picks a minimum-degree pivot in G(S+C), re-picking from the pivot's
candidate non-neighbors when the pivot already sits in S, and prunes the
include branch whenever the hybrid upper bound falls below q.

Recursion is an explicit stack of child snapshots, which doubles as the
unit of work the parallel module hands between workers.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, TextIO

import numpy as np

from .bounds import BoundScratch, hybrid_bound
from .graph import Graph
from .preprocess import CoreInfo, build_seed, core_decomposition, lemma3_prune, reduce_to_core

__all__ = [
    "SearchContext",
    "ResultSink",
    "CountSink",
    "CollectSink",
    "StreamSink",
    "Stats",
    "is_kplex",
    "select_pivot",
    "check_maximal",
    "filter_on_add",
    "branch",
    "enumerate_kplexes",
    "seed_sets",
    "seed_context",
]


# ---------------------------------------------------------------------------
# result sinks

class ResultSink:
    """Consumer of maximal k-plexes; emitted vertices are original-graph
    internal IDs, ascending.  ``count`` equals the number of emit calls."""

    def __init__(self):
        self.count = 0
        self._lock = threading.Lock()

    def emit(self, vertices: tuple[int, ...]) -> None:
        with self._lock:
            self.count += 1
            self._consume(vertices)

    def add_count(self, n: int) -> None:
        """Bulk accounting for engines that count without materializing."""
        with self._lock:
            self.count += n

    def _consume(self, vertices: tuple[int, ...]) -> None:
        pass


class CountSink(ResultSink):
    """Counts emissions and discards the sets."""


class CollectSink(ResultSink):
    """Collects emitted sets; with ``labels`` given, members are translated
    to original IDs and sorted ascending by label."""

    def __init__(self, labels: np.ndarray | None = None, check_duplicates: bool = False):
        super().__init__()
        self.labels = labels
        self.check_duplicates = check_duplicates
        self.plexes: list[tuple[int, ...]] = []
        self._seen: set[tuple[int, ...]] = set()

    def _consume(self, vertices):
        if self.labels is not None:
            vertices = tuple(sorted(int(self.labels[v]) for v in vertices))
        if self.check_duplicates:
            if vertices in self._seen:
                raise AssertionError(f"duplicate emission: {vertices}")
            self._seen.add(vertices)
        self.plexes.append(vertices)

    def family(self) -> set[tuple[int, ...]]:
        return set(self.plexes)


class StreamSink(ResultSink):
    """Writes one plex per line: space-separated ascending original IDs."""

    def __init__(self, out: TextIO, labels: np.ndarray):
        super().__init__()
        self.out = out
        self.labels = labels

    def _consume(self, vertices):
        row = sorted(int(self.labels[v]) for v in vertices)
        self.out.write(" ".join(map(str, row)) + "\n")


@dataclass
class Stats:
    """Run accounting: sizes, work counters, per-phase wall time."""

    n: int = 0
    m: int = 0
    reduced_n: int = 0
    reduced_m: int = 0
    seeds: int = 0
    nodes: int = 0
    count: int = 0
    workers: int = 1
    tasks: int = 0
    steals: int = 0
    engine: str = "python"
    phase_ms: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "n": self.n, "m": self.m,
            "reduced_n": self.reduced_n, "reduced_m": self.reduced_m,
            "seeds": self.seeds, "nodes": self.nodes, "count": self.count,
            "workers": self.workers, "tasks": self.tasks, "steals": self.steals,
            "engine": self.engine,
        }
        out.update({k: round(v, 3) for k, v in self.phase_ms.items()})
        return out


# ---------------------------------------------------------------------------
# search state

class SearchContext:
    """Mutable branch state over the (reduced) graph.

    ``nonnbr[v]`` counts S-members not adjacent to v, excluding v itself,
    so the k-plex condition reads nonnbr <= k-1 for every member and every
    single-vertex extension.  ``deg_sc[v]`` is v's degree inside G(S+C)
    and is only meaningful for v in S+C.
    """

    __slots__ = ("g", "k", "q", "S", "C", "X", "nonnbr", "deg_sc",
                 "adj_mask", "s_mask", "c_mask")

    def __init__(self, g, k, q, S, C, X, nonnbr, deg_sc, adj_mask, s_mask, c_mask):
        self.g = g
        self.k = k
        self.q = q
        self.S = S
        self.C = C
        self.X = X
        self.nonnbr = nonnbr
        self.deg_sc = deg_sc
        self.adj_mask = adj_mask
        self.s_mask = s_mask
        self.c_mask = c_mask

    # -- construction -----------------------------------------------------

    @classmethod
    def for_seed(cls, g: Graph, k: int, q: int, seed: int,
                 cand: Iterable[int], excl: Iterable[int],
                 adj_mask: list[int] | None = None) -> "SearchContext":
        """Root state S={seed}; callers supply 2-hop candidate/exclusion
        sets.  Vertices whose pair with the seed is not a k-plex are
        dropped so the C/X single-extension invariant holds from the start
        (this only bites for k=1, where it keeps neighbors of the seed)."""
        if adj_mask is None:
            adj_mask = g.adjacency_masks()
        seed = int(seed)
        smask = 1 << seed
        C = set()
        X = set()
        nonnbr = np.zeros(g.n, dtype=np.int32)
        for u in cand:
            u = int(u)
            nn = 0 if (adj_mask[u] >> seed) & 1 else 1
            if nn <= k - 1:
                C.add(u)
                nonnbr[u] = nn
        for u in excl:
            u = int(u)
            nn = 0 if (adj_mask[u] >> seed) & 1 else 1
            if nn <= k - 1:
                X.add(u)
                nonnbr[u] = nn
        cmask = 0
        for u in C:
            cmask |= 1 << u
        deg_sc = np.zeros(g.n, dtype=np.int32)
        scmask = smask | cmask
        deg_sc[seed] = (adj_mask[seed] & scmask).bit_count()
        for u in C:
            deg_sc[u] = (adj_mask[u] & scmask).bit_count()
        return cls(g, k, q, [seed], C, X, nonnbr, deg_sc, adj_mask, smask, cmask)

    # -- queries ----------------------------------------------------------

    def size_sc(self) -> int:
        return len(self.S) + len(self.C)

    def neighbors_in_c(self, v: int) -> list[int]:
        """Neighbors of v inside C, ascending."""
        C = self.C
        return [int(u) for u in self.g.neighbors(v) if int(u) in C]

    def sc_vertices(self):
        return list(self.S) + list(self.C)

    def snapshot(self) -> "SearchContext":
        """Deep copy of the mutable state; graph and masks are shared."""
        return SearchContext(self.g, self.k, self.q, list(self.S), set(self.C),
                             set(self.X), self.nonnbr.copy(), self.deg_sc.copy(),
                             self.adj_mask, self.s_mask, self.c_mask)

    # -- branching steps --------------------------------------------------

    def include_child(self, v: int, filtered: tuple[set, set] | None = None) -> "SearchContext":
        """State after moving pivot v from C into S and keeping only the
        vertices w with S+{v,w} still a k-plex."""
        if filtered is None:
            filtered = filter_on_add(self, v)
        newC, newX = filtered
        k = self.k
        adj_mask = self.adj_mask
        vmask = adj_mask[v]
        nonnbr = self.nonnbr.copy()
        for w in self.S:
            if not (vmask >> w) & 1:
                nonnbr[w] += 1
        for w in newC:
            if not (vmask >> w) & 1:
                nonnbr[w] += 1
        for w in newX:
            if not (vmask >> w) & 1:
                nonnbr[w] += 1
        smask = self.s_mask | (1 << v)
        cmask = 0
        for w in newC:
            cmask |= 1 << w
        scmask = smask | cmask
        deg_sc = self.deg_sc.copy()
        for w in self.S:
            deg_sc[w] = (adj_mask[w] & scmask).bit_count()
        deg_sc[v] = (adj_mask[v] & scmask).bit_count()
        for w in newC:
            deg_sc[w] = (adj_mask[w] & scmask).bit_count()
        return SearchContext(self.g, k, self.q, self.S + [v], newC, newX,
                             nonnbr, deg_sc, adj_mask, smask, cmask)

    def exclude_child(self, v: int) -> "SearchContext":
        """State after moving pivot v from C into X."""
        newC = set(self.C)
        newC.discard(v)
        newX = set(self.X)
        newX.add(v)
        deg_sc = self.deg_sc.copy()
        in_sc = self.s_mask | self.c_mask
        for u in self.g.neighbors(v):
            u = int(u)
            if u != v and (in_sc >> u) & 1:
                deg_sc[u] -= 1
        return SearchContext(self.g, self.k, self.q, list(self.S), newC, newX,
                             self.nonnbr.copy(), deg_sc, self.adj_mask,
                             self.s_mask, self.c_mask & ~(1 << v))

    # -- debugging ---------------------------------------------------------

    def validate(self) -> None:
        """Assert counters match a from-scratch recomputation and the
        structural invariants hold.  Test-mode only; O(n * deg)."""
        k = self.k
        S, C, X = self.S, self.C, self.X
        assert not (set(S) & C or set(S) & X or C & X), "S, C, X overlap"
        sset = set(S)
        for v in S:
            nn = sum(1 for w in S if w != v and not (self.adj_mask[v] >> w) & 1)
            assert nn == self.nonnbr[v], f"nonnbr[{v}] stale"
            assert nn <= k - 1, "S is not a k-plex"
        for u in C | X:
            nn = sum(1 for w in S if not (self.adj_mask[u] >> w) & 1)
            assert nn == self.nonnbr[u], f"nonnbr[{u}] stale"
            assert nn <= k - 1, "C/X one-vertex extension invariant broken"
            for w in S:
                grow = self.nonnbr[w] + (0 if (self.adj_mask[w] >> u) & 1 else 1)
                assert grow <= k - 1, "C/X extension breaks a member of S"
        scmask = 0
        for w in list(S) + list(C):
            scmask |= 1 << w
        assert scmask == (self.s_mask | self.c_mask), "masks stale"
        for w in list(S) + list(C):
            d = (self.adj_mask[w] & scmask).bit_count()
            assert d == self.deg_sc[w], f"deg_sc[{w}] stale"
        assert set(int(v) for v in sset) == {b for b in range(self.g.n) if (self.s_mask >> b) & 1}


# ---------------------------------------------------------------------------
# operations

def is_kplex(g: Graph, vertices, k: int) -> bool:
    """True iff every member has at least |set|-k neighbors inside it."""
    members = {int(v) for v in vertices}
    need = len(members) - k
    if need <= 0:
        return True
    for v in members:
        deg = sum(1 for u in g.neighbors(v) if int(u) in members)
        if deg < need:
            return False
    return True


def _better(deg_a, nn_a, a, deg_b, nn_b, b) -> bool:
    """Pivot preference: lower G(S+C) degree, then more non-neighbors in S,
    then lower vertex ID."""
    if deg_a != deg_b:
        return deg_a < deg_b
    if nn_a != nn_b:
        return nn_a > nn_b
    return a < b


def select_pivot(ctx: SearchContext) -> int:
    """Minimum-degree vertex of G(S+C), preferring many non-neighbors in S;
    when that vertex lies in S, re-pick by the same rules among its
    non-neighbors in C.  The result is always a member of C."""
    assert ctx.C, "select_pivot needs a non-empty candidate set"
    best = -1
    bdeg = bnn = 0
    for w in ctx.sc_vertices():
        d, nn = int(ctx.deg_sc[w]), int(ctx.nonnbr[w])
        if best < 0 or _better(d, nn, w, bdeg, bnn, best):
            best, bdeg, bnn = w, d, nn
    if (ctx.s_mask >> best) & 1:
        vmask = ctx.adj_mask[best]
        re_best = -1
        bdeg = bnn = 0
        for u in ctx.C:
            if (vmask >> u) & 1:
                continue
            d, nn = int(ctx.deg_sc[u]), int(ctx.nonnbr[u])
            if re_best < 0 or _better(d, nn, u, bdeg, bnn, re_best):
                re_best, bdeg, bnn = u, d, nn
        assert re_best >= 0, "pivot in S must have a non-neighbor in C here"
        best = re_best
    return best


def _min_degree_sc(ctx: SearchContext) -> int:
    return min(int(ctx.deg_sc[w]) for w in ctx.sc_vertices())


def check_maximal(ctx: SearchContext) -> bool:
    """Whether the k-plex S+C extends by no vertex of X.

    X suffices for maximality in G: every vertex compatible with S went
    into C or X at seeding, and the hereditary filters only drop vertices
    that can extend no superset reached below this branch."""
    size = ctx.size_sc()
    k = ctx.k
    floor = size - k
    scmask = ctx.s_mask | ctx.c_mask
    tmask = 0
    for w in ctx.sc_vertices():
        if ctx.deg_sc[w] == floor:
            tmask |= 1 << w
    need = size + 1 - k
    for u in ctx.X:
        amask = ctx.adj_mask[u]
        if (amask & scmask).bit_count() >= need and tmask & ~amask == 0:
            return False
    return True


def filter_on_add(ctx: SearchContext, v: int) -> tuple[set[int], set[int]]:
    """Split survivors after adding pivot v to S: keep w iff S+{v,w} is a
    k-plex, decided in O(1) per vertex from the counters.

    The only members of S that can be violated are common non-neighbors of
    v and w that are already at full slack."""
    k = ctx.k
    adj_mask = ctx.adj_mask
    vmask = adj_mask[v]
    zmask = 0
    for u in ctx.S:
        if not (vmask >> u) & 1 and ctx.nonnbr[u] == k - 2:
            zmask |= 1 << u
    nnv = int(ctx.nonnbr[v])
    cap = k - 1

    def survives(w: int) -> bool:
        a = 0 if (vmask >> w) & 1 else 1
        if ctx.nonnbr[w] + a > cap or nnv + a > cap:
            return False
        return zmask & ~adj_mask[w] == 0

    newC = {w for w in ctx.C if w != v and survives(w)}
    newX = {w for w in ctx.X if survives(w)}
    return newC, newX


# ---------------------------------------------------------------------------
# the branch procedure

def _expand_node(cur: SearchContext, emit: Callable, *,
                 use_bounds: bool = True,
                 tight: bool = False,
                 pivot_rule: str = "paper",
                 observer: Callable | None = None,
                 scratch: BoundScratch | None = None,
                 debug: bool = False):
    """Handle one branch node: emit at the two leaf cases, otherwise return
    the (include, exclude) children of the pivot; include is None when the
    upper bound prunes it."""
    if debug:
        cur.validate()
    if not cur.C:
        if len(cur.S) >= cur.q and not cur.X:
            emit(tuple(sorted(cur.S)))
        return None, None
    size = cur.size_sc()
    if _min_degree_sc(cur) >= size - cur.k:
        # S+C is itself a k-plex; no proper subset can be maximal
        if size >= cur.q and check_maximal(cur):
            emit(tuple(sorted(cur.sc_vertices())))
        return None, None
    if pivot_rule == "paper":
        v = select_pivot(cur)
    else:  # "first": lowest-ID candidate, for the pruning-safety tests
        v = min(cur.C)
    if observer is not None:
        observer(cur, v)
    take = True
    if use_bounds:
        take = hybrid_bound(cur, v, scratch, tight=tight) >= cur.q
    inc = cur.include_child(v) if take else None
    return inc, cur.exclude_child(v)


def branch(ctx: SearchContext,
           sink: ResultSink,
           stats: Stats | None = None,
           *,
           use_bounds: bool = True,
           tight: bool = False,
           pivot_rule: str = "paper",
           observer: Callable | None = None,
           translate: np.ndarray | None = None,
           scratch: BoundScratch | None = None,
           debug: bool = False) -> None:
    """Emit every maximal k-plex of G that contains S, sits inside S+C,
    avoids X, and has size >= q - each exactly once.

    Iterative: the stack holds unexplored subtree roots; the include child
    of the current pivot is pushed last so it is explored first.
    """
    if stats is None:
        stats = Stats()
    if scratch is None:
        scratch = BoundScratch(ctx.k)

    def emit(vertices):
        stats.count += 1
        if translate is not None:
            vertices = tuple(int(translate[v]) for v in vertices)
        sink.emit(tuple(vertices))

    stack = [ctx]
    while stack:
        cur = stack.pop()
        stats.nodes += 1
        inc, exc = _expand_node(cur, emit, use_bounds=use_bounds, tight=tight,
                                pivot_rule=pivot_rule, observer=observer,
                                scratch=scratch, debug=debug)
        if exc is not None:
            stack.append(exc)
        if inc is not None:
            stack.append(inc)


# ---------------------------------------------------------------------------
# top-level sequential enumeration

def _resolve_engine(engine: str, *, needs_python: bool) -> str:
    if needs_python:
        return "python"
    if engine == "auto":
        try:
            from . import _kernel  # noqa: F401
            return "numba"
        except Exception:
            return "python"
    return engine


def enumerate_kplexes(g: Graph, k: int, q: int, sink: ResultSink | None = None,
                      *,
                      engine: str = "auto",
                      use_core_reduction: bool = True,
                      use_lemma3: bool = True,
                      use_bounds: bool = True,
                      tight: bool = False,
                      pivot_rule: str = "paper",
                      observer: Callable | None = None,
                      debug: bool = False) -> Stats:
    """Enumerate all maximal k-plexes of size >= q into ``sink``.

    Seeds the search at every vertex of the (q-k)-core in degeneracy
    order: candidates are the later-ordered 2-hop neighbors, exclusions
    the earlier-ordered ones, optionally pruned by the common-neighbor
    rule.  Each maximal k-plex is emitted from exactly one seed.

    Args:
        sink: consumer of results; defaults to a CountSink.
        engine: "auto", "python", or "numba".  The python engine is the
            readable reference; the numba engine is the fast path.
            Observers, debug mode, and non-default pivot rules force
            python.
        use_core_reduction / use_lemma3 / use_bounds: ablation toggles.
        tight: charge the pivot's own non-neighbors when computing slack
            budgets (a sound strengthening; off by default).
        observer: callable (ctx, pivot) invoked at every bound site.
        debug: revalidate counters from scratch at every node.

    Returns:
        Stats with counts, node totals, and per-phase timings.

    Raises:
        ValueError: if k < 1 or q < 2k-1 (2-hop seeding needs q >= 2k-1).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q < 2 * k - 1:
        raise ValueError(f"q must be >= 2k-1 = {2 * k - 1}, got {q}")
    if sink is None:
        sink = CountSink()
    stats = Stats(n=g.n, m=g.m)
    engine = _resolve_engine(engine, needs_python=(
        observer is not None or debug or pivot_rule != "paper"))
    stats.engine = engine

    t0 = time.perf_counter()
    if use_core_reduction:
        gR, old_to_new = reduce_to_core(g, k, q)
        new_to_old = np.flatnonzero(old_to_new >= 0)
    else:
        gR, new_to_old = g, np.arange(g.n, dtype=np.int64)
    stats.reduced_n, stats.reduced_m = gR.n, gR.m
    t1 = time.perf_counter()
    info = core_decomposition(gR)
    t2 = time.perf_counter()

    nseeds = max(0, gR.n - q + 1)
    stats.seeds = nseeds
    if engine == "numba":
        from ._kernel import run_seeds_numba
        run_seeds_numba(gR, info, k, q, range(nseeds), sink, stats,
                        new_to_old=new_to_old,
                        use_lemma3=use_lemma3, use_bounds=use_bounds,
                        tight=tight)
    else:
        adj_mask = gR.adjacency_masks()
        scratch = BoundScratch(k)
        for i in range(nseeds):
            ctx = seed_context(gR, info, k, q, i, adj_mask=adj_mask,
                               use_lemma3=use_lemma3)
            branch(ctx, sink, stats, use_bounds=use_bounds, tight=tight,
                   pivot_rule=pivot_rule, observer=observer,
                   translate=new_to_old, scratch=scratch, debug=debug)
    t3 = time.perf_counter()
    stats.phase_ms = {
        "reduce_ms": (t1 - t0) * 1e3,
        "order_ms": (t2 - t1) * 1e3,
        "search_ms": (t3 - t2) * 1e3,
        "total_ms": (t3 - t0) * 1e3,
    }
    return stats


def seed_sets(gR: Graph, info: CoreInfo, k: int, q: int, i: int,
              use_lemma3: bool = True) -> tuple[int, np.ndarray, np.ndarray]:
    """Seed vertex plus pruned candidate/exclusion sets for position i.

    For k=1 only neighbors of the seed can pair with it, so others are
    dropped before the common-neighbor pruning (both engines share this
    path, which keeps their branch trees identical)."""
    ss = build_seed(gR, info, i)
    cand, excl = ss.cand, ss.excl
    if k == 1:
        nbrs = set(gR.neighbors(ss.seed).tolist())
        cand = np.asarray([u for u in cand if int(u) in nbrs], dtype=np.int64)
        excl = np.asarray([u for u in excl if int(u) in nbrs], dtype=np.int64)
    if use_lemma3:
        cand, excl = lemma3_prune(gR, [ss.seed], cand, excl, k, q)
    return ss.seed, cand, excl


def seed_context(gR: Graph, info: CoreInfo, k: int, q: int, i: int,
                 adj_mask: list[int] | None = None,
                 use_lemma3: bool = True) -> SearchContext:
    """Build the root SearchContext for seed position i on the reduced graph."""
    seed, cand, excl = seed_sets(gR, info, k, q, i, use_lemma3=use_lemma3)
    return SearchContext.for_seed(gR, k, q, seed, cand, excl, adj_mask=adj_mask)
