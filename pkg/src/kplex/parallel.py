"""Multi-worker enumeration: seeds are handed out dynamically, and when a
worker runs dry a busy worker splits its current branch, donating the
include/exclude half it is not about to explore.

The graph is shared read-only; every task owns its search state outright,
and hand-off transfers that ownership, so workers never touch the same
mutable data.  Donation happens only at branch boundaries (the kernel
pauses between node expansions), which keeps every snapshot
invariant-consistent.  Counts are deterministic for any worker count and
schedule because live tasks cover disjoint subtrees.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .bounds import BoundScratch, hybrid_bound
from .enumerator import (
    CountSink,
    ResultSink,
    SearchContext,
    Stats,
    _expand_node,
    seed_context,
    seed_sets,
    select_pivot,
)
from .graph import Graph
from .preprocess import core_decomposition, reduce_to_core

__all__ = ["BranchTask", "split_task", "enumerate_parallel"]


@dataclass
class BranchTask:
    """An unexplored subtree root: a self-contained SearchContext snapshot."""

    ctx: SearchContext

    @property
    def candidate_size(self) -> int:
        return len(self.ctx.C)


def split_task(task: BranchTask, *, use_bounds: bool = True,
               tight: bool = False) -> tuple[BranchTask | None, BranchTask]:
    """Divide a task at its pivot into the subtree containing the pivot and
    the subtree excluding it.

    The include half is None when the pivot's upper bound already rules
    out any result of size >= q (pruning it loses only supersets of the
    pivot, which is exactly what the exclude half never explores).  The
    two halves partition the task's reachable maximal k-plexes.

    Requires a non-empty candidate set.
    """
    ctx = task.ctx
    if not ctx.C:
        raise ValueError("cannot split a task with an empty candidate set")
    if min(int(ctx.deg_sc[w]) for w in ctx.sc_vertices()) >= ctx.size_sc() - ctx.k:
        # S+C is already a k-plex (always true when |C| = 1): the branch
        # procedure would emit here, so pivot re-selection may have no
        # non-neighbor to fall back on.  Any candidate still splits the
        # subtree soundly; take the lowest for determinism.
        v = min(ctx.C)
    else:
        v = select_pivot(ctx)
    include = None
    if not use_bounds or hybrid_bound(ctx, v, tight=tight) >= ctx.q:
        include = BranchTask(ctx.include_child(v))
    exclude = BranchTask(ctx.exclude_child(v))
    return include, exclude


# ---------------------------------------------------------------------------
# coordinator shared by both engines

class _Coordinator:
    """Hands out seed indices and donated tasks; tracks idle workers and
    flags split requests at the busiest-looking victim."""

    def __init__(self, nseeds: int, workers: int):
        self.lock = threading.Lock()
        self.cond = threading.Condition(self.lock)
        self.nseeds = nseeds
        self.next_seed = 0
        self.pending: deque = deque()
        self.outstanding = 0
        self.workers = workers
        self.steal_flags = np.zeros(workers, dtype=np.int32)
        self.published = np.zeros(workers, dtype=np.int64)
        self.busy = [False] * workers
        self.tasks = 0
        self.steals = 0
        self._rr = 0

    def get_work(self, wid: int):
        """Next pending task, else a fresh seed index, else wait while
        poking busy workers to split; None when everything is finished."""
        with self.cond:
            while True:
                if self.pending:
                    return self.pending.popleft()
                if self.next_seed < self.nseeds:
                    i = self.next_seed
                    self.next_seed += 1
                    self.outstanding += 1
                    self.tasks += 1
                    return ("seed", i)
                if self.outstanding == 0:
                    self.cond.notify_all()
                    return None
                self._request_split(wid)
                self.cond.wait(timeout=0.002)

    def _request_split(self, wid: int) -> None:
        # prefer the worker advertising the fattest pending subtree; round-
        # robin over the rest so a stale advertisement cannot starve us
        best, best_size = -1, 0
        for w in range(self.workers):
            if w != wid and self.busy[w] and self.published[w] > best_size:
                best, best_size = w, int(self.published[w])
        if best < 0:
            candidates = [w for w in range(self.workers) if w != wid and self.busy[w]]
            if not candidates:
                return
            best = candidates[self._rr % len(candidates)]
            self._rr += 1
        self.steal_flags[best] = 1

    def add_donation(self, task) -> None:
        with self.cond:
            self.pending.append(task)
            self.outstanding += 1
            self.tasks += 1
            self.steals += 1
            self.cond.notify_all()

    def mark_busy(self, wid: int, size: int) -> None:
        self.busy[wid] = True
        self.published[wid] = size

    def task_done(self, wid: int) -> None:
        with self.cond:
            self.outstanding -= 1
            self.busy[wid] = False
            self.published[wid] = 0
            self.steal_flags[wid] = 0
            if self.outstanding == 0:
                self.cond.notify_all()


# ---------------------------------------------------------------------------
# python-engine worker

def _python_worker(wid: int, coord: _Coordinator, gR: Graph, k: int, q: int,
                   adj_mask, info, sink: ResultSink, translate, stats: Stats,
                   stats_lock: threading.Lock, opts: dict, errors: list) -> None:
    scratch = BoundScratch(k)
    nodes = 0
    emitted = 0

    def emit(vertices):
        nonlocal emitted
        emitted += 1
        sink.emit(tuple(int(translate[v]) for v in vertices))

    try:
        while True:
            work = coord.get_work(wid)
            if work is None:
                break
            if isinstance(work, tuple) and work[0] == "seed":
                ctx = seed_context(gR, info, k, q, work[1],
                                   adj_mask=adj_mask, use_lemma3=opts["use_lemma3"])
                stack = [ctx]
            else:
                stack = [work.ctx]
            coord.mark_busy(wid, len(stack[0].C))
            while stack:
                if coord.steal_flags[wid] and len(stack) >= 2:
                    donated = stack.pop(0)
                    with coord.lock:
                        coord.steal_flags[wid] = 0
                    coord.add_donation(BranchTask(donated))
                coord.published[wid] = len(stack[0].C) if stack else 0
                cur = stack.pop()
                nodes += 1
                inc, exc = _expand_node(cur, emit, use_bounds=opts["use_bounds"],
                                        tight=opts["tight"], scratch=scratch)
                if exc is not None:
                    stack.append(exc)
                if inc is not None:
                    stack.append(inc)
            coord.task_done(wid)
    except BaseException as e:  # surfaced by the caller
        errors.append(e)
        coord.task_done(wid)
    finally:
        with stats_lock:
            stats.nodes += nodes
            stats.count += emitted


# ---------------------------------------------------------------------------
# numba-engine worker

def _numba_worker(wid: int, coord: _Coordinator, gR: Graph, k: int, q: int,
                  info, sink: ResultSink, translate, stats: Stats,
                  stats_lock: threading.Lock, opts: dict, errors: list) -> None:
    from . import _kernel

    count_only = type(sink) is CountSink
    mode = 0 if count_only else 1

    def consume(members_gr):
        sink.emit(tuple(int(translate[v]) for v in members_gr))

    try:
        while True:
            work = coord.get_work(wid)
            if work is None:
                break
            if isinstance(work, tuple) and work[0] == "seed":
                seed, cand, excl = seed_sets(gR, info, k, q, work[1],
                                             use_lemma3=opts["use_lemma3"])
                task = _kernel.build_seed_task(
                    gR, k, q, seed, cand, excl, info.degeneracy,
                    use_bounds=opts["use_bounds"], tight=opts["tight"], mode=mode)
            else:
                task = work
            coord.mark_busy(wid, task.bottom_candidate_size())
            while True:
                coord.published[wid] = task.bottom_candidate_size()
                rc = task.run_chunk(coord.steal_flags, wid)
                emitted, nodes = task.take_counters()
                if emitted or nodes:
                    with stats_lock:
                        stats.nodes += nodes
                        stats.count += emitted
                if mode == 1:
                    task.drain(consume)
                elif emitted:
                    sink.add_count(emitted)
                if rc == _kernel.DONE:
                    break
                if rc == _kernel.PAUSED:
                    if coord.steal_flags[wid] and task.pending_frames() >= 2:
                        child = task.donate_bottom()
                        with coord.lock:
                            coord.steal_flags[wid] = 0
                        coord.add_donation(child)
                    else:
                        with coord.lock:
                            coord.steal_flags[wid] = 0
            coord.task_done(wid)
    except BaseException as e:
        errors.append(e)
        coord.task_done(wid)


# ---------------------------------------------------------------------------
# entry point

def enumerate_parallel(g: Graph, k: int, q: int, workers: int,
                       sink: ResultSink | None = None, *,
                       engine: str = "auto",
                       use_core_reduction: bool = True,
                       use_lemma3: bool = True,
                       use_bounds: bool = True,
                       tight: bool = False) -> Stats:
    """Enumerate with ``workers`` threads; the emitted multiset (hence the
    count) matches sequential enumeration for every input and worker count.

    Raises:
        ValueError: workers < 1, k < 1, or q < 2k-1.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q < 2 * k - 1:
        raise ValueError(f"q must be >= 2k-1 = {2 * k - 1}, got {q}")
    if sink is None:
        sink = CountSink()

    stats = Stats(n=g.n, m=g.m, workers=workers)
    if engine == "auto":
        try:
            from . import _kernel  # noqa: F401
            engine = "numba"
        except Exception:
            engine = "python"
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
    coord = _Coordinator(nseeds, workers)
    stats_lock = threading.Lock()
    opts = {"use_lemma3": use_lemma3, "use_bounds": use_bounds, "tight": tight}
    errors: list = []

    if engine == "numba":
        target = _numba_worker
        args = lambda w: (w, coord, gR, k, q, info, sink, new_to_old,
                          stats, stats_lock, opts, errors)
    else:
        adj_mask = gR.adjacency_masks()
        target = _python_worker
        args = lambda w: (w, coord, gR, k, q, adj_mask, info, sink, new_to_old,
                          stats, stats_lock, opts, errors)

    threads = [threading.Thread(target=target, args=args(w), name=f"kplex-w{w}")
               for w in range(workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]

    t3 = time.perf_counter()
    stats.tasks = coord.tasks
    stats.steals = coord.steals
    stats.phase_ms = {
        "reduce_ms": (t1 - t0) * 1e3,
        "order_ms": (t2 - t1) * 1e3,
        "search_ms": (t3 - t2) * 1e3,
        "total_ms": (t3 - t0) * 1e3,
    }
    return stats
